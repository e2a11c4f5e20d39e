"""
Classical Liouville densities on the phase plane.

Four variants share one duck-typed surface: ``beta``, ``gamma``, ``hbar``,
``s`` (the dimensionless beta*gamma/hbar), ``evaluate(q, p)`` and ``chart()``,
the quadrature domain that covers the density's support.

Usage:
    from groenewold.services.densities import GaussianDensity, uncertainty_product

    rho = GaussianDensity(beta=1.0, gamma=1.0)
    rho.evaluate(0.0, 0.0)          # 1/pi
    uncertainty_product(rho)        # 0.5
"""
from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any, Callable, ClassVar, Literal, Union

import numpy as np

from groenewold.conf import get_numerics
from groenewold.exceptions import (
    ConfigurationError,
    MomentDivergenceError,
    QuadratureConvergenceError,
)
from groenewold.services.special_functions import (
    finite_rule,
    periodic_rule,
    refine,
    semi_infinite_rule,
)

logger = logging.getLogger(__name__)

Profile = Callable[[np.ndarray], np.ndarray]
Sampler = Callable[[np.ndarray, np.ndarray], np.ndarray]

# Starting resolution (per axis) for phase-space quadrature
CHART_START_POINTS = 32
RADIAL_START_POINTS = 32


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        try:
            number = float(value)
        except (TypeError, ValueError):
            number = math.nan
        if not (math.isfinite(number) and number > 0):
            raise ValueError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class SupportBox:
    """Rectangle [q_min, q_max] x [p_min, p_max]."""

    q_min: float
    q_max: float
    p_min: float
    p_max: float

    def __post_init__(self):
        if not (self.q_min < self.q_max and self.p_min < self.p_max):
            raise ValueError(f"degenerate support box {self}")

    @classmethod
    def symmetric(cls, q_half_width: float, p_half_width: float) -> SupportBox:
        _check_positive(q_half_width=q_half_width, p_half_width=p_half_width)
        return cls(-q_half_width, q_half_width, -p_half_width, p_half_width)

    @property
    def q_half_width(self) -> float:
        return 0.5 * (self.q_max - self.q_min)

    @property
    def p_half_width(self) -> float:
        return 0.5 * (self.p_max - self.p_min)

    @property
    def is_centred(self) -> bool:
        return self.q_min == -self.q_max and self.p_min == -self.p_max

    @property
    def area(self) -> float:
        return (self.q_max - self.q_min) * (self.p_max - self.p_min)

    def contains(self, q: np.ndarray, p: np.ndarray) -> np.ndarray:
        return (q >= self.q_min) & (q <= self.q_max) & (p >= self.p_min) & (p <= self.p_max)


@dataclass(frozen=True)
class PhaseSpaceChart:
    """
    Quadrature domain for phase-space integrals.

    ``cartesian`` is a Gauss-Legendre tensor product over ``box``.
    ``elliptic`` is the disc q^2/beta^2 + p^2/gamma^2 <= radius^2, integrated in
    scaled polar coordinates: Gauss-Legendre in r, periodic trapezoid in the angle.
    """

    kind: Literal["cartesian", "elliptic"]
    box: SupportBox | None = None
    beta: float = 1.0
    gamma: float = 1.0
    radius: float = 1.0
    compact: bool = True

    @property
    def area(self) -> float:
        if self.kind == "cartesian":
            return self.box.area
        return math.pi * self.beta * self.gamma * self.radius ** 2

    def sort_key(self) -> tuple:
        if self.kind == "cartesian":
            return (self.area, 0, self.box.q_min, self.box.q_max, self.box.p_min, self.box.p_max)
        return (self.area, 1, self.beta, self.gamma, self.radius, 0.0)

    def grid_from_rules(self, first, second) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flattened (q, p, weight) nodes from two one-dimensional rules."""
        a, b = np.meshgrid(first.nodes, second.nodes, indexing="ij")
        weights = np.outer(first.weights, second.weights)
        if self.kind == "cartesian":
            return a.ravel(), b.ravel(), weights.ravel()
        q = self.beta * a * np.cos(b)
        p = self.gamma * a * np.sin(b)
        weights = self.beta * self.gamma * a * weights
        return q.ravel(), p.ravel(), weights.ravel()

    def grid(self, npoints: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self.kind == "cartesian":
            first = finite_rule(npoints, self.box.q_min, self.box.q_max)
            second = finite_rule(npoints, self.box.p_min, self.box.p_max)
        else:
            first = finite_rule(npoints, 0.0, self.radius)
            second = periodic_rule(npoints)
        return self.grid_from_rules(first, second)

    def integrate(self, integrand: Callable[[np.ndarray, np.ndarray], np.ndarray], npoints: int):
        """Integrate ``integrand(q, p)`` (trailing axis over nodes allowed) at one resolution."""
        q, p, weights = self.grid(npoints)
        return np.asarray(integrand(q, p)) @ weights


@dataclass(frozen=True)
class GaussianDensity:
    """rho(q, p) = exp(-q^2/beta^2 - p^2/gamma^2) / (pi beta gamma)."""

    beta: float
    gamma: float
    hbar: float = 1.0

    family: ClassVar[str] = "gaussian"

    def __post_init__(self):
        _check_positive(beta=self.beta, gamma=self.gamma, hbar=self.hbar)

    @property
    def s(self) -> float:
        return self.beta * self.gamma / self.hbar

    def evaluate(self, q, p):
        u = np.asarray(q, dtype=float) ** 2 / self.beta ** 2 + np.asarray(p, dtype=float) ** 2 / self.gamma ** 2
        return np.exp(-u) / (math.pi * self.beta * self.gamma)

    def uncertainty_product(self) -> float:
        return self.beta * self.gamma / 2.0

    def chart(self) -> PhaseSpaceChart:
        return PhaseSpaceChart(
            kind="elliptic",
            beta=self.beta,
            gamma=self.gamma,
            radius=get_numerics().gaussian_radius_cutoff,
            compact=False,
        )

    def as_radial(self) -> RadialDensity:
        norm = 1.0 / (math.pi * self.beta * self.gamma)
        return RadialDensity(
            profile=lambda u: norm * np.exp(-u),
            beta=self.beta,
            gamma=self.gamma,
            hbar=self.hbar,
            decay_rate=1.0,
        )


@dataclass(frozen=True)
class UniformEllipseDensity:
    """rho = 1/(pi beta gamma) inside q^2/beta^2 + p^2/gamma^2 <= 1, zero outside."""

    beta: float
    gamma: float
    hbar: float = 1.0

    family: ClassVar[str] = "uniform"

    def __post_init__(self):
        _check_positive(beta=self.beta, gamma=self.gamma, hbar=self.hbar)

    @property
    def s(self) -> float:
        return self.beta * self.gamma / self.hbar

    def evaluate(self, q, p):
        u = np.asarray(q, dtype=float) ** 2 / self.beta ** 2 + np.asarray(p, dtype=float) ** 2 / self.gamma ** 2
        return np.where(u <= 1.0, 1.0 / (math.pi * self.beta * self.gamma), 0.0)

    def uncertainty_product(self) -> float:
        return self.beta * self.gamma / 4.0

    def chart(self) -> PhaseSpaceChart:
        return PhaseSpaceChart(kind="elliptic", beta=self.beta, gamma=self.gamma, radius=1.0)

    def as_radial(self) -> RadialDensity:
        height = 1.0 / (math.pi * self.beta * self.gamma)
        return RadialDensity(
            profile=lambda u: np.full_like(np.asarray(u, dtype=float), height),
            beta=self.beta,
            gamma=self.gamma,
            hbar=self.hbar,
            support_radius=1.0,
        )


@dataclass(frozen=True)
class RadialDensity:
    """
    rho(q, p) = g(q^2/beta^2 + p^2/gamma^2) for a profile g >= 0.

    ``support_radius`` bounds the support in the scaled radius (g is taken as
    zero for u > support_radius^2). For unbounded support, ``decay_rate`` is the
    rate a in g(u) ~ e^{-a u}; it only tunes the semi-infinite quadrature.
    """

    profile: Profile
    beta: float
    gamma: float
    hbar: float = 1.0
    support_radius: float = math.inf
    decay_rate: float = 1.0

    family: ClassVar[str] = "radial"

    def __post_init__(self):
        _check_positive(beta=self.beta, gamma=self.gamma, hbar=self.hbar, decay_rate=self.decay_rate)
        if not self.support_radius > 0:
            raise ValueError(f"support_radius must be positive, got {self.support_radius}")

    @property
    def s(self) -> float:
        return self.beta * self.gamma / self.hbar

    @property
    def is_compact(self) -> bool:
        return math.isfinite(self.support_radius)

    def profile_values(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            values = np.asarray(self.profile(u), dtype=float) * np.ones_like(u)
        if self.is_compact:
            values = np.where(u <= self.support_radius ** 2, values, 0.0)
        return values

    def evaluate(self, q, p):
        u = np.asarray(q, dtype=float) ** 2 / self.beta ** 2 + np.asarray(p, dtype=float) ** 2 / self.gamma ** 2
        return self.profile_values(u)

    def chart(self) -> PhaseSpaceChart:
        if self.is_compact:
            return PhaseSpaceChart(kind="elliptic", beta=self.beta, gamma=self.gamma, radius=self.support_radius)
        cutoff = get_numerics().gaussian_radius_cutoff / math.sqrt(self.decay_rate)
        return PhaseSpaceChart(kind="elliptic", beta=self.beta, gamma=self.gamma, radius=cutoff, compact=False)

    def radial_integral(self, weight: Callable[[np.ndarray], np.ndarray], label: str = "radial integral") -> float:
        """integral_0^{R^2} g(u) weight(u) du with two-resolution refinement."""
        if self.is_compact:
            upper = self.support_radius ** 2

            def estimate(npoints):
                rule = finite_rule(npoints, 0.0, upper)
                return rule.integrate(self.profile_values(rule.nodes) * weight(rule.nodes))

        else:
            scale = 1.0 / self.decay_rate

            def estimate(npoints):
                rule = semi_infinite_rule(npoints)
                u = scale * rule.nodes
                return scale * np.sum(rule.plain_weights * self.profile_values(u) * weight(u))

        return refine(estimate, RADIAL_START_POINTS, max_points=512, label=label)

    def normalization(self) -> float:
        return math.pi * self.beta * self.gamma * self.radial_integral(np.ones_like, "radial normalisation")

    def uncertainty_product(self) -> float:
        # <q^2> = (pi beta^3 gamma / 2) int g(u) u du, and beta <-> gamma for <p^2>
        try:
            first_moment = self.radial_integral(lambda u: u, "radial second moment")
        except QuadratureConvergenceError as exc:
            raise MomentDivergenceError(f"second moment of radial density diverges: {exc}") from exc
        norm = self.normalization()
        half = 0.5 * math.pi * self.beta * self.gamma * first_moment / norm
        return self.beta * self.gamma * half


@dataclass(frozen=True)
class GeneralDensity:
    """
    Arbitrary density given by a vectorised ``sampler(q, p)`` on a finite box.

    The Fock basis scales ``beta`` and ``gamma`` default to the box half-widths.
    With ``chart_kind="elliptic"`` the sampler must vanish outside the ellipse
    inscribed in a centred box, and integration uses elliptic polar coordinates.
    """

    sampler: Sampler
    support_box: SupportBox
    hbar: float = 1.0
    beta: float | None = None
    gamma: float | None = None
    chart_kind: Literal["cartesian", "elliptic"] = "cartesian"
    label: str = field(default="general", compare=False)

    family: ClassVar[str] = "general"

    def __post_init__(self):
        _check_positive(hbar=self.hbar)
        if self.beta is None:
            object.__setattr__(self, "beta", self.support_box.q_half_width)
        if self.gamma is None:
            object.__setattr__(self, "gamma", self.support_box.p_half_width)
        _check_positive(beta=self.beta, gamma=self.gamma)
        if self.chart_kind not in ("cartesian", "elliptic"):
            raise ValueError(f"unknown chart kind {self.chart_kind!r}")
        if self.chart_kind == "elliptic" and not self.support_box.is_centred:
            raise ValueError("an elliptic chart needs a box centred on the origin")

    @property
    def s(self) -> float:
        return self.beta * self.gamma / self.hbar

    def evaluate(self, q, p):
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        inside = self.support_box.contains(q, p)
        values = np.asarray(self.sampler(q, p), dtype=float) * np.ones(np.broadcast(q, p).shape)
        return np.where(inside, values, 0.0)

    def chart(self) -> PhaseSpaceChart:
        if self.chart_kind == "elliptic":
            return PhaseSpaceChart(
                kind="elliptic",
                beta=self.support_box.q_half_width,
                gamma=self.support_box.p_half_width,
                radius=1.0,
            )
        return PhaseSpaceChart(kind="cartesian", box=self.support_box)


Density = Union[GaussianDensity, UniformEllipseDensity, RadialDensity, GeneralDensity]


def evaluate(density: Density, q, p):
    """Pointwise density value, zero outside the support."""
    result = density.evaluate(q, p)
    return float(result) if np.ndim(result) == 0 else result


def _chart_integral(chart: PhaseSpaceChart, integrand, label: str):
    return refine(
        lambda npoints: chart.integrate(integrand, npoints),
        CHART_START_POINTS,
        max_points=1024,
        label=label,
    )


def normalization_residual(density: Density) -> float:
    """|integral rho - 1| by quadrature."""
    if isinstance(density, RadialDensity):
        total = density.normalization()
    else:
        total = _chart_integral(density.chart(), density.evaluate, "normalisation")
    return abs(float(total) - 1.0)


def uncertainty_product(density: Density) -> float:
    """
    Classical Delta q * Delta p.

    Analytic for Gaussian and uniform-ellipse densities, quadrature otherwise.

    Raises:
        MomentDivergenceError: if a second moment does not converge.
    """
    if isinstance(density, (GaussianDensity, UniformEllipseDensity, RadialDensity)):
        return density.uncertainty_product()

    def moments(q, p):
        rho = density.evaluate(q, p)
        return np.stack([rho, rho * q, rho * q * q, rho * p, rho * p * p])

    try:
        norm, mean_q, mean_q2, mean_p, mean_p2 = _chart_integral(density.chart(), moments, "moments")
    except QuadratureConvergenceError as exc:
        raise MomentDivergenceError(f"second moments did not converge: {exc}") from exc

    var_q = mean_q2 / norm - (mean_q / norm) ** 2
    var_p = mean_p2 / norm - (mean_p / norm) ** 2
    if not (math.isfinite(var_q) and math.isfinite(var_p)):
        raise MomentDivergenceError("second moment is not finite")
    return math.sqrt(max(var_q, 0.0) * max(var_p, 0.0))


def overlap_chart(rho: Density, rho_prime: Density) -> PhaseSpaceChart:
    """
    Chart for integrating rho * rho_prime.

    The product vanishes outside every compact support, so the smallest compact
    chart wins; with no compact support the widest chart is used. The choice
    does not depend on argument order.
    """
    charts = sorted([rho.chart(), rho_prime.chart()], key=PhaseSpaceChart.sort_key)
    compact = [chart for chart in charts if chart.compact]
    return compact[0] if compact else charts[-1]


def overlap_integral(rho: Density, rho_prime: Density) -> float:
    """integral rho * rho_prime dq dp."""
    chart = overlap_chart(rho, rho_prime)
    value = _chart_integral(
        chart,
        lambda q, p: rho.evaluate(q, p) * rho_prime.evaluate(q, p),
        "overlap",
    )
    return float(value)


def density_from_spec(spec: Mapping[str, Any]) -> Density:
    """
    Build a density from the JSON density-spec schema.

    {"type": "gaussian" | "uniform_ellipse", "beta": r, "gamma": r, "hbar": r}
    {"type": "uniform_box", "q_half_width": r, "p_half_width": r, "hbar": r, "height": r?}

    Raises:
        ConfigurationError: on unknown types, missing or non-positive fields.
    """
    if not isinstance(spec, Mapping):
        raise ConfigurationError("density spec must be a JSON object")

    kind = spec.get("type")

    def number(name: str, default: float | None = None) -> float:
        value = spec.get(name, default)
        if value is None:
            raise ConfigurationError(f"density spec of type {kind!r} needs {name!r}")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigurationError(f"{name!r} must be a number, got {value!r}")
        if not (math.isfinite(value) and value > 0):
            raise ConfigurationError(f"{name!r} must be positive, got {value!r}")
        return float(value)

    hbar = number("hbar", 1.0)
    if kind == "gaussian":
        return GaussianDensity(beta=number("beta"), gamma=number("gamma"), hbar=hbar)
    if kind == "uniform_ellipse":
        return UniformEllipseDensity(beta=number("beta"), gamma=number("gamma"), hbar=hbar)
    if kind == "uniform_box":
        q_half = number("q_half_width")
        p_half = number("p_half_width")
        height = number("height", 1.0 / (4.0 * q_half * p_half))
        return GeneralDensity(
            sampler=lambda q, p: np.full(np.broadcast(q, p).shape, height),
            support_box=SupportBox.symmetric(q_half, p_half),
            hbar=hbar,
            label="uniform_box",
        )
    raise ConfigurationError(f"unknown density type {kind!r}")
