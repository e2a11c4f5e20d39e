"""
Groenewold operators of Liouville densities in a truncated Fock basis.

The operator is the inverse Weyl-Wigner transform rho_hat = integral rho(q, p)
Delta(q, p) dq dp, with Fock-basis kernel elements

    <n|Delta|m> = 2 (-1)^m sqrt(m!/n!) (2 alpha)^(n-m) L_m^(n-m)(4|alpha|^2) exp(-2|alpha|^2)

for n >= m (conjugate for n < m), where
alpha = (sqrt(gamma/beta) q + i sqrt(beta/gamma) p) / sqrt(2 hbar).

Two construction paths:
- quantize_radial: densities depending only on q^2/beta^2 + p^2/gamma^2 are
  diagonal, lambda_n = 2 pi hbar (-1)^n int_0^inf g(t/s) e^{-t} L_n(2t) dt.
- quantize_general: full matrix by two-dimensional quadrature over the
  density's chart, band by band (n - m = const), optionally in threads.

Usage:
    from groenewold.services.densities import GaussianDensity
    from groenewold.services.quantizer import quantize_radial, trace_product

    rho = quantize_radial(GaussianDensity(beta=1.0, gamma=3.0), n_max=20)
    rho.diagonal[:3]                  # 0.5, 0.25, 0.125
    trace_product(rho, rho)           # 1/3
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.special import gammaln

from groenewold.conf import get_numerics
from groenewold.exceptions import (
    BasisMismatchError,
    PrecisionLimitError,
    SymmetryViolationError,
    TruncationError,
)
from groenewold.services.densities import (
    CHART_START_POINTS,
    Density,
    GaussianDensity,
    RadialDensity,
    UniformEllipseDensity,
)
from groenewold.services.special_functions import (
    MAX_LAGUERRE_DEGREE,
    QuadratureRule,
    finite_rule,
    laguerre_table,
    refine,
    semi_infinite_rule,
)

logger = logging.getLogger(__name__)

MAX_FOCK_INDEX = MAX_LAGUERRE_DEGREE
SYMMETRY_TOLERANCE = 1e-12
PAIR_TRACE_TOLERANCE = 1e-10
# Phase-space nodes per kernel evaluation block
NODE_CHUNK = 32768
GENERAL_MAX_POINTS = 1024


@dataclass(frozen=True, order=True)
class FockLabel:
    """Index n of the Fock state |n>."""

    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 0:
            raise ValueError(f"Fock index must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    def check(self, dim: int) -> FockLabel:
        if self.n >= dim:
            raise ValueError(f"Fock index {self.n} outside a basis of dimension {dim}")
        return self


def _index(label: FockLabel | int) -> int:
    return label.n if isinstance(label, FockLabel) else FockLabel(label).n


def _check_n_max(n_max: int) -> int:
    if isinstance(n_max, bool) or int(n_max) != n_max or n_max < 0:
        raise ValueError(f"n_max must be a non-negative integer, got {n_max!r}")
    if n_max > MAX_FOCK_INDEX:
        raise PrecisionLimitError(f"n_max={n_max} exceeds the supported Fock index {MAX_FOCK_INDEX}")
    return int(n_max)


@dataclass(frozen=True, eq=False)
class GroenewoldMatrix:
    """
    Truncated Fock-basis matrix <n|rho_hat|m>, n, m = 0..dim-1.

    ``aspect`` (beta/gamma) and ``hbar`` fix the Fock basis. Construction
    checks symmetry and that |trace - 1| <= trace_tolerance.
    """

    entries: np.ndarray
    s: float
    hbar: float
    aspect: float
    tail_bound: float
    is_diagonal: bool
    trace_tolerance: float

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.size == 0:
            raise ValueError(f"entries must be a non-empty square matrix, got shape {entries.shape}")
        asymmetry = float(np.max(np.abs(entries - entries.T)))
        if asymmetry > SYMMETRY_TOLERANCE:
            raise SymmetryViolationError(f"matrix is asymmetric by {asymmetry:.2e}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

        residual = abs(self.trace - 1.0)
        if residual > self.trace_tolerance:
            raise TruncationError(
                f"trace {self.trace:.12g} misses 1 by {residual:.3e} "
                f"(tolerance {self.trace_tolerance:.3e}, dim {self.dim})"
            )

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.entries).copy()

    def element(self, n: FockLabel | int, m: FockLabel | int) -> float:
        return float(self.entries[FockLabel(_index(n)).check(self.dim).n, FockLabel(_index(m)).check(self.dim).n])

    def same_basis(self, other: GroenewoldMatrix) -> bool:
        return (
            self.dim == other.dim
            and math.isclose(self.aspect, other.aspect, rel_tol=1e-12)
            and math.isclose(self.hbar, other.hbar, rel_tol=1e-12)
        )

    def to_dict(self) -> dict[str, Any]:
        """Export format: dim, s, hbar, row-major entries, trace, tail_bound."""
        return {
            "dim": self.dim,
            "s": float(self.s),
            "hbar": float(self.hbar),
            "entries": [float(value) for value in self.entries.ravel()],
            "trace": self.trace,
            "tail_bound": float(self.tail_bound),
        }


def phase_space_alpha(q, p, aspect: float, hbar: float) -> np.ndarray:
    """Complex amplitude alpha of the phase-space point (q, p) in the basis with aspect beta/gamma."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    root = math.sqrt(aspect)
    return (q / root + 1j * root * p) / math.sqrt(2.0 * hbar)


def _fock_parity(m: np.ndarray) -> np.ndarray:
    """(-1)^m."""
    return np.where(np.asarray(m) % 2 == 0, 1.0, -1.0)


def _kernel_band(k: int, count: int, alpha: np.ndarray) -> np.ndarray:
    """<m+k|Delta(alpha)|m> for m = 0..count-1; shape (count, alpha.size)."""
    alpha = np.asarray(alpha, dtype=complex).ravel()
    m = np.arange(count, dtype=float)
    x = np.abs(alpha) ** 2
    lag = laguerre_table(count - 1, k, 4.0 * x)

    log_norm = 0.5 * (gammaln(m + 1.0) - gammaln(m + k + 1.0))
    if k == 0:
        log_radial = -2.0 * x
        phase = np.ones_like(alpha)
    else:
        with np.errstate(divide="ignore"):
            log_radial = k * np.log(2.0 * np.abs(alpha)) - 2.0 * x
        phase = np.exp(1j * k * np.angle(alpha))

    envelope = np.exp(log_norm[:, None] + log_radial[None, :])
    return (2.0 * _fock_parity(m))[:, None] * lag * envelope * phase[None, :]


def displacement_matrix_element(n: FockLabel | int, m: FockLabel | int, alpha) -> complex | np.ndarray:
    """
    Matrix element <n|Delta(alpha)|m> of the Weyl-Wigner kernel.

    Factorials and (2 alpha)^(n-m) are combined in the log domain, so indices up
    to MAX_FOCK_INDEX are safe.
    """
    n, m = _index(n), _index(m)
    if max(n, m) > MAX_FOCK_INDEX:
        raise PrecisionLimitError(f"Fock index {max(n, m)} exceeds {MAX_FOCK_INDEX}")
    alpha_array = np.asarray(alpha, dtype=complex)
    if n >= m:
        values = _kernel_band(n - m, m + 1, alpha_array)[m]
    else:
        values = np.conj(_kernel_band(m - n, n + 1, alpha_array)[n])
    if alpha_array.ndim == 0:
        return complex(values[0])
    return values.reshape(alpha_array.shape)


def _tail_bound(density: Density, diagonal: np.ndarray) -> float:
    if isinstance(density, GaussianDensity):
        s = density.s
        ratio = abs(s - 1.0) / (s + 1.0)
        if ratio == 0.0:
            return 0.0
        return (2.0 / (s + 1.0)) * ratio ** diagonal.size / (1.0 - ratio)
    return float(np.sum(np.abs(diagonal[-2:])))


def _build_matrix(density: Density, entries: np.ndarray, trace_tolerance: float | None) -> GroenewoldMatrix:
    numerics = get_numerics()
    diagonal = np.diag(entries)
    tail = _tail_bound(density, diagonal)
    if trace_tolerance is None:
        factor = 1.0 if isinstance(density, GaussianDensity) else numerics.trace_tail_factor
        trace_tolerance = numerics.trace_tolerance + factor * tail
    off_diagonal = entries - np.diag(diagonal)
    is_diagonal = bool(np.max(np.abs(off_diagonal), initial=0.0) <= numerics.imaginary_tolerance)
    matrix = GroenewoldMatrix(
        entries=entries,
        s=density.s,
        hbar=density.hbar,
        aspect=density.beta / density.gamma,
        tail_bound=tail,
        is_diagonal=is_diagonal,
        trace_tolerance=trace_tolerance,
    )
    logger.info(f"Quantised {type(density).__name__} s={density.s:.6g} dim={matrix.dim} trace={matrix.trace:.12g}")
    return matrix


def _radial_diagonal(radial: RadialDensity, n_max: int, npoints: int) -> np.ndarray:
    s = radial.s
    if radial.is_compact:
        rule = finite_rule(npoints, 0.0, s * radial.support_radius ** 2)
        t = rule.nodes
        log_weights = np.log(rule.weights) - t
    else:
        # t = c tau makes e^{-t} g(t/s) exactly e^{-tau} times a constant for g(u) ~ e^{-a u}
        c = s / (s + radial.decay_rate)
        rule = semi_infinite_rule(npoints)
        t = c * rule.nodes
        log_weights = math.log(c) + np.log(rule.weights) + rule.nodes - t

    profile = radial.profile_values(t / s)
    if np.any(profile < 0) or not np.all(np.isfinite(profile)):
        raise ValueError("radial profile must be finite and non-negative")
    with np.errstate(divide="ignore"):
        weights = np.exp(log_weights + np.log(profile))

    integrals = laguerre_table(n_max, 0, 2.0 * t) @ weights
    signs = (-1.0) ** np.arange(n_max + 1)
    return 2.0 * math.pi * radial.hbar * signs * integrals


def radial_eigenvalues(density: Density, n_max: int) -> np.ndarray:
    """lambda_0..lambda_{n_max} of a radially symmetric density by refined quadrature."""
    n_max = _check_n_max(n_max)
    if isinstance(density, (GaussianDensity, UniformEllipseDensity)):
        radial = density.as_radial()
    elif isinstance(density, RadialDensity):
        radial = density
    else:
        raise ValueError(f"{type(density).__name__} is not radially symmetric; use quantize_general")

    start = max(CHART_START_POINTS, n_max + 1)
    if radial.is_compact:
        start += math.ceil(radial.s * radial.support_radius ** 2)
    return refine(
        lambda npoints: _radial_diagonal(radial, n_max, npoints),
        start,
        label=f"radial eigenvalues (s={radial.s:.6g})",
    )


def quantize_radial(density: Density, n_max: int, *, trace_tolerance: float | None = None) -> GroenewoldMatrix:
    """
    Diagonal Groenewold matrix of a radially symmetric density.

    Raises:
        QuadratureConvergenceError: if refinement does not settle.
        TruncationError: if the trace misses 1 by more than the tolerance.
    """
    eigenvalues = np.atleast_1d(radial_eigenvalues(density, n_max))
    return _build_matrix(density, np.diag(eigenvalues), trace_tolerance)


def _general_entries(density: Density, n_max: int, grid, jobs: int) -> np.ndarray:
    q, p, weights = grid
    weighted = weights * density.evaluate(q, p)
    support = weighted != 0.0
    alpha = phase_space_alpha(q[support], p[support], density.beta / density.gamma, density.hbar)
    weighted = weighted[support]
    dim = n_max + 1

    def band(k: int) -> np.ndarray:
        total = np.zeros(dim - k, dtype=complex)
        for start in range(0, alpha.size, NODE_CHUNK):
            block = slice(start, start + NODE_CHUNK)
            total += _kernel_band(k, dim - k, alpha[block]) @ weighted[block]
        return total

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            bands = list(executor.map(band, range(dim)))
    else:
        bands = [band(k) for k in range(dim)]

    entries = np.zeros((dim, dim), dtype=complex)
    for k, values in enumerate(bands):
        m = np.arange(dim - k)
        entries[m + k, m] = values
        entries[m, m + k] = np.conj(values)
    return entries


def quantize_general(
    density: Density,
    n_max: int,
    rule: tuple[QuadratureRule, QuadratureRule] | None = None,
    *,
    trace_tolerance: float | None = None,
    jobs: int = 1,
) -> GroenewoldMatrix:
    """
    Full Groenewold matrix by quadrature over the density's chart.

    Args:
        density: any density; its ``chart()`` must cover the support.
        n_max: highest Fock index kept.
        rule: optional pair of one-dimensional rules (q and p for a cartesian
            chart, radius and angle for an elliptic one). When omitted the
            chart is refined until two resolutions agree.
        trace_tolerance: overrides the truncation-aware default.
        jobs: threads used for the bands n - m = const.

    Raises:
        SymmetryViolationError: if the imaginary residue exceeds the tolerance.
        TruncationError: if the trace misses 1 by more than the tolerance.
    """
    n_max = _check_n_max(n_max)
    jobs = max(1, int(jobs))
    chart = density.chart()

    if rule is not None:
        raw = _general_entries(density, n_max, chart.grid_from_rules(*rule), jobs)
    else:
        raw = refine(
            lambda npoints: _general_entries(density, n_max, chart.grid(npoints), jobs),
            max(CHART_START_POINTS, 2 * (n_max + 1)),
            max_points=GENERAL_MAX_POINTS,
            label=f"general quantisation (dim {n_max + 1})",
        )

    residue = float(np.max(np.abs(raw.imag)))
    if residue > get_numerics().imaginary_tolerance:
        raise SymmetryViolationError(
            f"imaginary residue {residue:.2e} exceeds tolerance; the density lacks reflection symmetry"
        )
    entries = raw.real
    entries = 0.5 * (entries + entries.T)
    return _build_matrix(density, entries, trace_tolerance)


def trace_product(m1: GroenewoldMatrix, m2: GroenewoldMatrix) -> float:
    """Tr(m1 m2); non-negative for quantised densities."""
    if not m1.same_basis(m2):
        raise BasisMismatchError(
            f"cannot pair matrices on different bases "
            f"(dim {m1.dim}/{m2.dim}, aspect {m1.aspect:.6g}/{m2.aspect:.6g}, hbar {m1.hbar:.6g}/{m2.hbar:.6g})"
        )
    value = float(np.sum(m1.entries * m2.entries))
    if value < -PAIR_TRACE_TOLERANCE:
        logger.warning(f"Pair trace {value:.3e} is negative beyond tolerance")
    return value


def expectation(matrix: GroenewoldMatrix, observable: np.ndarray) -> float:
    """Tr(rho_hat A) for a real symmetric observable in the same basis."""
    observable = np.asarray(observable, dtype=float)
    if observable.shape != matrix.entries.shape:
        raise BasisMismatchError(f"observable shape {observable.shape} does not match dim {matrix.dim}")
    if np.max(np.abs(observable - observable.T)) > SYMMETRY_TOLERANCE * max(1.0, np.max(np.abs(observable))):
        raise ValueError("observable must be symmetric")
    return float(np.sum(matrix.entries * observable))


def identity_operator(dim: int) -> np.ndarray:
    return np.eye(dim)


def number_operator(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float))


def _quadrature_operator(dim: int, prefactor: float, sign: float) -> np.ndarray:
    n = np.arange(dim, dtype=float)
    matrix = np.diag(prefactor * (2.0 * n + 1.0))
    m = np.arange(max(dim - 2, 0))
    off = sign * prefactor * np.sqrt((m + 1.0) * (m + 2.0))
    matrix[m + 2, m] = off
    matrix[m, m + 2] = off
    return matrix


def position_squared(dim: int, aspect: float = 1.0, hbar: float = 1.0) -> np.ndarray:
    """Exact <n|q^2|m> with q = sqrt(hbar beta / 2 gamma)(a + a^dagger)."""
    return _quadrature_operator(dim, 0.5 * hbar * aspect, 1.0)


def momentum_squared(dim: int, aspect: float = 1.0, hbar: float = 1.0) -> np.ndarray:
    """Exact <n|p^2|m> with p = -i sqrt(hbar gamma / 2 beta)(a - a^dagger)."""
    return _quadrature_operator(dim, 0.5 * hbar / aspect, -1.0)


def weyl_symbol(matrix: GroenewoldMatrix, q, p) -> float | np.ndarray:
    """
    Truncated forward transform (2 pi hbar)^-1 sum_{n,m} rho_mn <n|Delta(q, p)|m>.

    The reconstruction improves as the truncation grows.
    """
    q_array = np.asarray(q, dtype=float)
    p_array = np.asarray(p, dtype=float)
    shape = np.broadcast(q_array, p_array).shape
    alpha = phase_space_alpha(
        np.broadcast_to(q_array, shape).ravel(),
        np.broadcast_to(p_array, shape).ravel(),
        matrix.aspect,
        matrix.hbar,
    )
    dim = matrix.dim
    total = np.zeros(alpha.size)
    for k in range(dim):
        band = np.diagonal(matrix.entries, offset=-k)
        if not np.any(band):
            continue
        contribution = band @ _kernel_band(k, dim - k, alpha).real
        total += contribution if k == 0 else 2.0 * contribution
    total /= 2.0 * math.pi * matrix.hbar
    return float(total[0]) if not shape else total.reshape(shape)
