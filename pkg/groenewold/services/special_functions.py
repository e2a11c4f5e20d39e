"""
Special functions and quadrature rules shared by every other service.

Laguerre and Hermite polynomials are evaluated with their upward three-term
recurrences; oscillator eigenfunctions with a normalised recurrence on the
eigenfunctions themselves. Gauss rules come from the eigen-decomposition of
the Jacobi matrix of the orthogonal family (Golub-Welsch).

Usage:
    from groenewold.services.special_functions import laguerre, finite_rule

    laguerre(2, 0, 2.0)                        # -1.0
    rule = finite_rule(20, 0.0, 5.0)
    rule.integrate(np.exp(-rule.nodes))       # 1 - e^-5
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal

import numpy as np
from scipy.linalg import eigh_tridiagonal

from groenewold.conf import get_numerics
from groenewold.exceptions import (
    NumericalError,
    PrecisionLimitError,
    QuadratureConvergenceError,
)

logger = logging.getLogger(__name__)

# Upward recurrences stay accurate well past these degrees for the arguments
# used here; beyond them results are refused rather than silently degraded.
MAX_LAGUERRE_DEGREE = 1000
MAX_HERMITE_DEGREE = 200

NODE_SYMMETRY_TOLERANCE = 1e-13

RuleDomain = Literal["finite", "semi_infinite", "periodic"]


def _check_degree(n: int, ceiling: int, family: str) -> int:
    if int(n) != n:
        raise ValueError(f"{family} degree must be an integer, got {n!r}")
    n = int(n)
    if n < 0:
        raise ValueError(f"{family} degree must be non-negative, got {n}")
    if n > ceiling:
        raise PrecisionLimitError(
            f"{family} degree {n} exceeds the supported ceiling {ceiling}"
        )
    return n


def _check_order(n: int, k: float) -> float:
    # degree 0 is the constant 1 for every order
    if n > 0 and not k >= -n:
        raise ValueError(f"Laguerre order k must be >= -n, got k={k!r} for n={n}")
    return k


def _as_result(value: np.ndarray) -> float | np.ndarray:
    return float(value) if np.ndim(value) == 0 else value


def laguerre(n: int, k: float, x: float | np.ndarray) -> float | np.ndarray:
    """
    Associated Laguerre polynomial L_n^k(x).

    Uses (j+1) L_{j+1} = (2j+1+k-x) L_j - (j+k) L_{j-1}. Vectorised over x.
    Requires k >= -n for n > 0.
    """
    n = _check_degree(n, MAX_LAGUERRE_DEGREE, "Laguerre")
    k = _check_order(n, k)
    x = np.asarray(x, dtype=float)
    previous = np.ones_like(x)
    if n == 0:
        return _as_result(previous)
    current = 1.0 + k - x
    for j in range(1, n):
        previous, current = current, ((2 * j + 1 + k - x) * current - (j + k) * previous) / (j + 1)
    return _as_result(current)


def laguerre_table(n_max: int, k: float, x: float | np.ndarray) -> np.ndarray:
    """Rows L_0^k(x), ..., L_{n_max}^k(x); shape (n_max + 1, *x.shape)."""
    n_max = _check_degree(n_max, MAX_LAGUERRE_DEGREE, "Laguerre")
    k = _check_order(n_max, k)
    x = np.asarray(x, dtype=float)
    table = np.empty((n_max + 1,) + x.shape)
    table[0] = 1.0
    if n_max >= 1:
        table[1] = 1.0 + k - x
    for j in range(1, n_max):
        table[j + 1] = ((2 * j + 1 + k - x) * table[j] - (j + k) * table[j - 1]) / (j + 1)
    return table


def hermite(n: int, x: float | np.ndarray) -> float | np.ndarray:
    """Physicists' Hermite polynomial, H_{j+1} = 2x H_j - 2j H_{j-1}."""
    n = _check_degree(n, MAX_HERMITE_DEGREE, "Hermite")
    x = np.asarray(x, dtype=float)
    previous = np.ones_like(x)
    if n == 0:
        return _as_result(previous)
    current = 2.0 * x
    for j in range(1, n):
        previous, current = current, 2.0 * x * current - 2.0 * j * previous
    return _as_result(current)


def oscillator_table(n_max: int, x: float | np.ndarray, lengthscale: float) -> np.ndarray:
    """
    Normalised oscillator eigenfunctions phi_0..phi_{n_max} sampled at x.

    phi_{j+1} = sqrt(2/(j+1)) xi phi_j - sqrt(j/(j+1)) phi_{j-1} with xi = x/l,
    so no factorial or unnormalised H_n is ever formed.
    """
    if not lengthscale > 0:
        raise ValueError(f"lengthscale must be positive, got {lengthscale}")
    if int(n_max) != n_max or n_max < 0:
        raise ValueError(f"eigenfunction index must be a non-negative integer, got {n_max!r}")
    n_max = int(n_max)
    xi = np.asarray(x, dtype=float) / lengthscale
    table = np.empty((n_max + 1,) + xi.shape)
    table[0] = math.pi ** -0.25 / math.sqrt(lengthscale) * np.exp(-0.5 * xi * xi)
    if n_max >= 1:
        table[1] = math.sqrt(2.0) * xi * table[0]
    for j in range(1, n_max):
        table[j + 1] = (
            math.sqrt(2.0 / (j + 1)) * xi * table[j]
            - math.sqrt(j / (j + 1)) * table[j - 1]
        )
    return table


def oscillator_eigenfunction(n: int, x: float | np.ndarray, lengthscale: float) -> float | np.ndarray:
    """L2-normalised phi_n(x) = (sqrt(pi) 2^n n! l)^(-1/2) H_n(x/l) exp(-x^2 / 2l^2)."""
    return _as_result(oscillator_table(n, x, lengthscale)[-1])


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """
    Immutable nodes and weights for one integration domain.

    ``finite`` and ``periodic`` rules approximate the plain integral over
    [lower, upper]. A ``semi_infinite`` rule approximates
    integral_0^inf e^{-t} f(t) dt; use ``plain_weights`` to integrate f itself.
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: RuleDomain
    lower: float
    upper: float

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.size == 0 or nodes.shape != weights.shape:
            raise ValueError("nodes and weights must be non-empty 1-d arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("quadrature nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise ValueError("quadrature weights must be positive")
        if self.domain not in ("finite", "semi_infinite", "periodic"):
            raise ValueError(f"unknown quadrature domain {self.domain!r}")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.size

    @property
    def plain_weights(self) -> np.ndarray:
        if self.domain != "semi_infinite":
            return self.weights
        return np.exp(np.log(self.weights) + self.nodes)

    def integrate(self, values: np.ndarray | Callable[[np.ndarray], np.ndarray]) -> float | np.ndarray:
        """Contract ``values`` (leading axis over nodes, or a callable) with the weights."""
        if callable(values):
            values = values(self.nodes)
        return _as_result(np.tensordot(self.weights, np.asarray(values), axes=(0, 0)))


# Rescale the Laguerre recurrence whenever it grows past this
_RESCALE_THRESHOLD = 1e100
NEWTON_POLISH_STEPS = 2


def _scaled_laguerre_pair(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(L_{n-1}(x), L_n(x)) divided by exp(log_scale), for n >= 1; safe where L_n overflows."""
    previous = np.ones_like(x)
    current = 1.0 - x
    log_scale = np.zeros_like(x)
    for j in range(1, n):
        previous, current = current, ((2 * j + 1 - x) * current - j * previous) / (j + 1)
        size = np.maximum(np.abs(previous), np.abs(current))
        factor = np.where(size > _RESCALE_THRESHOLD, size, 1.0)
        previous = previous / factor
        current = current / factor
        log_scale += np.log(factor)
    return previous, current, log_scale


def _laguerre_nodes_and_weights(nodes: np.ndarray, npoints: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Newton-polished Gauss-Laguerre nodes and weights from w = x / ((N+1)^2 L_{N+1}(x)^2).

    Eigenvector weights are only accurate in absolute terms, which is not enough
    where tiny weights meet large polynomial values.
    """
    x = np.array(nodes, dtype=float)
    for _ in range(NEWTON_POLISH_STEPS):
        below, at, _ = _scaled_laguerre_pair(npoints, x)
        # L_N' = N (L_N - L_{N-1}) / x
        x = x - x * at / (npoints * (at - below))
    _, above, log_scale = _scaled_laguerre_pair(npoints + 1, x)
    log_weights = np.log(x) - 2.0 * math.log(npoints + 1) - 2.0 * (np.log(np.abs(above)) + log_scale)
    return x, np.exp(log_weights)


@lru_cache(maxsize=64)
def _golub_welsch(family: str, npoints: int) -> tuple[np.ndarray, np.ndarray]:
    if npoints == 1:
        node = 0.0 if family == "legendre" else 1.0
        return np.array([node]), np.array([2.0 if family == "legendre" else 1.0])

    k = np.arange(1, npoints, dtype=float)
    if family == "legendre":
        diagonal = np.zeros(npoints)
        off_diagonal = k / np.sqrt(4.0 * k * k - 1.0)
    else:
        diagonal = 2.0 * np.arange(npoints) + 1.0
        off_diagonal = k

    nodes, vectors = eigh_tridiagonal(diagonal, off_diagonal)
    if family == "legendre":
        weights = 2.0 * vectors[0] ** 2
    else:
        nodes, weights = _laguerre_nodes_and_weights(nodes, npoints)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def finite_rule(npoints: int, a: float, b: float) -> QuadratureRule:
    """Gauss-Legendre rule with ``npoints`` nodes mapped to [a, b]."""
    if int(npoints) != npoints or npoints < 1:
        raise ValueError(f"npoints must be a positive integer, got {npoints!r}")
    if not a < b:
        raise ValueError(f"degenerate interval [{a}, {b}]")

    nodes, weights = _golub_welsch("legendre", int(npoints))
    asymmetry = float(np.max(np.abs(nodes + nodes[::-1])))
    if asymmetry > NODE_SYMMETRY_TOLERANCE:
        raise NumericalError(
            f"Gauss-Legendre nodes for n={npoints} are asymmetric by {asymmetry:.2e}"
        )
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])

    half = 0.5 * (b - a)
    return QuadratureRule(
        nodes=half * nodes + 0.5 * (a + b),
        weights=half * weights,
        domain="finite",
        lower=float(a),
        upper=float(b),
    )


def semi_infinite_rule(npoints: int) -> QuadratureRule:
    """
    Gauss-Laguerre rule for integral_0^inf e^{-t} p(t) dt.

    Nodes whose weight underflows to zero in double precision are dropped;
    they carry less than e^{-700} of the integral.
    """
    if int(npoints) != npoints or npoints < 1:
        raise ValueError(f"npoints must be a positive integer, got {npoints!r}")
    nodes, weights = _golub_welsch("laguerre", int(npoints))
    keep = weights > 0
    if not np.all(keep):
        logger.debug(f"Dropping {int(np.count_nonzero(~keep))} underflowed Laguerre nodes of {npoints}")
    return QuadratureRule(
        nodes=nodes[keep],
        weights=weights[keep],
        domain="semi_infinite",
        lower=0.0,
        upper=math.inf,
    )


def periodic_rule(npoints: int, a: float = 0.0, b: float = 2.0 * math.pi) -> QuadratureRule:
    """Trapezoid rule on one period [a, b); exact for trigonometric degree < npoints."""
    if int(npoints) != npoints or npoints < 1:
        raise ValueError(f"npoints must be a positive integer, got {npoints!r}")
    if not a < b:
        raise ValueError(f"degenerate period [{a}, {b}]")
    step = (b - a) / npoints
    return QuadratureRule(
        nodes=a + step * np.arange(npoints),
        weights=np.full(int(npoints), step),
        domain="periodic",
        lower=float(a),
        upper=float(b),
    )


def refine(
    evaluate: Callable[[int], float | np.ndarray],
    start: int,
    *,
    max_points: int | None = None,
    rtol: float | None = None,
    atol: float | None = None,
    label: str = "integral",
) -> float | np.ndarray:
    """
    Evaluate at n and 2n points, doubling until the two estimates agree.

    ``evaluate(npoints)`` returns a scalar or array estimate. Agreement means
    max |fine - coarse| <= max(atol, rtol * max |fine|).

    Raises:
        QuadratureConvergenceError: if the point cap is reached first.
    """
    numerics = get_numerics()
    max_points = max_points or numerics.quadrature_max_points
    rtol = numerics.quadrature_rtol if rtol is None else rtol
    atol = numerics.quadrature_atol if atol is None else atol

    npoints = int(start)
    coarse = np.asarray(evaluate(npoints))
    change = math.inf
    while 2 * npoints <= max_points:
        fine = np.asarray(evaluate(2 * npoints))
        if not np.all(np.isfinite(fine)):
            raise QuadratureConvergenceError(f"{label} is not finite at {2 * npoints} points")
        change = float(np.max(np.abs(fine - coarse))) if fine.size else 0.0
        scale = float(np.max(np.abs(fine))) if fine.size else 0.0
        if change <= max(atol, rtol * scale):
            logger.debug(f"{label} converged at {2 * npoints} points (change {change:.2e})")
            return _as_result(fine)
        logger.debug(f"{label}: change {change:.2e} at {2 * npoints} points, refining")
        npoints, coarse = 2 * npoints, fine

    raise QuadratureConvergenceError(
        f"{label} did not converge within {max_points} points (last change {change:.2e})"
    )
