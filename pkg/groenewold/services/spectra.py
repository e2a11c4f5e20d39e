"""
Eigenvalue spectra of quantised Gaussian and uniform-ellipse densities.

Both families depend only on s = beta*gamma/hbar:

    gaussian   lambda_n = (2/(s+1)) ((s-1)/(s+1))^n
    uniform    lambda_n = (2 (-1)^n / s) int_0^s e^{-t} L_n(2t) dt

The uniform integral is evaluated by refined Gauss-Legendre quadrature; a
closed form through L_k^(-1)(2s) serves as an independent cross-check for
moderate s. General matrices go through a cyclic Jacobi eigensolver.

Usage:
    from groenewold.services.spectra import gaussian_eigenvalue, spectral_bounds, sweep

    gaussian_eigenvalue(1, 1 / 3)           # -0.75
    spectral_bounds("uniform", 4.0)        # (negative, (1 - e^-4) / 2)
    sweep("gaussian", [0.5, 1.0, 2.0]).rows
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from groenewold.conf import get_numerics
from groenewold.exceptions import (
    EigensolverError,
    InsufficientTruncationError,
    NumericalError,
    PrecisionLimitError,
)
from groenewold.services.quantizer import GroenewoldMatrix
from groenewold.services.special_functions import (
    MAX_LAGUERRE_DEGREE,
    finite_rule,
    laguerre_table,
    refine,
)

logger = logging.getLogger(__name__)

Family = Literal["gaussian", "uniform"]
Method = Literal["closed_form", "quadrature", "eigensolve"]

FAMILIES: tuple[str, ...] = ("gaussian", "uniform")

# Delta q Delta p / hbar per unit of s
UNCERTAINTY_PER_S = {
    "gaussian": 0.5,
    "uniform": 0.25,
}

EIGENVALUE_SLACK = 1e-8
GAUSSIAN_TAIL_TARGET = 1e-12
MAX_AUTO_TRUNCATION = 10 ** 6
# e^{s} cancellation in the L^(-1) closed form limits it to moderate s
SERIES_MAX_S = 12.0
UNIFORM_START_POINTS = 32


def _check_s(s: float) -> float:
    s = float(s)
    if not (math.isfinite(s) and s > 0):
        raise ValueError(f"s must be a positive finite number, got {s!r}")
    return s


def _check_index(n: int, name: str = "n") -> int:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {n!r}")
    return int(n)


def _check_family(family: str) -> str:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    return family


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """
    Eigenvalues sorted descending, with the Fock (or diagonal) index each came from.

    Ties are ordered by descending index.
    """

    eigenvalues: np.ndarray
    indices: np.ndarray
    s: float
    trace_residual: float
    method: Method

    def __post_init__(self):
        values = np.array(self.eigenvalues, dtype=float)
        indices = np.array(self.indices, dtype=int)
        if values.ndim != 1 or values.size == 0 or values.shape != indices.shape:
            raise ValueError("eigenvalues and indices must be non-empty 1-d arrays of equal length")
        if np.any(np.diff(values) > 0):
            raise ValueError("eigenvalues must be sorted in descending order")
        if np.any(np.abs(values) > 2.0 + EIGENVALUE_SLACK):
            raise NumericalError(
                f"eigenvalue outside [-2, 2]: min {values[-1]:.12g}, max {values[0]:.12g}"
            )
        values.setflags(write=False)
        indices.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)
        object.__setattr__(self, "indices", indices)

    @classmethod
    def from_values(cls, values, s: float, method: Method, trace_residual: float | None = None) -> SpectrumResult:
        values = np.asarray(values, dtype=float)
        indices = np.arange(values.size)
        order = np.lexsort((-indices, -values))
        if trace_residual is None:
            trace_residual = abs(float(np.sum(values)) - 1.0)
        return cls(
            eigenvalues=values[order],
            indices=indices[order],
            s=s,
            trace_residual=trace_residual,
            method=method,
        )

    @property
    def min_bound(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def max_bound(self) -> float:
        return float(self.eigenvalues[0])

    def by_index(self) -> np.ndarray:
        """Eigenvalues back in index order."""
        values = np.empty_like(self.eigenvalues)
        values[self.indices] = self.eigenvalues
        return values


@dataclass(frozen=True)
class SweepRow:
    uncertainty_over_hbar: float
    min_bound: float
    max_bound: float
    family: str
    s: float


@dataclass(frozen=True)
class SweepResult:
    """Spectral bounds against Delta q Delta p / hbar, one row per s."""

    rows: tuple[SweepRow, ...]

    def __post_init__(self):
        last: dict[str, float] = {}
        for row in self.rows:
            previous = last.get(row.family)
            if previous is not None and not row.uncertainty_over_hbar > previous:
                raise ValueError(f"uncertainty axis not strictly increasing for family {row.family!r}")
            last[row.family] = row.uncertainty_over_hbar

    @classmethod
    def combine(cls, *results: SweepResult) -> SweepResult:
        return cls(rows=tuple(row for result in results for row in result.rows))

    def families(self) -> list[str]:
        return list(dict.fromkeys(row.family for row in self.rows))


@dataclass(frozen=True)
class MixedStateWeights:
    """Positive Gaussian eigenvalues read as probabilities of Fock states (s > 1)."""

    weights: np.ndarray
    partial_sum: float
    tail: float

    @property
    def total(self) -> float:
        return self.partial_sum + self.tail


def gaussian_eigenvalue(n: int, s: float) -> float:
    """(2/(s+1)) ((s-1)/(s+1))^n."""
    n = _check_index(n)
    s = _check_s(s)
    return 2.0 / (s + 1.0) * ((s - 1.0) / (s + 1.0)) ** n


def gaussian_eigenvalues(s: float, n_max: int) -> np.ndarray:
    s = _check_s(s)
    n_max = _check_index(n_max, "n_max")
    return 2.0 / (s + 1.0) * ((s - 1.0) / (s + 1.0)) ** np.arange(n_max + 1)


def gaussian_tail(s: float, n_max: int) -> float:
    """Signed sum of the Gaussian eigenvalues with n > n_max (geometric closure)."""
    s = _check_s(s)
    ratio = (s - 1.0) / (s + 1.0)
    return 2.0 / (s + 1.0) * ratio ** (n_max + 1) / (1.0 - ratio)


def gaussian_spectrum(s: float, n_max: int) -> SpectrumResult:
    values = gaussian_eigenvalues(s, n_max)
    residual = abs(float(np.sum(values)) + gaussian_tail(s, n_max) - 1.0)
    return SpectrumResult.from_values(values, s, "closed_form", residual)


def _uniform_estimate(s: float, n_max: int, npoints: int) -> np.ndarray:
    rule = finite_rule(npoints, 0.0, s)
    integrals = laguerre_table(n_max, 0, 2.0 * rule.nodes) @ (rule.weights * np.exp(-rule.nodes))
    return 2.0 / s * (-1.0) ** np.arange(n_max + 1) * integrals


def uniform_eigenvalues(s: float, n_max: int) -> np.ndarray:
    """lambda_0..lambda_{n_max} of the uniform ellipse by refined quadrature on [0, s]."""
    s = _check_s(s)
    n_max = _check_index(n_max, "n_max")
    values = refine(
        lambda npoints: _uniform_estimate(s, n_max, npoints),
        max(UNIFORM_START_POINTS, n_max + 1 + math.ceil(s)),
        label=f"uniform eigenvalues (s={s:.6g})",
    )
    return np.atleast_1d(values)


def uniform_eigenvalue(n: int, s: float) -> float:
    """(2 (-1)^n / s) int_0^s e^{-t} L_n(2t) dt."""
    n = _check_index(n)
    return float(uniform_eigenvalues(s, n)[n])


def uniform_eigenvalues_series(s: float, n_max: int) -> np.ndarray:
    """
    Closed form (2/s) [1 - e^{-s} sum_{k<=n} (-1)^k L_k^(-1)(2s)].

    Raises:
        PrecisionLimitError: for s > SERIES_MAX_S, where cancellation dominates.
    """
    s = _check_s(s)
    n_max = _check_index(n_max, "n_max")
    if s > SERIES_MAX_S:
        raise PrecisionLimitError(f"closed-form uniform series is unreliable for s={s:.6g} > {SERIES_MAX_S}")
    terms = (-1.0) ** np.arange(n_max + 1) * laguerre_table(n_max, -1, 2.0 * s)
    return 2.0 / s * (1.0 - math.exp(-s) * np.cumsum(terms))


def uniform_spectrum(s: float, n_max: int) -> SpectrumResult:
    return SpectrumResult.from_values(uniform_eigenvalues(s, n_max), s, "quadrature")


def averaged_partial_trace(values) -> float:
    """Mean of the partial traces over the upper half of the index range."""
    partial = np.cumsum(np.asarray(values, dtype=float))
    return float(np.mean(partial[partial.size // 2:]))


def _cyclic_jacobi(matrix: np.ndarray, tolerance: float, max_sweeps: int) -> np.ndarray:
    a = np.array(matrix, dtype=float)
    size = a.shape[0]
    norm = float(np.linalg.norm(a))
    if size < 2 or norm == 0.0:
        return np.diag(a).copy()

    upper = np.triu_indices(size, 1)
    # entries below this are already at roundoff level
    negligible = tolerance * norm / size

    for sweep_index in range(max_sweeps):
        off_norm = math.sqrt(2.0) * float(np.linalg.norm(a[upper]))
        if off_norm <= tolerance * norm:
            logger.debug(f"Jacobi converged after {sweep_index} sweeps (dim {size})")
            return np.diag(a).copy()
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = a[p, q]
                if abs(apq) <= negligible:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - sn * col_q
                a[:, q] = sn * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - sn * row_q
                a[q, :] = sn * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

    raise EigensolverError(f"Jacobi sweeps did not converge in {max_sweeps} sweeps (dim {size})")


def eigendecompose(matrix: GroenewoldMatrix | np.ndarray) -> SpectrumResult:
    """
    All eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Raises:
        ValueError: for non-square or non-symmetric input.
        EigensolverError: if the sweep limit is reached.
    """
    if isinstance(matrix, GroenewoldMatrix):
        entries, s = matrix.entries, matrix.s
    else:
        entries, s = np.asarray(matrix, dtype=float), math.nan
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {entries.shape}")
    if np.max(np.abs(entries - entries.T), initial=0.0) > 1e-12 * max(1.0, float(np.max(np.abs(entries), initial=0.0))):
        raise ValueError("eigendecompose needs a symmetric matrix")

    numerics = get_numerics()
    values = _cyclic_jacobi(entries, numerics.jacobi_tolerance, numerics.jacobi_max_sweeps)
    return SpectrumResult.from_values(values, s, "eigensolve")


def required_n_max(family: Family, s: float) -> int:
    """Truncation that makes ``spectral_bounds`` trustworthy without a caller-supplied n_max."""
    family = _check_family(family)
    s = _check_s(s)
    if family == "gaussian":
        ratio = abs(s - 1.0) / (s + 1.0)
        if ratio == 0.0:
            return 1
        n_max = max(1, math.ceil(math.log(GAUSSIAN_TAIL_TARGET) / math.log(ratio)))
        if n_max > MAX_AUTO_TRUNCATION:
            raise InsufficientTruncationError(f"s={s:.6g} needs more than {MAX_AUTO_TRUNCATION} Fock states")
        return n_max
    n_max = math.ceil(4.0 * s + 4.0 / s) + 64
    if n_max > MAX_LAGUERRE_DEGREE:
        raise PrecisionLimitError(f"uniform bounds at s={s:.6g} need n_max={n_max} > {MAX_LAGUERRE_DEGREE}")
    return n_max


def spectral_bounds(family: Family, s: float, n_max: int | None = None) -> tuple[float, float]:
    """
    (inf, sup) of the eigenvalue sequence, including its accumulation point 0.

    Raises:
        InsufficientTruncationError: if n_max is too small for the bound to be reliable.
    """
    family = _check_family(family)
    s = _check_s(s)
    n_max = required_n_max(family, s) if n_max is None else _check_index(n_max, "n_max")

    if family == "gaussian":
        ratio = abs(s - 1.0) / (s + 1.0)
        if ratio ** (n_max + 1) >= GAUSSIAN_TAIL_TARGET:
            raise InsufficientTruncationError(
                f"gaussian tail ratio {ratio:.6g}^{n_max + 1} is not below {GAUSSIAN_TAIL_TARGET}"
            )
        values = gaussian_eigenvalues(s, n_max)
    else:
        values = uniform_eigenvalues(s, n_max)
        lowest, highest = int(np.argmin(values)), int(np.argmax(values))
        trailing = float(np.max(np.abs(values[(3 * (n_max + 1)) // 4:])))
        extreme = min(abs(float(values[lowest])), abs(float(values[highest])))
        if max(lowest, highest) > n_max // 2 or trailing > 0.5 * extreme:
            raise InsufficientTruncationError(
                f"uniform spectrum at s={s:.6g} is not resolved by n_max={n_max} "
                f"(extremes at {lowest}, {highest}; trailing magnitude {trailing:.3e})"
            )

    return min(float(np.min(values)), 0.0), max(float(np.max(values)), 0.0)


def uncertainty_over_hbar(family: Family, s: float) -> float:
    return UNCERTAINTY_PER_S[_check_family(family)] * _check_s(s)


def sweep(family: Family, s_values: Iterable[float], n_max: int | None = None, jobs: int = 1) -> SweepResult:
    """
    Spectral bounds for each s, in input order.

    Rows are independent; with jobs > 1 they are computed in a thread pool and
    still returned in the order of ``s_values``.
    """
    family = _check_family(family)
    s_values = [_check_s(s) for s in s_values]
    if any(b <= a for a, b in zip(s_values, s_values[1:])):
        raise ValueError("s_values must be strictly increasing")

    def row(s: float) -> SweepRow:
        lower, upper = spectral_bounds(family, s, n_max)
        return SweepRow(
            uncertainty_over_hbar=uncertainty_over_hbar(family, s),
            min_bound=lower,
            max_bound=upper,
            family=family,
            s=s,
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            rows = list(executor.map(row, s_values))
    else:
        rows = [row(s) for s in s_values]

    logger.info(f"Swept {len(rows)} {family} spectra")
    return SweepResult(rows=tuple(rows))


def mixed_state_weights(s: float, n_max: int) -> MixedStateWeights:
    """
    Gaussian eigenvalues as Fock-state probabilities for s > 1.

    Raises:
        ValueError: for s <= 1, where some eigenvalues are negative or zero.
    """
    s = _check_s(s)
    if s <= 1.0:
        raise ValueError(f"mixed-state weights need s > 1, got s={s:.6g}")
    weights = gaussian_eigenvalues(s, n_max)
    weights.setflags(write=False)
    return MixedStateWeights(
        weights=weights,
        partial_sum=float(np.sum(weights)),
        tail=gaussian_tail(s, n_max),
    )
