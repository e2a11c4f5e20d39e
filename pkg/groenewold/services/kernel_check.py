"""
Coordinate-space check of the Gaussian spectrum.

The Groenewold operator of a Gaussian density acts on wavefunctions as an
integral operator with kernel

    rho_K(x, y) = exp(-(x+y)^2 / 4 beta^2) exp(-gamma^2 (x-y)^2 / 4 hbar^2) / (beta sqrt(pi))

whose eigenfunctions are oscillator states of length l = sqrt(beta hbar / gamma).
Applying the kernel to phi_n on a grid and comparing with lambda_n phi_n checks
the closed-form spectrum through an independent route.

Usage:
    from groenewold.services.kernel_check import hermite_identity_residual

    hermite_identity_residual(2, 3.0)     # ~1e-13
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from groenewold.conf import get_numerics
from groenewold.exceptions import NumericalError
from groenewold.services.densities import GaussianDensity
from groenewold.services.special_functions import finite_rule, oscillator_table, refine
from groenewold.services.spectra import gaussian_eigenvalue

logger = logging.getLogger(__name__)

NORMALIZATION_GATE = 1e-8
MAX_GRID_DOUBLINGS = 3
# |phi_n| at the grid edge, relative to its peak, above which the grid is widened
EDGE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class KernelGrid:
    """Equispaced samples on [-half_width, half_width], integrated by the trapezoid rule."""

    half_width: float
    count: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if int(self.count) != self.count or self.count < 3:
            raise ValueError(f"a kernel grid needs at least 3 points, got {self.count!r}")

    @classmethod
    def default_for(cls, beta: float, gamma: float, hbar: float) -> KernelGrid:
        numerics = get_numerics()
        length = math.sqrt(beta * hbar / gamma)
        return cls(numerics.kernel_grid_widths * max(length, beta), numerics.kernel_grid_points)

    @cached_property
    def points(self) -> np.ndarray:
        points = np.linspace(-self.half_width, self.half_width, self.count)
        points = 0.5 * (points - points[::-1])
        points.setflags(write=False)
        return points

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.count - 1)

    @cached_property
    def weights(self) -> np.ndarray:
        weights = np.full(self.count, self.spacing)
        weights[[0, -1]] *= 0.5
        weights.setflags(write=False)
        return weights

    def widened(self) -> KernelGrid:
        """Twice the span at the same spacing."""
        return KernelGrid(2.0 * self.half_width, 2 * self.count - 1)

    def refined(self) -> KernelGrid:
        """Same span at half the spacing."""
        return KernelGrid(self.half_width, 2 * self.count - 1)


def coordinate_kernel(x, y, beta: float, gamma: float, hbar: float):
    """rho_K(x, y) of the Gaussian density with scales beta, gamma."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    value = np.exp(-((x + y) ** 2) / (4.0 * beta ** 2) - gamma ** 2 * (x - y) ** 2 / (4.0 * hbar ** 2))
    value = value / (beta * math.sqrt(math.pi))
    return float(value) if value.ndim == 0 else value


def kernel_from_density(density: GaussianDensity, x, y) -> float | np.ndarray:
    """
    rho_K(x, y) = int rho((x+y)/2, p) exp(i p (x-y) / hbar) dp by refined Gauss-Legendre.

    The density is even in p, so only the cosine part survives.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    centre = 0.5 * (x + y)[..., None]
    offset = (x - y)[..., None]
    cutoff = get_numerics().gaussian_radius_cutoff * density.gamma

    def estimate(npoints: int):
        rule = finite_rule(npoints, -cutoff, cutoff)
        values = density.evaluate(centre, rule.nodes) * np.cos(rule.nodes * offset / density.hbar)
        return values @ rule.weights

    value = refine(estimate, 64, max_points=2048, label="kernel p-integral")
    return float(value) if np.ndim(value) == 0 else value


@lru_cache(maxsize=4)
def _weighted_kernel(beta: float, gamma: float, hbar: float, grid: KernelGrid) -> np.ndarray:
    points = grid.points
    matrix = coordinate_kernel(points[:, None], points[None, :], beta, gamma, hbar) * grid.weights[None, :]
    matrix.setflags(write=False)
    return matrix


def _eigenfunction(n: int, grid: KernelGrid, length: float) -> np.ndarray:
    return oscillator_table(n, grid.points, length)[n]


def validated_grid(n: int, beta: float, gamma: float, hbar: float, grid: KernelGrid | None = None) -> KernelGrid:
    """
    A grid on which phi_n integrates to 1 within NORMALIZATION_GATE.

    Grids that cut phi_n off are widened; grids that under-resolve it are refined.

    Raises:
        NumericalError: if the gate still fails after MAX_GRID_DOUBLINGS adjustments.
    """
    length = math.sqrt(beta * hbar / gamma)
    grid = grid or KernelGrid.default_for(beta, gamma, hbar)
    for _ in range(MAX_GRID_DOUBLINGS + 1):
        phi = _eigenfunction(n, grid, length)
        residual = abs(float(np.sum(grid.weights * phi * phi)) - 1.0)
        if residual <= NORMALIZATION_GATE:
            return grid
        edge = max(abs(phi[0]), abs(phi[-1])) / float(np.max(np.abs(phi)))
        grid = grid.widened() if edge > EDGE_TOLERANCE else grid.refined()
        logger.debug(f"phi_{n} normalisation off by {residual:.2e}; retrying on {grid}")
    raise NumericalError(f"kernel grid validation failed for n={n} (normalisation residual {residual:.2e})")


def apply_kernel(n: int, beta: float, gamma: float, hbar: float, grid: KernelGrid | None = None) -> np.ndarray:
    """int rho_K(x, y) phi_n(y) dy at every point x of the (validated) grid."""
    grid = validated_grid(n, beta, gamma, hbar, grid)
    phi = _eigenfunction(n, grid, math.sqrt(beta * hbar / gamma))
    return _weighted_kernel(float(beta), float(gamma), float(hbar), grid) @ phi


def hermite_identity_residual(
    n: int,
    s: float,
    grid: KernelGrid | None = None,
    *,
    beta: float = 1.0,
    hbar: float = 1.0,
    eigenvalue: float | None = None,
) -> float:
    """
    max_x |(K phi_n)(x) - lambda_n phi_n(x)| / max |phi_n|.

    ``eigenvalue`` replaces the closed-form lambda_n, which lets callers
    confirm the check is sensitive to a wrong value.
    """
    gamma = s * hbar / beta
    grid = validated_grid(n, beta, gamma, hbar, grid)
    phi = _eigenfunction(n, grid, math.sqrt(beta * hbar / gamma))
    applied = apply_kernel(n, beta, gamma, hbar, grid)
    target = gaussian_eigenvalue(n, s) if eigenvalue is None else eigenvalue
    return float(np.max(np.abs(applied - target * phi)) / np.max(np.abs(phi)))


def kernel_trace(beta: float, gamma: float, hbar: float, grid: KernelGrid | None = None) -> float:
    """int rho_K(x, x) dx on the grid; 1 for a normalised density."""
    grid = grid or KernelGrid.default_for(beta, gamma, hbar)
    diagonal = coordinate_kernel(grid.points, grid.points, beta, gamma, hbar)
    return float(np.sum(grid.weights * diagonal))
