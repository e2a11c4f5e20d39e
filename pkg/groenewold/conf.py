"""
Numerical configuration for the groenewold services.

Values come from ``settings.GROENEWOLD`` and fall back to the defaults on
``NumericsConfig`` when Django settings are not configured, so the services
can also be imported from a plain Python session.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

from django.conf import settings


@dataclass(frozen=True)
class NumericsConfig:
    quadrature_rtol: float = 1e-9
    quadrature_atol: float = 1e-12
    quadrature_max_points: int = 4096
    imaginary_tolerance: float = 1e-8
    trace_tolerance: float = 1e-8
    trace_tail_factor: float = 8.0
    normalization_tolerance: float = 1e-6
    gaussian_radius_cutoff: float = 7.0
    kernel_grid_points: int = 2048
    kernel_grid_widths: float = 8.0
    jacobi_tolerance: float = 1e-12
    jacobi_max_sweeps: int = 100


def get_numerics() -> NumericsConfig:
    """Return the active numerical configuration."""
    overrides = {}
    if settings.configured:
        overrides = getattr(settings, "GROENEWOLD", None) or {}
    known = {field.name for field in fields(NumericsConfig)}
    return NumericsConfig(**{key: value for key, value in overrides.items() if key in known})
