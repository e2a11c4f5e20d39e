"""
Run configuration shared by the management commands.

A JSON config file (``--config``) supplies defaults; command-line flags win.
Keys in the file use the flag names with underscores or dashes, e.g.
``{"family": "gaussian", "s-min": 0.1, "s_max": 4, "steps": 40}``.
"""
from __future__ import annotations

import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

import numpy as np

from groenewold.exceptions import ConfigurationError
from groenewold.services.densities import Density, density_from_spec
from groenewold.services.spectra import FAMILIES

FORMATS = ("csv", "json")
SWEEP_FAMILIES = FAMILIES + ("both",)

DEFAULT_SPECTRUM_N_MAX = 20
DEFAULT_QUANTIZE_N_MAX = 16


@dataclass(frozen=True)
class RunConfig:
    family: str | None = None
    s: float | None = None
    beta: float | None = None
    gamma: float | None = None
    hbar: float | None = None
    density_spec: Path | None = None
    n_max: int | None = None
    s_min: float | None = None
    s_max: float | None = None
    steps: int | None = None
    out: Path | None = None
    format: str = "csv"
    jobs: int = 1
    only: tuple[str, ...] = ()

    @classmethod
    def from_options(cls, options: Mapping[str, Any]) -> RunConfig:
        """Merge the optional ``config`` file with explicit options (non-None options win)."""
        known = {field.name for field in fields(cls)}
        merged = dict(load_config_file(options.get("config"), known))
        merged.update({key: value for key, value in options.items() if key in known and value is not None})

        for key in ("density_spec", "out"):
            if merged.get(key) is not None:
                merged[key] = Path(merged[key])
        if merged.get("only") is not None:
            only = merged["only"]
            if isinstance(only, str):
                only = [only]
            merged["only"] = tuple(part.strip() for item in only for part in str(item).split(",") if part.strip())
        return cls(**merged)

    def _common_checks(self) -> None:
        if self.format not in FORMATS:
            raise ConfigurationError(f"--format must be one of {', '.join(FORMATS)}, got {self.format!r}")
        if not _is_count(self.jobs, 1):
            raise ConfigurationError(f"--jobs must be a positive integer, got {self.jobs!r}")
        if self.n_max is not None and not _is_count(self.n_max, 0):
            raise ConfigurationError(f"--n-max must be a non-negative integer, got {self.n_max!r}")
        for name in ("s", "beta", "gamma", "hbar", "s_min", "s_max"):
            value = getattr(self, name)
            if value is not None and not _is_positive(value):
                raise ConfigurationError(f"--{name.replace('_', '-')} must be positive, got {value!r}")
        if self.family is not None and self.density_spec is not None:
            raise ConfigurationError("give either --family or --density-spec, not both")

    def resolved_s(self) -> float:
        """s from --s, or beta*gamma/hbar from the physical scales."""
        if self.s is not None:
            if self.beta is not None or self.gamma is not None:
                raise ConfigurationError("give either --s or --beta/--gamma, not both")
            return float(self.s)
        if self.beta is None or self.gamma is None:
            raise ConfigurationError("give --s, or both --beta and --gamma")
        return self.beta * self.gamma / (self.hbar or 1.0)

    def for_spectrum(self) -> RunConfig:
        self._common_checks()
        if self.family not in FAMILIES:
            raise ConfigurationError(f"--family must be one of {', '.join(FAMILIES)}, got {self.family!r}")
        self.resolved_s()
        return replace(self, n_max=DEFAULT_SPECTRUM_N_MAX if self.n_max is None else int(self.n_max))

    def for_sweep(self) -> RunConfig:
        self._common_checks()
        if self.family not in SWEEP_FAMILIES:
            raise ConfigurationError(f"--family must be one of {', '.join(SWEEP_FAMILIES)}, got {self.family!r}")
        if self.s_min is None or self.s_max is None or self.steps is None:
            raise ConfigurationError("a sweep needs --s-min, --s-max and --steps")
        if not self.s_max > self.s_min:
            raise ConfigurationError(f"--s-max ({self.s_max}) must exceed --s-min ({self.s_min})")
        if not _is_count(self.steps, 2):
            raise ConfigurationError(f"--steps must be an integer >= 2, got {self.steps!r}")
        return self

    def for_quantize(self) -> RunConfig:
        self._common_checks()
        if self.density_spec is None:
            raise ConfigurationError("quantize needs --density-spec")
        if self.s is not None:
            raise ConfigurationError("--s does not apply to --density-spec runs")
        return replace(self, n_max=DEFAULT_QUANTIZE_N_MAX if self.n_max is None else int(self.n_max))

    def sweep_families(self) -> tuple[str, ...]:
        return FAMILIES if self.family == "both" else (self.family,)

    def s_values(self) -> list[float]:
        """Evenly spaced s grid, rounded to 12 significant digits so s = 1 lands exactly."""
        grid = np.linspace(self.s_min, self.s_max, int(self.steps))
        values = [float(f"{value:.12g}") for value in grid]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigurationError("sweep grid collapses after rounding; use fewer --steps")
        return values

    def load_density(self) -> Density:
        try:
            spec = json.loads(Path(self.density_spec).read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigurationError(f"density spec {self.density_spec} not found") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"density spec {self.density_spec} is not valid JSON: {exc}") from exc
        try:
            return density_from_spec(spec)
        except ConfigurationError:
            raise
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc


def load_config_file(path: str | Path | None, known: set[str]) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigurationError(f"config file {path} not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file {path} must hold a JSON object")

    values = {}
    for key, value in data.items():
        name = key.replace("-", "_")
        if name not in known:
            raise ConfigurationError(f"unknown config key {key!r} in {path}")
        values[name] = value
    return values


def _is_count(value: Any, minimum: int) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= minimum


def _is_positive(value: Any) -> bool:
    return (
        isinstance(value, (int, float))
        and not isinstance(value, bool)
        and math.isfinite(value)
        and value > 0
    )
