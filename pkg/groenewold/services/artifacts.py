"""
CSV/JSON emitters for spectra, sweeps and quantised matrices.

Every number is written with 12 significant digits and rows come out in a
fixed order, so the same run always produces byte-identical files.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from groenewold.services.spectra import SweepResult

SIGNIFICANT_DIGITS = 12
FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"

SPECTRUM_COLUMNS = ["n", "eigenvalue", "method"]
SWEEP_COLUMNS = ["uncertainty_over_hbar", "min_bound", "max_bound", "family"]


def rounded(value: Any) -> Any:
    """Round floats (recursively through lists and dicts) to 12 significant digits."""
    if isinstance(value, dict):
        return {key: rounded(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [rounded(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}") + 0.0
    return value


def spectrum_frame(values, method: str) -> pd.DataFrame:
    values = np.asarray(values, dtype=float)
    return pd.DataFrame(
        {
            "n": np.arange(values.size),
            "eigenvalue": values,
            "method": method,
        },
        columns=SPECTRUM_COLUMNS,
    )


def sweep_frame(result: SweepResult) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "uncertainty_over_hbar": row.uncertainty_over_hbar,
                "min_bound": row.min_bound,
                "max_bound": row.max_bound,
                "family": row.family,
            }
            for row in result.rows
        ],
        columns=SWEEP_COLUMNS,
    )


def render_frame(frame: pd.DataFrame, fmt: str) -> str:
    """Serialise a table as CSV (header always present) or as a JSON list of records."""
    if fmt == "csv":
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    records = [rounded(record) for record in frame.to_dict(orient="records")]
    return render_payload(records)


def render_payload(payload: Any) -> str:
    return json.dumps(rounded(payload), indent=2) + "\n"


def write_output(text: str, out: Path | None, stream) -> None:
    """Write to ``out`` when given, otherwise to the command's stdout."""
    if out is None:
        stream.write(text, ending="")
        return
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
