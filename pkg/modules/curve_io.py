"""
Reading knot corpora and writing result tables.

Input rows are (t, x, y, z) in CSV (header required) or JSON (a list of rows,
a list of {"t", "x", "y", "z"} objects, or {"t": [...], "points": [...]}).
"""

import json
import logging
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from modules.errors import DatasetFormatError
from modules.geodesic_interp import KnotSequence
from modules.settings import NUMERICS

logger = logging.getLogger(__name__)

COLUMNS = ["t", "x", "y", "z"]


def _frame_from_json(path: Path) -> pd.DataFrame:
    with open(path, "r") as f:
        raw = json.load(f)
    if isinstance(raw, dict) and "points" in raw:
        points = np.asarray(raw["points"], dtype=float)
        if "t" in raw:
            times = np.asarray(raw["t"], dtype=float)
        else:
            times = float(raw.get("t0", 0.0)) + float(raw.get("dt", 1.0)) * np.arange(len(points))
        return pd.DataFrame({"t": times, "x": points[:, 0], "y": points[:, 1], "z": points[:, 2]})
    if isinstance(raw, list) and raw and isinstance(raw[0], dict):
        return pd.DataFrame(raw)
    return pd.DataFrame(raw, columns=COLUMNS)


def read_knots(path, normalize_tolerance: float = NUMERICS.input_normalize_tolerance) -> KnotSequence:
    """Parse a corpus file into a KnotSequence (near-unit rows are normalized)."""
    path = Path(path)
    if not path.exists():
        raise DatasetFormatError(f"Input file not found: {path}")

    try:
        if path.suffix.lower() == ".json":
            frame = _frame_from_json(path)
        else:
            frame = pd.read_csv(path)
    except (ValueError, TypeError, KeyError, IndexError, pd.errors.ParserError) as exc:
        raise DatasetFormatError(f"Could not parse {path.name}: {exc}") from exc

    frame.columns = [str(c).strip().lower() for c in frame.columns]
    missing = [c for c in COLUMNS if c not in frame.columns]
    if missing:
        raise DatasetFormatError(f"{path.name} is missing columns {missing}")

    values = frame[COLUMNS].apply(pd.to_numeric, errors="coerce")
    bad_rows = values.index[values.isna().any(axis=1)].tolist()
    if bad_rows:
        raise DatasetFormatError(f"{path.name}: malformed rows {bad_rows[:5]}")

    logger.info(f"Loaded {len(values)} knots from {path.name}")
    return KnotSequence.from_samples(
        values["t"].to_numpy(), values[["x", "y", "z"]].to_numpy(), normalize_tolerance
    )


def write_table(frame: pd.DataFrame, path, fmt: str = "csv", digits: int = 17) -> Optional[Path]:
    """Write a result table; CSV floats use `digits` significant digits. path None -> stdout."""
    if fmt == "csv":
        text = frame.to_csv(index=False, float_format=f"%.{digits}g", lineterminator="\n")
    elif fmt == "json":
        records = frame.astype(object).where(frame.notna(), None).to_dict(orient="records")
        text = json.dumps(records, indent=2) + "\n"
    else:
        raise ValueError(f"Unknown output format: {fmt}")

    if path is None:
        print(text, end="")
        return None
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
