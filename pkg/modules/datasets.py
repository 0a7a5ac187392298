"""Bundled example knot sets (data/example_datasets.json)."""

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import List, Optional

from modules.geodesic_interp import KnotSequence
from modules.settings import BASE_DIR

DATASET_FILE = BASE_DIR / "data" / "example_datasets.json"


@dataclass(frozen=True)
class Dataset:
    name: str
    description: str
    knots: KnotSequence
    order: Optional[int] = None
    expected_start: Optional[int] = None


@lru_cache(maxsize=None)
def _raw(path: Path = DATASET_FILE) -> dict:
    with open(path, "r") as f:
        return json.load(f)["datasets"]


def list_datasets() -> List[str]:
    return sorted(_raw())


def load_dataset(name: str) -> Dataset:
    entries = _raw()
    if name not in entries:
        raise KeyError(f"Unknown dataset '{name}'; available: {list_datasets()}")
    entry = entries[name]
    count = len(entry["points"])
    knots = KnotSequence.from_samples(
        [entry["t0"] + i * entry["dt"] for i in range(count)], entry["points"]
    )
    return Dataset(name, entry.get("description", ""), knots, entry.get("order"), entry.get("expected_start"))
