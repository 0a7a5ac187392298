"""Shared pytest fixtures: bundled datasets, seeded random knots, corpus files."""

import numpy as np
import pandas as pd
import pytest

from modules.datasets import load_dataset
from modules.geodesic_interp import KnotSequence
from modules.quaternion_core import normalize, rodrigues


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: convergence and timing studies on fine grids")


def random_unit_vectors(rng, count):
    return normalize(rng.normal(size=(count, 3)))


def random_knots(rng, count, step=(0.1, 0.6), dt=1.0):
    """Random walk on the sphere with adjacent angles drawn from `step` (radians)."""
    points = [random_unit_vectors(rng, 1)[0]]
    for _ in range(count - 1):
        p = points[-1]
        axis = normalize(np.cross(p, rng.normal(size=3)))
        points.append(normalize(rodrigues(p, rng.uniform(*step), axis)))
    return KnotSequence(np.array(points), t0=0.0, dt=dt)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def three_point():
    return load_dataset("simple_three_point").knots


@pytest.fixture
def four_point():
    return load_dataset("simple_four_point").knots


@pytest.fixture
def write_corpus(tmp_path):
    """Write a KnotSequence (or raw rows) to a CSV file and return its path."""

    def _write(knots_or_rows, name="corpus.csv"):
        path = tmp_path / name
        if isinstance(knots_or_rows, KnotSequence):
            k = knots_or_rows
            frame = pd.DataFrame({"t": k.times, "x": k.points[:, 0], "y": k.points[:, 1], "z": k.points[:, 2]})
            frame.to_csv(path, index=False, float_format="%.17g")
        else:
            path.write_text(knots_or_rows)
        return path

    return _write
