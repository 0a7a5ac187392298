"""
Experiment harness: generating curves, knot synthesis, reconstruction error,
convergence-order and efficiency studies, and dense sampling for `eval`.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from tqdm import tqdm

from modules.derivatives import fd_derivatives
from modules.geodesic_interp import CurveSegment, KnotSequence
from modules.interpolants import build_interpolant, parse_method
from modules.quaternion_core import normalize, vector_part

logger = logging.getLogger(__name__)


class CurveKind(str, Enum):
    SMOOTH = "smooth"
    KINKED = "kinked"


@dataclass(frozen=True)
class GeneratingCurve:
    """Projection onto the sphere of x(t) = (1, t, z(t)) with z = f or |f|."""

    kind: CurveKind = CurveKind.SMOOTH
    sigma: float = 0.1
    domain: Tuple[float, float] = (-0.5, 0.5)

    def __post_init__(self):
        object.__setattr__(self, "kind", CurveKind(self.kind))

    def f(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.exp(-t * t / (2.0 * self.sigma ** 2)) * np.sin(2.0 * np.pi * t)

    def z(self, t) -> np.ndarray:
        values = self.f(t)
        return np.abs(values) if self.kind is CurveKind.KINKED else values

    def ambient(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.stack([np.ones_like(t), t, self.z(t)], axis=-1)

    def __call__(self, t) -> np.ndarray:
        return normalize(self.ambient(t))


@dataclass(frozen=True)
class ConvergenceRow:
    inv_dt: int
    errors: Dict[str, float]
    orders: Dict[str, Optional[float]] = field(default_factory=dict)


@dataclass(frozen=True)
class TimingRecord:
    method: str
    inv_dt: int
    wall_seconds: float
    error: float


@dataclass(frozen=True)
class EfficiencySummary:
    kinked_error_level: Optional[float]
    kinked_seno3_seconds: Optional[float]
    kinked_squad_seconds: Optional[float]
    smooth_error_level: Optional[float]
    smooth_squad_seconds: Optional[float]
    smooth_seno3_seconds: Optional[float]

    @property
    def seno3_dominates_kinked(self) -> Optional[bool]:
        if self.kinked_seno3_seconds is None or self.kinked_squad_seconds is None:
            return None
        return self.kinked_seno3_seconds < self.kinked_squad_seconds

    @property
    def squad_faster_smooth(self) -> Optional[bool]:
        if self.smooth_squad_seconds is None or self.smooth_seno3_seconds is None:
            return None
        return self.smooth_squad_seconds < self.smooth_seno3_seconds


def doubling_range(inv_dt_min: int, inv_dt_max: int) -> List[int]:
    if inv_dt_min < 2 or inv_dt_max < inv_dt_min:
        raise ValueError(f"Invalid grid range {inv_dt_min}..{inv_dt_max}")
    grid = [int(inv_dt_min)]
    while grid[-1] * 2 <= inv_dt_max:
        grid.append(grid[-1] * 2)
    return grid


def _check_doubling(inv_dts: Sequence[int]):
    for a, b in zip(inv_dts, inv_dts[1:]):
        if b != 2 * a:
            raise ValueError(f"Grid sizes must double: {list(inv_dts)}")


def synthesize_knots(curve: GeneratingCurve, inv_dt: int) -> KnotSequence:
    """Knots on the uniform grid of spacing 1/inv_dt over the curve's domain."""
    if inv_dt < 2:
        raise ValueError(f"inv_dt must be >= 2, got {inv_dt}")
    lo, hi = curve.domain
    count = int(round((hi - lo) * inv_dt)) + 1
    times = lo + np.arange(count) / inv_dt
    return KnotSequence(curve(times), t0=lo, dt=1.0 / inv_dt)


def boundary_neighbours(curve: GeneratingCurve, inv_dt: int) -> Tuple[np.ndarray, np.ndarray]:
    """Curve points one grid step outside each end of the domain."""
    lo, hi = curve.domain
    dt = 1.0 / inv_dt
    return curve(lo - dt), curve(hi + dt)


def _study_interpolant(method: str, curve: GeneratingCurve, knots: KnotSequence, inv_dt: int, k: int) -> CurveSegment:
    return build_interpolant(method, knots, k, neighbours=boundary_neighbours(curve, inv_dt))


def error_samples(curve: GeneratingCurve, inv_dt: int, samples_per_interval: int = 64) -> np.ndarray:
    lo, hi = curve.domain
    return np.linspace(lo, hi, int(round((hi - lo) * inv_dt)) * samples_per_interval + 1)


def reconstruction_error(interpolant: CurveSegment, curve: GeneratingCurve, samples: int) -> float:
    """Composite trapezoid of |y(t) - z(t)| over the curve domain with `samples` points."""
    if samples < 1000:
        raise ValueError(f"Need at least 1000 error samples, got {samples}")
    t = np.linspace(*curve.domain, samples)
    return _integrated_error(interpolant(t), curve(t), t)


def _integrated_error(y: np.ndarray, z: np.ndarray, t: np.ndarray) -> float:
    return float(trapezoid(np.linalg.norm(y - z, axis=-1), t))


def _grid_errors(curve: GeneratingCurve, methods: Sequence[str], inv_dt: int,
                 samples_per_interval: int, k: int) -> Dict[str, float]:
    knots = synthesize_knots(curve, inv_dt)
    t = error_samples(curve, inv_dt, samples_per_interval)
    exact = curve(t)
    errors = {}
    for method in methods:
        interpolant = _study_interpolant(method, curve, knots, inv_dt, k)
        errors[method] = _integrated_error(interpolant(t), exact, t)
    logger.info(f"inv_dt={inv_dt}: " + ", ".join(f"{m}={e:.4e}" for m, e in errors.items()))
    return errors


def convergence_study(curve: GeneratingCurve, methods: Sequence[str], inv_dts: Sequence[int],
                      samples_per_interval: int = 64, k: int = 3, workers: int = 1,
                      progress: bool = False) -> List[ConvergenceRow]:
    """Errors per grid and orders rho = log2(e(dt) / e(dt/2)) between consecutive grids."""
    _check_doubling(inv_dts)
    methods = [parse_method(m).value for m in methods]

    def run(inv_dt):
        return _grid_errors(curve, methods, inv_dt, samples_per_interval, k)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_grid = list(tqdm(pool.map(run, inv_dts), total=len(inv_dts), disable=not progress))
    else:
        per_grid = [run(n) for n in tqdm(inv_dts, disable=not progress, desc=f"{curve.kind.value} grids")]

    rows = []
    for index, (inv_dt, errors) in enumerate(zip(inv_dts, per_grid)):
        orders = {}
        for method in methods:
            if index == 0:
                orders[method] = None
            else:
                orders[method] = float(np.log2(per_grid[index - 1][method] / errors[method]))
        rows.append(ConvergenceRow(int(inv_dt), errors, orders))
    return rows


def convergence_frame(rows: Sequence[ConvergenceRow]) -> pd.DataFrame:
    records = []
    for row in rows:
        record = {"inv_dt": row.inv_dt}
        for method, error in row.errors.items():
            record[f"e_{method}"] = error
            record[f"rho_{method}"] = row.orders.get(method)
        records.append(record)
    return pd.DataFrame(records).astype({"inv_dt": int})


def efficiency_study(curve: GeneratingCurve, methods: Sequence[str], inv_dts: Sequence[int], reps: int = 3,
                     samples_per_interval: int = 64, k: int = 3, progress: bool = False) -> List[TimingRecord]:
    """Median wall time of building and densely evaluating each interpolant, with its error."""
    if reps < 3:
        raise ValueError(f"Timing needs at least 3 repetitions, got {reps}")
    methods = [parse_method(m).value for m in methods]

    records = []
    for inv_dt in tqdm(inv_dts, disable=not progress, desc="timing"):
        knots = synthesize_knots(curve, inv_dt)
        t = error_samples(curve, inv_dt, samples_per_interval)
        exact = curve(t)
        for method in methods:
            durations = []
            for _ in range(reps):
                start = time.perf_counter()
                y = _study_interpolant(method, curve, knots, inv_dt, k)(t)
                durations.append(time.perf_counter() - start)
            records.append(TimingRecord(method, int(inv_dt), float(np.median(durations)),
                                        _integrated_error(y, exact, t)))
    return records


def timing_frame(records: Sequence[TimingRecord]) -> pd.DataFrame:
    return pd.DataFrame([vars(r) for r in records], columns=["method", "inv_dt", "wall_seconds", "error"])


def time_to_error(records: Sequence[TimingRecord], method: str, target: float) -> Optional[float]:
    """Wall time to reach `target` error, interpolated in log-log space; None if out of range."""
    points = sorted((r.error, r.wall_seconds) for r in records if r.method == method and r.error > 0)
    if not points:
        return None
    log_err = np.log([p[0] for p in points])
    log_time = np.log([p[1] for p in points])
    goal = np.log(target)
    if goal < log_err[0] - 1e-12 or goal > log_err[-1] + 1e-12:
        return None
    return float(np.exp(np.interp(goal, log_err, log_time)))


def _finest_common_error(records: Sequence[TimingRecord]) -> Optional[float]:
    """Smallest error that both SENO3 and SQUAD reach in `records`."""
    finest = [min((r.error for r in records if r.method == m), default=None) for m in ("seno3", "squad")]
    return None if None in finest else max(finest)


def efficiency_ordinal_summary(kinked: Sequence[TimingRecord], smooth: Sequence[TimingRecord],
                               smooth_target: float = 1e-10, smooth_ceiling: float = 1e-9) -> EfficiencySummary:
    """Compare SENO3 and SQUAD at the finest common kinked error and near `smooth_target` on the smooth curve.

    The smooth comparison falls back to the finest common error when either method
    stops short of `smooth_target`, as long as that level is at most `smooth_ceiling`.
    """
    kinked_level = _finest_common_error(kinked)
    smooth_level = _finest_common_error(smooth)
    if smooth_level is not None:
        smooth_level = max(smooth_level, smooth_target)
        if smooth_level > smooth_ceiling:
            logger.warning(f"Smooth sweep stops at error {smooth_level:.3e}; refine the grid to compare near "
                           f"{smooth_target:.0e}")
            smooth_level = None
    return EfficiencySummary(
        kinked_error_level=kinked_level,
        kinked_seno3_seconds=time_to_error(kinked, "seno3", kinked_level) if kinked_level else None,
        kinked_squad_seconds=time_to_error(kinked, "squad", kinked_level) if kinked_level else None,
        smooth_error_level=smooth_level,
        smooth_squad_seconds=time_to_error(smooth, "squad", smooth_level) if smooth_level else None,
        smooth_seno3_seconds=time_to_error(smooth, "seno3", smooth_level) if smooth_level else None,
    )


def sample_curve(curve: CurveSegment, density: int, derivatives: bool = False, h: float = 1e-5) -> pd.DataFrame:
    """density + 1 evenly spaced samples over the curve domain (optionally with fd velocity)."""
    if density < 1:
        raise ValueError(f"density must be >= 1, got {density}")
    t = np.linspace(curve.t_start, curve.t_end, density + 1)
    points = curve(t)
    frame = pd.DataFrame({"t": t, "x": points[:, 0], "y": points[:, 1], "z": points[:, 2]})
    if derivatives:
        velocity = np.array([vector_part(fd_derivatives(curve, ti, order=1, h=h).d1) for ti in t])
        frame["dx"], frame["dy"], frame["dz"] = velocity[:, 0], velocity[:, 1], velocity[:, 2]
    return frame
