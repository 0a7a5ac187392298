"""
Essentially non-oscillatory stencil selection on the sphere.

For each knot interval SENO-n compares the SIDER-n candidates whose n+1 knot
stencils cover the interval and keeps the one with the shortest sampled arc
length (least variation) over the interval.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from modules.errors import DomainError, WindowSize
from modules.geodesic_interp import CurveSegment, KnotSequence, Method
from modules.quaternion_core import geodesic_angle, vector_part
from modules.settings import NUMERICS
from modules.sider import centering_offset, sider_curve, sider_n, stencil_evaluator

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class VariationEstimate:
    length: float
    k: int


@dataclass(frozen=True)
class StencilCandidate:
    start_index: int
    curve: CurveSegment
    restriction: Tuple[float, float]
    variation: VariationEstimate


@dataclass(frozen=True)
class IntervalSelection:
    interval: int
    start_index: int
    variations: Dict[int, float]


def variation(curve: CurveSegment, t_i: float, t_ip1: float, k: int = 3) -> VariationEstimate:
    """Sum of geodesic distances between k+2 equally spaced samples of curve on [t_i, t_ip1]."""
    if k < 1:
        raise ValueError(f"Variation needs at least one interior point, got k={k}")
    if not curve.contains([t_i, t_ip1]):
        raise DomainError(f"[{t_i}, {t_ip1}] is outside [{curve.t_start}, {curve.t_end}]")
    samples = curve(np.linspace(t_i, t_ip1, k + 2))
    return VariationEstimate(float(np.sum(geodesic_angle(samples[:-1], samples[1:]))), k)


def _pick(interval: int, lengths: Dict[int, float], n: int) -> int:
    """Least variation; near-ties go to the most centered stencil, then the lower start."""
    best = min(lengths.values())
    tied = [j for j, v in lengths.items() if v <= best + TIE_TOLERANCE * max(1.0, best)]
    return min(tied, key=lambda j: (centering_offset(j, interval, n), j))


def seno_select(window: KnotSequence, n: int, k: int = 3) -> StencilCandidate:
    """Pick among the n SIDER-n candidates of a 2n-knot window for its central interval."""
    if len(window) != 2 * n:
        raise WindowSize(f"SENO{n} window needs {2 * n} knots, got {len(window)}")

    interval = n - 1
    t_i, t_ip1 = window.times[interval], window.times[interval + 1]
    candidates = {}
    for start in range(n):
        curve = sider_curve(window.window(start, n + 1), n)
        restriction = ((interval - start) / n, (interval - start + 1) / n)
        candidates[start] = StencilCandidate(start, curve, restriction, variation(curve, t_i, t_ip1, k))

    chosen = _pick(interval, {j: c.variation.length for j, c in candidates.items()}, n)
    summary = {j: round(c.variation.length, 12) for j, c in candidates.items()}
    logger.debug(f"SENO{n} window: variations {summary} -> start {chosen}")
    return candidates[chosen]


def seno_selections(knots: KnotSequence, n: int, k: int = 3,
                    max_order: int = NUMERICS.max_sider_order) -> List[IntervalSelection]:
    """Selection for every interval, one-sided near the ends of the sequence."""
    count = len(knots)
    if count < n + 1:
        raise WindowSize(f"SENO{n} needs at least {n + 1} knots, got {count}")

    q = knots.quaternions
    intervals = np.arange(count - 1)
    offsets = np.arange(n + 1)[:, None]
    local = np.linspace(0.0, 1.0, k + 2)
    table = np.full((count - 1, n), np.inf)

    # candidate starting r knots before the interval, all intervals at once
    for r in range(n):
        starts = intervals - r
        valid = (starts >= 0) & (starts + n <= count - 1)
        if not valid.any():
            continue
        stencil = q[starts[valid][None, :] + offsets][:, :, None, :]
        samples = vector_part(sider_n(stencil, (r + local) / n, max_order))
        table[intervals[valid], r] = np.sum(geodesic_angle(samples[:, :-1], samples[:, 1:]), axis=1)

    selections = []
    for i in intervals:
        lengths = {int(i - r): float(table[i, r]) for r in range(n) if np.isfinite(table[i, r])}
        selections.append(IntervalSelection(int(i), _pick(int(i), lengths, n), lengths))
    return selections


def seno_curve(knots: KnotSequence, n: int, k: int = 3,
               max_order: int = NUMERICS.max_sider_order) -> CurveSegment:
    """Piecewise curve using, per interval, the least-variation SIDER-n restricted to it."""
    method = {2: Method.SENO2, 3: Method.SENO3}.get(n)
    if method is None:
        raise WindowSize(f"SENO is provided for orders 2 and 3, got {n}")
    selections = seno_selections(knots, n, k, max_order)
    starts = np.array([s.start_index for s in selections])
    logger.info(f"SENO{n}: selected stencils for {len(starts)} intervals")
    return CurveSegment(
        method, knots.t0, knots.t_end, stencil_evaluator(knots, n, starts, max_order), method.slerp_calls, knots
    )
