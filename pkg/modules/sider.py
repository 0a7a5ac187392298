"""
SIDER-n curves: spherical interpolants through n+1 equally spaced knots built
by recursively blending two SIDER-(n-1) curves with SLERP.

Also hosts knot validation (sign flipping, 90 degree ambiguity, great-circle
degeneracy, control spread).
"""

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np
from numpy.polynomial import Polynomial

from modules.errors import AmbiguousAntipode, RecursionDepth, WindowSize
from modules.geodesic_interp import (
    CurveSegment,
    KnotSequence,
    Method,
    canonical_sign_flip,
    slerp,
    slerp_kernel,
)
from modules.quaternion_core import geodesic_angle, pure, vector_part
from modules.settings import NUMERICS

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SiderControls2:
    c_2a: np.ndarray
    c_2b: np.ndarray


@dataclass(frozen=True)
class BlendSchedule:
    """Parameter maps of SIDER-n = SLERP(SIDER(first n, g), SIDER(last n, h), f)."""

    n: int
    g: Polynomial
    h: Polynomial
    f: Polynomial

    @classmethod
    def for_order(cls, n: int) -> "BlendSchedule":
        if n < 2:
            raise ValueError(f"Blend schedules start at order 2, got {n}")
        if n == 2:
            t = Polynomial([0.0, 1.0])
            return cls(2, t, t, t)
        g = Polynomial([0.0, n / (n - 1)])
        return cls(n, g, g - 1.0 / (n - 1), Polynomial([0.0, 1.0]))


def _extrapolated_controls(q1, q2, q3):
    """d_2a = SLERP(q3, q2, 2), d_2b = SLERP(q1, q2, 2); precomputation, not counted."""
    return slerp_kernel(q3, q2, 2.0), slerp_kernel(q1, q2, 2.0)


def sider2_controls(q1, q2, q3) -> SiderControls2:
    d2a, d2b = _extrapolated_controls(q1, q2, q3)
    return SiderControls2(c_2a=vector_part(d2a), c_2b=vector_part(d2b))


def sider2(q1, q2, q3, t) -> np.ndarray:
    """SLERP(SLERP(q1, d_2a, t), SLERP(d_2b, q3, t), t); passes q2 at t = 1/2."""
    t = np.asarray(t, dtype=float)
    d2a, d2b = _extrapolated_controls(q1, q2, q3)
    return slerp(slerp(q1, d2a, t), slerp(d2b, q3, t), t)


def _sider(stencil: np.ndarray, t: np.ndarray) -> np.ndarray:
    n = stencil.shape[0] - 1
    if n == 2:
        return sider2(stencil[0], stencil[1], stencil[2], t)
    schedule = BlendSchedule.for_order(n)
    return slerp(_sider(stencil[:-1], schedule.g(t)), _sider(stencil[1:], schedule.h(t)), schedule.f(t))


def sider_n(knots, t, max_order: int = NUMERICS.max_sider_order) -> np.ndarray:
    """
    Evaluate SIDER-n through n+1 knots at native parameter t (knot m at m/n).

    Args:
        knots: pure quaternions, shape (n+1, ..., 4); extra axes broadcast with t
        t: parameter(s); values outside [0, 1] extrapolate
        max_order: recursion cap

    Returns:
        Pure unit quaternion(s)
    """
    stencil = np.asarray(knots, dtype=float)
    n = stencil.shape[0] - 1
    if n < 2:
        raise WindowSize(f"SIDER needs at least 3 knots, got {stencil.shape[0]}")
    if n > max_order:
        raise RecursionDepth(f"SIDER-{n} exceeds recursion cap {max_order}")
    return _sider(stencil, np.asarray(t, dtype=float))


def sider3(q1, q2, q3, q4, t) -> np.ndarray:
    return sider_n(np.stack(np.broadcast_arrays(q1, q2, q3, q4)), t)


def stencil_candidates(interval: int, n: int, count: int) -> List[int]:
    """Start indices of the (n+1)-knot stencils that cover interval (interval, interval+1)."""
    lo = max(0, interval - n + 1)
    hi = min(interval, count - 1 - n)
    return list(range(lo, hi + 1))


def centering_offset(start: int, interval: int, n: int) -> float:
    return abs((start + n / 2.0) - (interval + 0.5))


def centered_stencil(interval: int, n: int, count: int) -> int:
    starts = stencil_candidates(interval, n, count)
    if not starts:
        raise WindowSize(f"{count} knots cannot hold a SIDER-{n} stencil")
    return min(starts, key=lambda j: (centering_offset(j, interval, n), j))


def stencil_evaluator(knots: KnotSequence, n: int, starts: np.ndarray, max_order: int = NUMERICS.max_sider_order):
    """Evaluator using, on interval i, the SIDER-n stencil starting at starts[i]."""
    q = knots.quaternions
    offsets = np.arange(n + 1)

    def evaluate(t):
        i, u = knots.locate(t)
        j = starts[i]
        stencil = q[j[None, ...] + offsets.reshape((-1,) + (1,) * j.ndim)]
        return sider_n(stencil, (i - j + u) / n, max_order)

    return evaluate


def sider_curve(knots: KnotSequence, n: int, max_order: int = NUMERICS.max_sider_order) -> CurveSegment:
    """SIDER-n over a knot sequence; longer sequences use the most centered stencil per interval."""
    method = {2: Method.SIDER2, 3: Method.SIDER3, 4: Method.SIDER4}.get(n)
    if method is None:
        raise WindowSize(f"Curve segments exist for SIDER2..SIDER4, got order {n}")
    if n > max_order:
        raise RecursionDepth(f"SIDER-{n} exceeds recursion cap {max_order}")
    starts = np.array([centered_stencil(i, n, len(knots)) for i in range(len(knots) - 1)])
    return CurveSegment(
        method, knots.t0, knots.t_end, stencil_evaluator(knots, n, starts, max_order), method.slerp_calls, knots
    )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairCheck:
    index: int
    angle: float
    flipped: bool
    ambiguous: bool
    control_angle: float


@dataclass
class ValidationReport:
    pairs: List[PairCheck]
    canonical_points: np.ndarray
    great_circle: bool = False
    control_spread: List[int] = field(default_factory=list)

    @property
    def ambiguous(self) -> List[int]:
        return [p.index for p in self.pairs if p.ambiguous]

    @property
    def fatal(self) -> bool:
        return bool(self.ambiguous)

    @property
    def flips(self) -> List[int]:
        return [p.index + 1 for p in self.pairs if p.flipped]

    @property
    def warnings(self) -> List[str]:
        messages = []
        if self.great_circle:
            messages.append("GreatCircleWarning: all knots lie on one great circle")
        for i in self.control_spread:
            messages.append(f"ControlSpreadWarning: extrapolated control for pair {i} is beyond 90 degrees")
        return messages

    def raise_if_fatal(self):
        if self.fatal:
            raise AmbiguousAntipode(f"Adjacent knots exactly 90 degrees apart at pairs {self.ambiguous}")

    def canonical_knots(self, t0: float, dt: float) -> KnotSequence:
        return KnotSequence(self.canonical_points, t0, dt)


def validate_knots(knots) -> ValidationReport:
    """Check adjacency angles, sign flips, great-circle degeneracy and control spread."""
    points = knots.points if isinstance(knots, KnotSequence) else np.asarray(knots, dtype=float)
    if len(points) < 2:
        raise WindowSize(f"Validation needs at least 2 knots, got {len(points)}")

    raw_angles = geodesic_angle(points[:-1], points[1:])
    canonical, flipped = canonical_sign_flip(points)
    angles = geodesic_angle(canonical[:-1], canonical[1:])

    pairs = []
    for i, (raw, angle) in enumerate(zip(raw_angles, angles)):
        pairs.append(
            PairCheck(
                index=i,
                angle=float(angle),
                flipped=bool(flipped[i + 1]),
                ambiguous=bool(abs(raw - np.pi / 2) <= NUMERICS.ambiguity_margin),
                control_angle=float(2.0 * angle),
            )
        )

    great_circle = False
    if len(canonical) >= 3:
        normal = np.linalg.svd(canonical)[2][-1]
        great_circle = bool(np.max(np.abs(canonical @ normal)) <= NUMERICS.coplanar_tolerance)

    spread = [p.index for p in pairs if p.control_angle > np.pi / 2]
    report = ValidationReport(pairs, canonical, great_circle, spread)
    for message in report.warnings:
        logger.warning(message)
    if report.fatal:
        logger.error(f"Ambiguous antipodes at pairs {report.ambiguous}")
    return report


def prepare_knots(knots: KnotSequence) -> KnotSequence:
    """Validate and return the sign-canonical knot sequence, raising on ambiguity."""
    report = validate_knots(knots)
    report.raise_if_fatal()
    if not report.flips:
        return knots
    return report.canonical_knots(knots.t0, knots.dt)


def point_curve(stencil_points, t) -> np.ndarray:
    """SIDER-n of raw sphere points; convenience for scripts and tests."""
    return vector_part(sider_n(pure(np.asarray(stencil_points, dtype=float)), t))
