"""
Geodesic interpolation on the unit sphere.

Knot sequences, evaluable curve segments, SLERP (with an instrumented call
counter), piecewise SLERP and SQUAD with its exp/log control points.
"""

import logging
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Optional, Tuple

import numpy as np

from modules.errors import (
    AntipodalPoints,
    DatasetFormatError,
    DomainError,
    ImpurityError,
    NonUnitInput,
    UniformTimeRequired,
)
from modules.quaternion_core import (
    conjugate,
    exp_map,
    hamilton_product,
    log_map,
    normalize,
    power_map,
    pure,
    vector_part,
)
from modules.settings import NUMERICS

logger = logging.getLogger(__name__)


class Method(str, Enum):
    SLERP = "slerp"
    SQUAD = "squad"
    SIDER2 = "sider2"
    SIDER3 = "sider3"
    SIDER4 = "sider4"
    SENO2 = "seno2"
    SENO3 = "seno3"

    @property
    def slerp_calls(self) -> int:
        """SLERP calls needed to evaluate one interpolated point."""
        return _COMPLEXITY[self][0]

    @property
    def data_points(self) -> int:
        return _COMPLEXITY[self][1]

    @property
    def order(self) -> int:
        """SIDER/SENO order n, 1 for SLERP and SQUAD."""
        return int(self.value[-1]) if self.value[-1].isdigit() else 1


_COMPLEXITY = {
    Method.SLERP: (1, 2),
    Method.SQUAD: (3, 4),
    Method.SIDER2: (3, 3),
    Method.SENO2: (6, 4),
    Method.SIDER3: (7, 4),
    Method.SENO3: (21, 6),
    Method.SIDER4: (15, 5),
}


# ---------------------------------------------------------------------------
# SLERP call accounting
# ---------------------------------------------------------------------------

@dataclass
class SlerpTally:
    calls: int = 0


_ACTIVE_TALLY: ContextVar[Optional[SlerpTally]] = ContextVar("slerp_tally", default=None)


@contextmanager
def count_slerp_calls() -> Iterator[SlerpTally]:
    """Count SLERP calls made inside the block (one per vectorized call)."""
    tally = SlerpTally()
    token = _ACTIVE_TALLY.set(tally)
    try:
        yield tally
    finally:
        _ACTIVE_TALLY.reset(token)


# ---------------------------------------------------------------------------
# Knots and curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KnotSequence:
    """Sphere points at uniformly spaced times t0, t0 + dt, ..."""

    points: np.ndarray
    t0: float = 0.0
    dt: float = 1.0

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"Knot points must have shape (N, 3), got {pts.shape}")
        if len(pts) < 2:
            raise ValueError(f"Need at least 2 knots, got {len(pts)}")
        if not self.dt > 0:
            raise UniformTimeRequired(f"Knot spacing must be positive, got dt={self.dt}")
        drift = np.abs(np.linalg.norm(pts, axis=1) - 1.0)
        if np.any(drift > NUMERICS.unit_tolerance):
            raise NonUnitInput(f"Knot {int(np.argmax(drift))} is off the unit sphere by {drift.max():.3e}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))

    @classmethod
    def from_samples(cls, times, points, normalize_tolerance: float = NUMERICS.input_normalize_tolerance):
        """Build from raw (t, p) samples, normalizing near-unit vectors."""
        times = np.asarray(times, dtype=float)
        pts = np.asarray(points, dtype=float)
        if len(times) != len(pts):
            raise DatasetFormatError(f"{len(times)} timestamps for {len(pts)} points")
        if len(times) < 2 or pts.ndim != 2 or pts.shape[1] != 3:
            raise DatasetFormatError(f"Need at least 2 knots of 3 components, got shape {pts.shape}")

        steps = np.diff(times)
        dt = (times[-1] - times[0]) / (len(times) - 1)
        if dt <= 0 or np.any(np.abs(steps - dt) > 1e-9 * max(1.0, abs(dt))):
            raise UniformTimeRequired(f"Timestamps are not uniformly spaced (steps {steps.min()}..{steps.max()})")

        lengths = np.linalg.norm(pts, axis=1)
        bad = np.abs(lengths - 1.0) > normalize_tolerance
        if np.any(bad):
            row = int(np.argmax(bad))
            raise NonUnitInput(f"Row {row} has length {lengths[row]:.9f}; beyond normalization tolerance")
        return cls(pts / lengths[:, None], t0=times[0], dt=dt)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (len(self) - 1)

    @property
    def quaternions(self) -> np.ndarray:
        return pure(self.points)

    def window(self, start: int, count: int) -> "KnotSequence":
        return KnotSequence(self.points[start:start + count], self.t0 + start * self.dt, self.dt)

    def locate(self, t) -> Tuple[np.ndarray, np.ndarray]:
        """Interval index and local parameter u in [0, 1] for each t."""
        s = (np.asarray(t, dtype=float) - self.t0) / self.dt
        i = np.clip(np.floor(s).astype(int), 0, len(self) - 2)
        return i, s - i


@dataclass(frozen=True)
class CurveSegment:
    """Evaluable curve t -> pure unit quaternion on [t_start, t_end]."""

    method: Method
    t_start: float
    t_end: float
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    slerp_calls_per_eval: int = 1
    knots: Optional[KnotSequence] = field(default=None, repr=False)

    def contains(self, t) -> bool:
        t = np.asarray(t, dtype=float)
        eps = 1e-12 * max(1.0, abs(self.t_end - self.t_start))
        return bool(np.all((t >= self.t_start - eps) & (t <= self.t_end + eps)))

    def quaternions(self, t) -> np.ndarray:
        if not self.contains(t):
            raise DomainError(f"t outside [{self.t_start}, {self.t_end}]: {t}")
        return self.evaluator(np.asarray(t, dtype=float))

    def __call__(self, t) -> np.ndarray:
        return vector_part(self.quaternions(t))


# ---------------------------------------------------------------------------
# SLERP
# ---------------------------------------------------------------------------

@np.errstate(invalid="raise", divide="raise")
def slerp_kernel(qa, qb, t) -> np.ndarray:
    """qa (qa^-1 qb)^t without call accounting; t is never clamped."""
    qa = np.asarray(qa, dtype=float)
    qb = np.asarray(qb, dtype=float)
    t = np.asarray(t, dtype=float)

    r = hamilton_product(conjugate(qa), qb)
    angle = np.arctan2(np.linalg.norm(r[..., 1:], axis=-1), r[..., 0])
    if np.any(angle >= np.pi - NUMERICS.antipode_margin):
        raise AntipodalPoints(f"SLERP endpoints are antipodal (angle {np.max(angle):.12f})")

    out = hamilton_product(qa, power_map(r, t))
    near = angle < NUMERICS.small_angle
    if np.any(near):
        tt = t[..., None]
        blend = normalize((1.0 - tt) * qa + tt * qb)
        out = np.where(near[..., None], blend, out)
    return out


def slerp(qa, qb, t) -> np.ndarray:
    """Spherical linear interpolation SLERP(qa, qb, t) = qa (qa^-1 qb)^t."""
    tally = _ACTIVE_TALLY.get()
    if tally is not None:
        tally.calls += 1
    return slerp_kernel(qa, qb, t)


def slerp_points(pa, pb, t) -> np.ndarray:
    return vector_part(slerp(pure(pa), pure(pb), t))


def slerp_negation_check(qa, qb, t, tol: float = 1e-12) -> bool:
    """SLERP(-qa, -qb, t) == -SLERP(qa, qb, t)"""
    qa = np.asarray(qa, dtype=float)
    qb = np.asarray(qb, dtype=float)
    lhs = slerp_kernel(-qa, -qb, t)
    rhs = -slerp_kernel(qa, qb, t)
    return bool(np.all(np.abs(lhs - rhs) <= tol))


def purify(q) -> np.ndarray:
    """Zero a rounding-level real part and renormalize; larger real parts are errors."""
    q = np.array(q, dtype=float)
    w = np.abs(q[..., 0])
    if np.any(w > NUMERICS.purity_tolerance):
        raise ImpurityError(f"Interpolant real part {w.max():.3e} exceeds purity tolerance")
    q[..., 0] = 0.0
    return normalize(q)


def canonical_sign_flip(points) -> Tuple[np.ndarray, np.ndarray]:
    """Flip p_{i+1} -> -p_{i+1} whenever p_i . p_{i+1} < 0, walking forward."""
    out = np.array(points, dtype=float)
    flipped = np.zeros(len(out), dtype=bool)
    for i in range(1, len(out)):
        if np.dot(out[i - 1], out[i]) < 0.0:
            out[i] = -out[i]
            flipped[i] = True
    if flipped.any():
        logger.info(f"Sign-flipped knots {np.flatnonzero(flipped).tolist()}")
    return out, flipped


def piecewise_slerp(knots: KnotSequence) -> CurveSegment:
    q = knots.quaternions

    def evaluate(t):
        i, u = knots.locate(t)
        return slerp(q[i], q[i + 1], u)

    return CurveSegment(Method.SLERP, knots.t0, knots.t_end, evaluate, Method.SLERP.slerp_calls, knots)


# ---------------------------------------------------------------------------
# SQUAD
# ---------------------------------------------------------------------------

def _squad_control(q_prev, q_cur, q_next) -> np.ndarray:
    inv = conjugate(q_cur)
    tangent = log_map(hamilton_product(inv, q_next)) + log_map(hamilton_product(inv, q_prev))
    return hamilton_product(q_cur, exp_map(-0.25 * tangent))


def squad_controls(q_im1, q_i, q_ip1, q_ip2) -> Tuple[np.ndarray, np.ndarray]:
    """s_i = q_i exp(-(ln(q_i^-1 q_i+1) + ln(q_i^-1 q_i-1)) / 4) and likewise s_i+1."""
    return _squad_control(q_im1, q_i, q_ip1), _squad_control(q_i, q_ip1, q_ip2)


def squad(q_im1, q_i, q_ip1, q_ip2, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    s_i, s_ip1 = squad_controls(q_im1, q_i, q_ip1, q_ip2)
    return _squad_blend(q_i, q_ip1, s_i, s_ip1, t)


def _squad_blend(q_i, q_ip1, s_i, s_ip1, u) -> np.ndarray:
    outer = slerp(q_i, q_ip1, u)
    inner = slerp(s_i, s_ip1, u)
    return purify(slerp(outer, inner, 2.0 * u * (1.0 - u)))


def squad_curve(knots: KnotSequence, neighbours: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> CurveSegment:
    """SQUAD through every knot.

    ``neighbours`` optionally gives the sphere points one step before the first
    knot and one step after the last; without them the end knots are repeated.
    """
    q = knots.quaternions
    if neighbours is None:
        before, after = q[:1], q[-1:]
    else:
        before, after = (pure(np.asarray(p, dtype=float))[None, :] for p in neighbours)
    padded = np.concatenate([before, q, after])
    controls = _squad_control(padded[:-2], q, padded[2:])

    def evaluate(t):
        i, u = knots.locate(t)
        return _squad_blend(q[i], q[i + 1], controls[i], controls[i + 1], u)

    return CurveSegment(Method.SQUAD, knots.t0, knots.t_end, evaluate, Method.SQUAD.slerp_calls, knots)
