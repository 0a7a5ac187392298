"""
Quaternion algebra.

Quaternions are float64 numpy arrays of shape (..., 4) ordered (w, b, c, d);
sphere points are arrays of shape (..., 3). Every function broadcasts over
leading axes so whole parameter grids go through one call.

Conventions: ij = k, jk = i, ki = j.
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from modules.errors import NonUnitRotation, ZeroNorm
from modules.settings import NUMERICS

logger = logging.getLogger(__name__)

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])
DEFAULT_AXIS = np.array([0.0, 0.0, 1.0])


def quaternion(w, v) -> np.ndarray:
    """Assemble quaternion(s) from scalar part(s) and 3-vector part(s)."""
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    w, _ = np.broadcast_arrays(w, v[..., 0])
    q = np.concatenate([w[..., None], v], axis=-1)
    if not np.all(np.isfinite(q)):
        raise ValueError(f"Quaternion components must be finite, got {q}")
    return q


def pure(p) -> np.ndarray:
    """Embed sphere point(s) as pure quaternion(s) (0, p)."""
    p = np.asarray(p, dtype=float)
    return quaternion(np.zeros(p.shape[:-1]), p)


def scalar_part(q) -> np.ndarray:
    return np.asarray(q, dtype=float)[..., 0]


def vector_part(q) -> np.ndarray:
    return np.asarray(q, dtype=float)[..., 1:]


def norm(q) -> np.ndarray:
    return np.linalg.norm(np.asarray(q, dtype=float), axis=-1)


def normalize(x) -> np.ndarray:
    """Scale quaternions or vectors to unit length along the last axis."""
    x = np.asarray(x, dtype=float)
    n = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(n <= 1e-300):
        raise ZeroNorm("Cannot normalize a zero-length quaternion or vector")
    return x / n


def is_unit(q, tol: float = NUMERICS.unit_tolerance) -> bool:
    return bool(np.all(np.abs(norm(q) - 1.0) <= tol))


def is_pure(q, tol: float = NUMERICS.unit_tolerance) -> bool:
    return bool(np.all(np.abs(scalar_part(q)) <= tol))


def sphere_point(v, normalize_input: bool = False) -> np.ndarray:
    """Validate (or normalize) 3-vectors as points on the unit sphere."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != 3:
        raise ValueError(f"Sphere points need 3 components, got shape {v.shape}")
    if normalize_input:
        return normalize(v)
    if not is_unit(v):
        raise ValueError(f"Not a unit vector: {v}")
    return v


def geodesic_angle(a, b) -> np.ndarray:
    """Great-circle angle between unit vectors, accurate at small separations."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.arctan2(np.linalg.norm(np.cross(a, b), axis=-1), np.sum(a * b, axis=-1))


def hamilton_product(q1, q2) -> np.ndarray:
    """(a1a2 - u1.u2, a1u2 + a2u1 + u1 x u2)"""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    a1, u1 = q1[..., :1], q1[..., 1:]
    a2, u2 = q2[..., :1], q2[..., 1:]
    w = a1 * a2 - np.sum(u1 * u2, axis=-1, keepdims=True)
    v = a1 * u2 + a2 * u1 + np.cross(u1, u2)
    return np.concatenate([w, v], axis=-1)


def conjugate(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.concatenate([q[..., :1], -q[..., 1:]], axis=-1)


def inverse(q) -> np.ndarray:
    """(a, -u) / |q|^2"""
    n = norm(q)
    if np.any(n <= 1e-300):
        raise ZeroNorm(f"Cannot invert quaternion with norm {np.min(n)}")
    # divide twice so tiny norms do not underflow when squared
    return conjugate(q) / n[..., None] / n[..., None]


@np.errstate(invalid="raise", divide="raise")
def exp_map(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    a, u = q[..., 0], q[..., 1:]
    n = np.linalg.norm(u, axis=-1)
    small = n < NUMERICS.small_angle
    safe_n = np.where(small, 1.0, n)
    sinc = np.where(small, 1.0 - n * n / 6.0, np.sin(n) / safe_n)
    scale = np.exp(a)
    return quaternion(scale * np.cos(n), (scale * sinc)[..., None] * u)


@np.errstate(invalid="raise", divide="raise")
def log_map(q) -> np.ndarray:
    """
    Quaternion logarithm (ln|q|, angle/|u| * u) with angle = atan2(|u|, a).

    A zero vector part yields a zero vector part, also for negative reals.
    """
    q = np.asarray(q, dtype=float)
    nrm = norm(q)
    if np.any(nrm <= 1e-300):
        raise ZeroNorm("Logarithm of a zero quaternion is undefined")
    a, u = q[..., 0], q[..., 1:]
    n = np.linalg.norm(u, axis=-1)
    angle = np.arctan2(n, a)
    factor = np.divide(angle, n, out=np.zeros_like(n), where=n > 0)
    return quaternion(np.log(nrm), factor[..., None] * u)


def power_map(q, exponent) -> np.ndarray:
    """q^f = exp(f ln q); exponent broadcasts against the leading axes of q."""
    exponent = np.asarray(exponent, dtype=float)
    return exp_map(exponent[..., None] * log_map(q))


@dataclass(frozen=True)
class RotationQuaternion:
    """Unit quaternion (cos theta/2, sin theta/2 * axis) for a rotation by theta."""

    half_angle: float
    axis: np.ndarray

    @classmethod
    def from_angle_axis(cls, theta: float, axis=None) -> "RotationQuaternion":
        if theta == 0.0 or axis is None:
            return cls(0.5 * float(theta), DEFAULT_AXIS.copy())
        return cls(0.5 * float(theta), normalize(np.asarray(axis, dtype=float)))

    @property
    def angle(self) -> float:
        return 2.0 * self.half_angle

    @property
    def quaternion(self) -> np.ndarray:
        return quaternion(np.cos(self.half_angle), np.sin(self.half_angle) * self.axis)


def rotation_quaternion(theta: float, axis=None) -> np.ndarray:
    return RotationQuaternion.from_angle_axis(theta, axis).quaternion


def rotation_between(pa, pb) -> RotationQuaternion:
    """Minimal rotation carrying pa onto pb (axis pa x pb / sin theta)."""
    pa = np.asarray(pa, dtype=float)
    pb = np.asarray(pb, dtype=float)
    theta = float(geodesic_angle(pa, pb))
    cross = np.cross(pa, pb)
    if np.linalg.norm(cross) < NUMERICS.small_angle:
        return RotationQuaternion.from_angle_axis(0.0)
    return RotationQuaternion.from_angle_axis(theta, cross)


def rotate(p, r: Union[RotationQuaternion, np.ndarray]) -> np.ndarray:
    """ROTATE(p, r) = vec(r (0,p) r^-1)"""
    rq = r.quaternion if isinstance(r, RotationQuaternion) else np.asarray(r, dtype=float)
    drift = np.abs(norm(rq) - 1.0)
    if np.any(drift > NUMERICS.rotation_tolerance):
        raise NonUnitRotation(f"Rotation quaternion norm off by {np.max(drift):.3e}")
    out = vector_part(hamilton_product(hamilton_product(rq, pure(p)), inverse(rq)))
    if np.any(np.abs(np.linalg.norm(out, axis=-1) - 1.0) > NUMERICS.unit_tolerance):
        out = normalize(out)
    return out


def rodrigues(p, theta, axis) -> np.ndarray:
    """Rodrigues' rotation of p by theta about unit axis."""
    p = np.asarray(p, dtype=float)
    axis = np.asarray(axis, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    return c * p + s * np.cross(axis, p) + (1.0 - c) * np.sum(axis * p, axis=-1, keepdims=True) * axis
