"""
Time derivatives of the interpolants.

Analytic first and second derivatives are assembled by the chain rule on the
generic blend  y = (0, p) (cos(f theta), sin(f theta) a)  with
theta = angle(p, s) and a = -(p x s) / sin(theta), where p, s and f may all
move with t. SQUAD, SIDER2 and SIDER3 are compositions of that blend.

A finite-difference oracle checks every analytic result and provides third
derivatives, one-sided derivatives at knots and continuity jumps.
"""

import logging
from dataclasses import dataclass
from typing import Dict, NamedTuple, Optional, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial

from modules.errors import DomainError, UnsupportedMethod
from modules.geodesic_interp import CurveSegment, KnotSequence, Method, slerp_kernel, squad_controls
from modules.interpolants import build_interpolant, parse_method
from modules.quaternion_core import conjugate, hamilton_product, inverse, log_map, pure, quaternion, vector_part
from modules.settings import DerivativeSettings
from modules.sider import centered_stencil

logger = logging.getLogger(__name__)

DEFAULTS = DerivativeSettings()
JUMP_THRESHOLD = 1e-1
SMOOTH_THRESHOLD = 1e-3
IDENTITY_MAP = Polynomial([0.0, 1.0])


@dataclass(frozen=True)
class DerivativeBundle:
    t: float
    value: np.ndarray
    d1: np.ndarray
    d2: Optional[np.ndarray] = None
    d3: Optional[np.ndarray] = None
    source: str = "fd"
    one_sided: bool = False

    @property
    def max_real_part(self) -> float:
        parts = [d[0] for d in (self.d1, self.d2, self.d3) if d is not None]
        return float(np.max(np.abs(parts)))


@dataclass(frozen=True)
class AngularKinematics:
    omega: np.ndarray
    alpha: np.ndarray
    zeta: Optional[np.ndarray]
    real_residual: float


# ---------------------------------------------------------------------------
# SLERP derivative
# ---------------------------------------------------------------------------

def slerp_derivative(qa, qb, f: Polynomial = IDENTITY_MAP, t: float = 0.0) -> np.ndarray:
    """d/dt SLERP(qa, qb, f(t)) = SLERP(qa, qb, f(t)) ln(qa^-1 qb) f'(t)"""
    tangent = log_map(hamilton_product(conjugate(qa), qb))
    return hamilton_product(slerp_kernel(qa, qb, f(t)), tangent) * f.deriv()(t)


def slerp_second_derivative(qa, qb, f: Polynomial = IDENTITY_MAP, t: float = 0.0) -> np.ndarray:
    tangent = log_map(hamilton_product(conjugate(qa), qb))
    y = slerp_kernel(qa, qb, f(t))
    f1, f2 = f.deriv()(t), f.deriv(2)(t)
    return hamilton_product(hamilton_product(y, tangent), tangent) * f1 * f1 + hamilton_product(y, tangent) * f2


# ---------------------------------------------------------------------------
# Chain-rule jets
# ---------------------------------------------------------------------------

class Jet(NamedTuple):
    """Value and first two derivatives of a pure-quaternion path."""

    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    def reparametrized(self, rate: float) -> "Jet":
        """Jet of y(rate * t + c) given the jet of y at the mapped parameter."""
        return Jet(self.value, self.d1 * rate, self.d2 * rate * rate)


class DegenerateBlend(ArithmeticError):
    pass


def _constant(q) -> Jet:
    q = np.asarray(q, dtype=float)
    return Jet(q, np.zeros(4), np.zeros(4))


def blend_jet(p: Jet, s: Jet, f: Tuple[float, float, float],
              degenerate_sin: float = DEFAULTS.degenerate_sin) -> Jet:
    """Jet of SLERP(p(t), s(t), f(t)) from the jets of its endpoints and schedule."""
    pv, p1, p2 = (vector_part(x) for x in p)
    sv, s1, s2 = (vector_part(x) for x in s)
    F, F1, F2 = f

    cos_t = float(np.dot(pv, sv))
    cross = np.cross(pv, sv)
    sin_t = float(np.linalg.norm(cross))
    if sin_t < degenerate_sin:
        raise DegenerateBlend(f"Blend endpoints coincide (sin theta = {sin_t:.3e})")
    theta = np.arctan2(sin_t, cos_t)

    th1 = -(np.dot(p1, sv) + np.dot(pv, s1)) / sin_t
    th2 = -(np.dot(p2, sv) + 2.0 * np.dot(p1, s1) + np.dot(pv, s2) + cos_t * th1 * th1) / sin_t

    a = -cross / sin_t
    a1 = (-np.cross(p1, sv) - np.cross(pv, s1) - cos_t * th1 * a) / sin_t
    a2 = (
        -np.cross(p2, sv) - 2.0 * np.cross(p1, s1) - np.cross(pv, s2)
        + sin_t * th1 * th1 * a - cos_t * th2 * a - 2.0 * cos_t * th1 * a1
    ) / sin_t

    phi = F * theta
    phi1 = F1 * theta + F * th1
    phi2 = F2 * theta + 2.0 * F1 * th1 + F * th2
    c, sn = np.cos(phi), np.sin(phi)

    Q = quaternion(c, sn * a)
    Q1 = quaternion(-sn * phi1, c * phi1 * a + sn * a1)
    Q2 = quaternion(-c * phi1 * phi1 - sn * phi2, (c * phi2 - sn * phi1 * phi1) * a + 2.0 * c * phi1 * a1 + sn * a2)

    P, P1, P2 = p
    return Jet(
        hamilton_product(P, Q),
        hamilton_product(P1, Q) + hamilton_product(P, Q1),
        hamilton_product(P2, Q) + 2.0 * hamilton_product(P1, Q1) + hamilton_product(P, Q2),
    )


def _linear(u: float) -> Tuple[float, float, float]:
    return (u, 1.0, 0.0)


def slerp_jet(qa, qb, u: float) -> Jet:
    return blend_jet(_constant(qa), _constant(qb), _linear(u))


def squad_jet(q_i, q_ip1, s_i, s_ip1, u: float) -> Jet:
    outer = slerp_jet(q_i, q_ip1, u)
    inner = slerp_jet(s_i, s_ip1, u)
    return blend_jet(outer, inner, (2.0 * u * (1.0 - u), 2.0 - 4.0 * u, -4.0))


def sider2_jet(q1, q2, q3, u: float) -> Jet:
    d2a = slerp_kernel(q3, q2, 2.0)
    d2b = slerp_kernel(q1, q2, 2.0)
    return blend_jet(slerp_jet(q1, d2a, u), slerp_jet(d2b, q3, u), _linear(u))


def sider3_jet(q1, q2, q3, q4, u: float) -> Jet:
    first = sider2_jet(q1, q2, q3, 1.5 * u).reparametrized(1.5)
    last = sider2_jet(q2, q3, q4, 1.5 * u - 0.5).reparametrized(1.5)
    return blend_jet(first, last, _linear(u))


# ---------------------------------------------------------------------------
# Finite-difference oracle
# ---------------------------------------------------------------------------

_CENTRAL = {
    1: (np.array([-1.0, 1.0]), np.array([-0.5, 0.5])),
    2: (np.array([-1.0, 0.0, 1.0]), np.array([1.0, -2.0, 1.0])),
    3: (np.array([-2.0, -1.0, 1.0, 2.0]), np.array([-0.5, 1.0, -1.0, 0.5])),
}
_FORWARD = {
    1: (np.array([0.0, 1.0, 2.0]), np.array([-1.5, 2.0, -0.5])),
    2: (np.array([0.0, 1.0, 2.0, 3.0]), np.array([2.0, -5.0, 4.0, -1.0])),
    3: (np.array([0.0, 1.0, 2.0, 3.0, 4.0]), np.array([-2.5, 9.0, -12.0, 7.0, -1.5])),
}


def _stencil(order: int, side: str):
    if side == "central":
        return _CENTRAL[order]
    nodes, weights = _FORWARD[order]
    if side == "backward":
        return -nodes, weights * (-1.0) ** order
    return nodes, weights


def one_sided_derivative(curve: CurveSegment, t: float, order: int, h: float, side: str,
                         richardson: bool = False) -> np.ndarray:
    """Derivative of the given order from a central, forward or backward stencil."""
    if order not in _CENTRAL:
        raise ValueError(f"Finite differences support orders 1..3, got {order}")
    nodes, weights = _stencil(order, side)

    def estimate(step):
        samples = curve.quaternions(t + step * nodes)
        return weights @ samples / step ** order

    if not richardson:
        return estimate(h)
    return (4.0 * estimate(0.5 * h) - estimate(h)) / 3.0


def _pick_side(curve: CurveSegment, t: float, order: int, h: float) -> str:
    for side in ("central", "forward", "backward"):
        nodes, _ = _stencil(order, side)
        if curve.contains(t + h * nodes):
            return side
    raise DomainError(f"No finite-difference stencil of order {order} fits at t={t} with h={h}")


def fd_derivatives(curve: CurveSegment, t: float, order: int = 2, h: float = DEFAULTS.fd_step) -> DerivativeBundle:
    """Central differences (one-sided near the domain ends) up to the given order."""
    if not curve.contains(t):
        raise DomainError(f"t={t} outside [{curve.t_start}, {curve.t_end}]")
    if not 1 <= order <= 3:
        raise ValueError(f"order must be 1..3, got {order}")

    results, one_sided = {}, False
    for k in range(1, order + 1):
        side = _pick_side(curve, t, k, h)
        one_sided |= side != "central"
        results[k] = one_sided_derivative(curve, t, k, h, side)
    if one_sided:
        logger.debug(f"One-sided stencils used at t={t}")
    return DerivativeBundle(
        t=float(t),
        value=curve.quaternions(t),
        d1=results[1],
        d2=results.get(2),
        d3=results.get(3),
        source="fd",
        one_sided=one_sided,
    )


def continuity_jumps(curve: CurveSegment, t_knot: float, max_order: int = 3, steps: Optional[Dict[int, float]] = None,
                     richardson: bool = DEFAULTS.richardson) -> Dict[int, float]:
    """|left - right| one-sided derivative mismatch at t_knot for orders 1..max_order."""
    steps = steps or DEFAULTS.jump_steps
    jumps = {}
    for order in range(1, max_order + 1):
        h = steps[order]
        left = one_sided_derivative(curve, t_knot, order, h, "backward", richardson)
        right = one_sided_derivative(curve, t_knot, order, h, "forward", richardson)
        jumps[order] = float(np.linalg.norm(left - right))
    return jumps


def classify_continuity(jumps: Dict[int, float]) -> Dict[int, str]:
    labels = {}
    for order, jump in jumps.items():
        if jump >= JUMP_THRESHOLD:
            labels[order] = "jump"
        elif jump <= SMOOTH_THRESHOLD:
            labels[order] = "smooth"
        else:
            labels[order] = "indeterminate"
    return labels


# ---------------------------------------------------------------------------
# Analytic derivatives
# ---------------------------------------------------------------------------

ANALYTIC_METHODS = (Method.SLERP, Method.SQUAD, Method.SIDER2, Method.SIDER3)


def _native_jet(method: Method, knots: KnotSequence, t: float) -> Jet:
    q = knots.quaternions
    i, u = knots.locate(t)
    i, u = int(i), float(u)

    if method is Method.SLERP:
        y = slerp_kernel(q[i], q[i + 1], u)
        return Jet(y, slerp_derivative(q[i], q[i + 1], IDENTITY_MAP, u),
                   slerp_second_derivative(q[i], q[i + 1], IDENTITY_MAP, u)).reparametrized(1.0 / knots.dt)

    if method is Method.SQUAD:
        padded = np.concatenate([q[:1], q, q[-1:]])
        s_i, s_ip1 = squad_controls(padded[i], q[i], q[i + 1], padded[i + 3])
        return squad_jet(q[i], q[i + 1], s_i, s_ip1, u).reparametrized(1.0 / knots.dt)

    n = method.order
    j = centered_stencil(i, n, len(knots))
    native = (i - j + u) / n
    stencil = q[j:j + n + 1]
    jet = sider2_jet(*stencil, native) if n == 2 else sider3_jet(*stencil, native)
    return jet.reparametrized(1.0 / (n * knots.dt))


def analytic_derivatives(method: Union[str, Method], knots: KnotSequence, t: float) -> DerivativeBundle:
    """First and second time derivatives from the chain rule; the fd oracle covers degenerate points."""
    method = parse_method(method)
    if method not in ANALYTIC_METHODS:
        raise UnsupportedMethod(f"Analytic derivatives are not provided for {method.value}")
    if not knots.t0 <= t <= knots.t_end:
        raise DomainError(f"t={t} outside [{knots.t0}, {knots.t_end}]")

    try:
        jet = _native_jet(method, knots, t)
    except DegenerateBlend as exc:
        logger.warning(f"⚠️ {method.value} analytic derivative degenerate at t={t} ({exc}); using fd oracle")
        return fd_derivatives(build_interpolant(method, knots), t, order=2)
    return DerivativeBundle(t=float(t), value=jet.value, d1=jet.d1, d2=jet.d2, source="analytic")


def richardson_ratio(method: Union[str, Method], knots: KnotSequence, t: float, order: int = 1,
                     h: float = 1e-2) -> float:
    """Ratio of analytic-vs-fd gaps at h and h/2; about 4 for a correct O(h^2) match."""
    curve = build_interpolant(method, knots)
    exact = analytic_derivatives(method, knots, t)
    target = exact.d1 if order == 1 else exact.d2

    def gap(step):
        side = _pick_side(curve, t, order, step)
        return np.linalg.norm(one_sided_derivative(curve, t, order, step, side) - target)

    return float(gap(h) / gap(0.5 * h))


# ---------------------------------------------------------------------------
# Angular kinematics
# ---------------------------------------------------------------------------

def angular_kinematics(curve: Optional[CurveSegment] = None, t: Optional[float] = None, h: float = 1e-4,
                       bundle: Optional[DerivativeBundle] = None) -> AngularKinematics:
    """
    omega = vec(2 q' q^-1), alpha = vec((2q'' - omega q') q^-1),
    zeta = vec((2q''' - 2 alpha q' - omega q'') q^-1).

    Args:
        curve: curve to differentiate with the fd oracle (needed when bundle is absent)
        t: parameter
        h: fd step
        bundle: precomputed derivatives; d3 is filled from the curve when missing
    """
    if bundle is None:
        if curve is None or t is None:
            raise ValueError("angular_kinematics needs a curve and t, or a DerivativeBundle")
        bundle = fd_derivatives(curve, t, order=3, h=h)
    d3 = bundle.d3
    if d3 is None and curve is not None:
        d3 = fd_derivatives(curve, bundle.t, order=3, h=h).d3

    q_inv = inverse(bundle.value)
    omega_q = 2.0 * hamilton_product(bundle.d1, q_inv)
    omega = pure(vector_part(omega_q))
    alpha_q = hamilton_product(2.0 * bundle.d2 - hamilton_product(omega, bundle.d1), q_inv)
    alpha = pure(vector_part(alpha_q))
    residual = [omega_q[0], alpha_q[0]]

    zeta = None
    if d3 is not None:
        zeta_q = hamilton_product(
            2.0 * d3 - 2.0 * hamilton_product(alpha, bundle.d1) - hamilton_product(omega, bundle.d2), q_inv
        )
        zeta = vector_part(zeta_q)
        residual.append(zeta_q[0])

    return AngularKinematics(vector_part(omega), vector_part(alpha), zeta, float(np.max(np.abs(residual))))
