"""Method tag -> curve factory shared by the CLI, the studies and the derivative oracle."""

from typing import Optional, Tuple, Union

import numpy as np

from modules.errors import UnsupportedMethod
from modules.geodesic_interp import CurveSegment, KnotSequence, Method, piecewise_slerp, squad_curve
from modules.seno import seno_curve
from modules.settings import NUMERICS
from modules.sider import sider_curve


def parse_method(method: Union[str, Method]) -> Method:
    try:
        return Method(str(method.value if isinstance(method, Method) else method).lower())
    except ValueError:
        raise UnsupportedMethod(f"Unknown method: {method}") from None


def build_interpolant(method: Union[str, Method], knots: KnotSequence, k: int = 3,
                      max_order: int = NUMERICS.max_sider_order,
                      neighbours: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> CurveSegment:
    """Curve for `method` through `knots`; `neighbours` are SQUAD's outer points, if known."""
    method = parse_method(method)
    if method is Method.SLERP:
        return piecewise_slerp(knots)
    if method is Method.SQUAD:
        return squad_curve(knots, neighbours)
    if method in (Method.SIDER2, Method.SIDER3, Method.SIDER4):
        return sider_curve(knots, method.order, max_order)
    return seno_curve(knots, method.order, k, max_order)
