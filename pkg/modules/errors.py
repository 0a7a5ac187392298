"""
Exception hierarchy for the spherical interpolation library.

Every failure raised by ``modules`` derives from ``InterpolationError`` so the
CLI can map whole families onto exit codes.
"""


class InterpolationError(ValueError):
    """Base class for all library errors."""


class ZeroNorm(InterpolationError):
    """A quaternion with (numerically) zero norm was inverted or logged."""


class NonUnitRotation(InterpolationError):
    """A rotation quaternion is not unit to the rotation tolerance."""


class AntipodalPoints(InterpolationError):
    """Geodesic between two points is not unique."""


class AmbiguousAntipode(InterpolationError):
    """Adjacent knots are exactly 90 degrees apart; sign flipping is undecidable."""


class ImpurityError(InterpolationError):
    """An interpolant that must stay pure picked up a real part."""


class UniformTimeRequired(InterpolationError):
    """Knot timestamps are not uniformly spaced."""


class RecursionDepth(InterpolationError):
    """SIDER order exceeds the configured recursion cap."""


class DomainError(InterpolationError):
    """Parameter or interval lies outside a curve's domain."""


class WindowSize(InterpolationError):
    """Wrong number of knots for a stencil window."""


class UnsupportedMethod(InterpolationError):
    """Method tag not available for the requested operation."""


class DatasetFormatError(InterpolationError):
    """Input corpus could not be parsed."""


class NonUnitInput(InterpolationError):
    """Input vector is too far from unit length to be normalized silently."""
