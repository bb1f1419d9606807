"""Exception types shared across the package.

Plain division by (near) zero of a quaternion raises the builtin
``ZeroDivisionError``; everything domain-specific derives from
:class:`QQFueterError` so callers can catch the whole family.
"""


class QQFueterError(Exception):
    """Base class for all package-specific errors."""


class InvalidStructuralSet(QQFueterError):
    """A quaternion 4-frame does not satisfy the orthonormality contract."""


class NotOrthonormal(InvalidStructuralSet):
    """Orthonormality violated; carries the offending pair and inner product."""

    def __init__(self, k: int, m: int, value: float):
        self.pair = (k, m)
        self.value = value
        expected = 1.0 if k == m else 0.0
        super().__init__(
            f"frame vectors {k} and {m} have inner product {value!r}, "
            f"expected {expected} (tolerance violated)"
        )


class InvalidDeformation(QQFueterError):
    """Deformation parameters outside the admissible range 0 < q' < q <= 1."""


class RequiresDerivativeAtZero(QQFueterError):
    """Scalar difference quotient at x = 0 needs an explicit derivative value."""


class SingularPoint(QQFueterError):
    """Quaternionic difference quotient evaluated at the singular point 0."""


class MissingExactPartial(QQFueterError):
    """A field was asked for an exact partial derivative it cannot supply."""


class ComponentVanishes(QQFueterError):
    """A field component crosses zero on a segment where a weight needs it."""

    def __init__(self, component: int, axis: int, location: float, value: float):
        self.component = component
        self.axis = axis
        self.location = location
        self.value = value
        super().__init__(
            f"component {component} vanishes (value {value:.3e}) on axis {axis} "
            f"near coordinate {location:.6g}"
        )


class HypothesisViolated(QQFueterError):
    """A certificate-gated hypothesis failed; carries the max residual."""

    def __init__(self, residual: float, detail: str = ""):
        self.residual = residual
        msg = f"hypothesis residual {residual:.3e}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NonFiniteSample(QQFueterError):
    """An integrand returned a non-finite value at a quadrature node."""

    def __init__(self, node):
        self.node = tuple(float(v) for v in node)
        super().__init__(f"non-finite integrand sample at node {self.node}")


class CalibrationAmbiguous(QQFueterError):
    """Neither candidate orientation sign satisfies the calibration identity."""


class PoleTooCloseToBoundary(QQFueterError):
    """Singular quadrature pole sits within the safety margin of the boundary."""


class PoleHit(QQFueterError):
    """Cauchy kernel evaluated at (or numerically at) its pole."""


class ConfigError(QQFueterError):
    """Suite configuration document violates the schema."""
