"""Exception types shared across the package."""


class FplapError(Exception):
    """Base class for all library errors."""


class ConfigError(FplapError):
    """Invalid or inconsistent run configuration."""


class EmptyDomain(FplapError):
    """No lattice node falls inside the requested set."""


class DimensionMismatch(FplapError):
    """A shape primitive does not match the requested spatial dimension."""


class TruncationTooSmall(FplapError):
    """The exterior truncation ball does not contain the domain."""


class ZeroFunction(FplapError):
    """An identically zero grid function where a nonzero one is required."""


class NotPositive(FplapError):
    """A strictly positive grid function was expected."""


class NoSignChange(FplapError):
    """A sign-changing grid function was expected."""


class SameSign(FplapError):
    """Scalar arguments violate an opposite-sign precondition."""


class NotOnCircle(FplapError):
    """A direction pair does not lie on the unit circle."""


class NegativeWeight(FplapError):
    """A nonnegative weight argument was negative."""


class NegativeInput(FplapError):
    """A nonnegative scalar argument was negative."""


class WrongExponent(FplapError):
    """An operation restricted to p = 2 was called with a different exponent."""


class ExponentOutOfRange(FplapError):
    """The exponent relation s*p < dim required by this check fails."""


class EmptyZeroSet(FplapError):
    """A grid function with at least one exact zero was expected."""


class OverlappingBalls(FplapError):
    """Two-ball construction called with centers closer than one diameter."""


class DegeneratePath(FplapError):
    """Path endpoints coincide; no nontrivial path exists."""


class NotConverged(FplapError):
    """An iterative solver hit its budget before meeting its tolerance.

    The best iterate found so far is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
