"""Exception types shared across the package."""


class ThetaflowError(Exception):
    """Base class for all package-specific errors."""


class DomainError(ThetaflowError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class RangeError(ThetaflowError, OverflowError):
    """Numeric overflow of a coordinate (e.g. hyperbolic height under extreme flows)."""


class DegenerateMatrix(ThetaflowError, ValueError):
    """Matrix fails the determinant-one check."""


class NonConvergence(ThetaflowError, RuntimeError):
    """An iteration failed to converge within its step budget."""


class OutOfRange(ThetaflowError, IndexError):
    """Index outside the valid range."""


class UnsupportedCutoff(ThetaflowError, TypeError):
    """Cutoff function not admissible for the requested operation."""


class AccuracyNotMet(ThetaflowError, ArithmeticError):
    """Internal error estimate exceeds the requested tolerance."""


class DivergenceSuspected(ThetaflowError, ArithmeticError):
    """Partial sums grow without the certified decay kicking in."""


class PrecisionExhausted(ThetaflowError, ArithmeticError):
    """Double precision can no longer support the requested expansion."""


class CapacityExceeded(ThetaflowError, ValueError):
    """Problem size above the supported enumeration limit."""


class MaxIterExceeded(ThetaflowError, RuntimeError):
    """Renormalization loop exceeded its iteration budget."""


class InsufficientTailSamples(ThetaflowError, RuntimeError):
    """Too few exceedances at the top of the fit window for a stable tail fit."""


class IoError(ThetaflowError, OSError):
    """Report emission failed."""


class RationalPairWarning(UserWarning):
    """(c1, alpha) looks rational: the limit theorems assume an irrational pair."""
