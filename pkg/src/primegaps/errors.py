"""Exception types shared across the package."""


class PrimegapsError(Exception):
    """Base class for all package-specific errors."""


class PrecisionExhausted(PrimegapsError):
    """A certified answer could not be produced within the precision budget."""


class CapExceeded(PrimegapsError):
    """Requested sieve limit exceeds the configured memory cap."""


class RangeError(PrimegapsError):
    """Query outside the range a table can answer exactly."""


class CacheIOError(PrimegapsError):
    """Prime cache file could not be read or written."""


class CapacityExceeded(PrimegapsError):
    """Experiment parameters exceed sieve or window capacity."""


class FloorUncertified(PrimegapsError):
    """floor(f(n)) could not be separated from an integer after escalation."""


class ValidationFailed(PrimegapsError):
    """A declared function property failed its numeric check."""

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        super().__init__(f"{clause}: {detail}" if detail else clause)


class QuadratureFailure(PrimegapsError):
    """Adaptive quadrature could not reach the requested tolerance."""


class InvalidCurvature(PrimegapsError):
    """Supplied curvature floor is not a lower bound for |f''| on the range."""


class QTooLarge(PrimegapsError):
    """Modulus exceeds the admissible range for the discrepancy bound."""


class InsufficientElements(PrimegapsError):
    """Not enough sequence members found within the search limit."""


class NotMember(PrimegapsError):
    """Argument is not a member of the sequence it was claimed to belong to."""


class NotCoprime(PrimegapsError):
    """Residue and modulus are not coprime where coprimality is required."""
