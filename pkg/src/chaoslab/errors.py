"""Exception types shared across the package."""


class ChaosLabError(Exception):
    """Base class for all chaoslab errors."""


class BadArityError(ChaosLabError):
    """Kernel index tuple length does not match the declared degree."""


class DiagonalTupleError(ChaosLabError):
    """Index tuple repeats an entry; kernels vanish on the diagonal."""


class ConflictingValueError(ChaosLabError):
    """Two raw entries map the same canonical tuple to different values."""


class OutOfRangeError(ChaosLabError):
    """Distribution parameter outside its admissible interval."""


class BadIndexError(ChaosLabError):
    """Sequence, parameter, or interval index outside the defined domain."""


class DivergentSeriesError(ChaosLabError):
    """Tail bound requested for a series with no finite tail."""


class NonPositiveLengthError(ChaosLabError):
    """Interval lengths must be strictly positive and finite."""


class DiagonalPairError(ChaosLabError):
    """Product-kernel integral needs two distinct intervals."""


class DomainError(ChaosLabError):
    """Argument outside the domain where a bound is valid."""


class ResourceLimitError(ChaosLabError):
    """Requested simulation exceeds the configured work budget."""
