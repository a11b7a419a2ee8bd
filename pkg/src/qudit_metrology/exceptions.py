"""Exception types raised across the package."""


class QuditError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(QuditError, ValueError):
    """Dimension below 2 or above the dense-algebra cap."""


class NotAStateError(QuditError, ValueError):
    """Matrix or vector fails the state invariants (norm, trace, positivity)."""


class NonHermitianError(QuditError, ValueError):
    pass


class DimensionMismatchError(QuditError, ValueError):
    pass


class LevelIndexError(QuditError, IndexError):
    """Level or basis index outside ``0..d-1``."""


class InvariantViolation(QuditError, RuntimeError):
    """A computed result broke one of its own row invariants."""
