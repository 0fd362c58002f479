"""
Exceptions

Every error raised by the lab derives from a built-in exception class as
well as from SpectralFieldError, so callers can catch either. The CLI maps
each family to an exit status.
"""


class SpectralFieldError(Exception):
    """Base class for all lab errors."""


class DomainError(SpectralFieldError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class InputValidationError(SpectralFieldError, ValueError):
    """Input data failed a content check (negative spectrum, asymmetric matrix)."""


class UsageError(SpectralFieldError, ValueError):
    """Operation called in a way its contract does not allow."""


class GeometryError(SpectralFieldError, ValueError):
    """Observation window incompatible with the torus it is placed on."""


class DegenerateInputError(SpectralFieldError, ValueError):
    """Input has no variance or no content to work with."""


class NumericError(SpectralFieldError, ArithmeticError):
    """Numerical failure: non-finite samples, failed factorizations."""

    def __init__(self, message: str, pivot: int | None = None):
        super().__init__(message)
        self.pivot = pivot


class ConstructionError(NumericError):
    """A structure function could not be normalized."""


class SymmetryViolationError(NumericError):
    """A quantity that must be real by symmetry carries an imaginary residue."""


class ResourceError(SpectralFieldError, MemoryError):
    """Requested arrays exceed the configured memory or dense budgets."""
