"""Exception types raised by the library."""

from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from app.core.models import ValidationReport


class LgksError(Exception):
    """Base class for all library errors."""


class DimensionError(LgksError, ValueError):
    """Shape mismatch, index out of range or dimension cap exceeded."""


class ModelValidationError(LgksError, ValueError):
    """An LGKS model violates one of its invariants."""

    def __init__(self, message: str, report: Optional["ValidationReport"] = None):
        super().__init__(message)
        self.report = report


class ModelFileError(LgksError, ValueError):
    """A model file could not be parsed; `location` names the offending field."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class NumericalError(LgksError, RuntimeError):
    """SVD/eigen non-convergence, overflow or non-finite results."""
