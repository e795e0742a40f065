"""Exception types shared by all critfield modules."""


class CritfieldError(ValueError):
    """Base class for precondition and input errors."""

    exit_code = 4


class EmptySetError(CritfieldError):
    """Raised when an operation needs a nonempty set."""

    exit_code = 3

    def __init__(self, message="empty set"):
        super().__init__(message)


class ResolutionError(CritfieldError):
    """Raised when a representation is too coarse or too large for a request."""

    exit_code = 5
