"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition.

    Distinct from I/O failures (which surface as OSError) so callers can
    tell a bad input apart from a missing or unreadable file.
    """
