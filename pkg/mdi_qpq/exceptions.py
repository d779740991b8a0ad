"""Custom exceptions for the MDI-QPQ toolkit."""


class QPQError(Exception):
    """Base exception for all MDI-QPQ errors."""

    pass


class ConfigurationError(QPQError):
    """Raised when configuration is invalid or missing."""

    pass


class ValidationError(QPQError):
    """Raised when arguments or input data fail validation."""

    pass


class DomainError(ValidationError):
    """Raised when an angle or dimension lies outside its allowed range."""

    pass


class DimensionMismatchError(ValidationError):
    """Raised when states, bases or tables disagree on dimension."""

    pass


class InvariantViolationError(QPQError):
    """Raised when a value object breaks one of its invariants."""

    pass


class SessionAbortedError(QPQError):
    """Raised when a query session has no usable conclusive bit.

    The caller is expected to restart the key establishment.
    """

    pass
