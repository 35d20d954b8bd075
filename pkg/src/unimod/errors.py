"""Exception types shared across the package."""


class UnimodError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(UnimodError, ValueError):
    """An argument violates a documented precondition (non-finite input,
    bad dimension, malformed schema, out-of-range parameter)."""


class DegenerateInputError(UnimodError, ValueError):
    """The input is all-zero (or otherwise carries no signal) where a
    nonzero vector is required."""


class SizeLimitError(UnimodError, ValueError):
    """An exhaustive enumeration would exceed the configured size guard."""


class UnsupportedNormError(InvalidArgumentError):
    """The requested norm is not handled by this solver entry point."""
