class SpinPrepError(Exception):
    """Base class for every error raised by this package."""

    pass


class InvalidInputError(SpinPrepError, ValueError):
    """Arguments outside the domain an operation accepts."""

    pass


class ResourceLimitError(SpinPrepError):
    """Requested problem size exceeds the configured simulation limits."""

    pass


class NumericalQualityError(SpinPrepError):
    """A numerical result is too unreliable to be reported."""

    pass


class NumericalQualityWarning(UserWarning):
    """Base category for recoverable numerical-quality events."""

    pass
