"""Exception types shared across the package.

Each class carries the CLI exit code it maps to.
"""


class FezcError(Exception):
    exit_code = 1


class UsageError(FezcError, ValueError):
    exit_code = 2


class CapacityError(FezcError, ValueError):
    exit_code = 2


class DataError(FezcError, ValueError):
    exit_code = 4


class FormatError(FezcError):
    """Corrupt or truncated byte stream."""

    exit_code = 4

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class QuantizerRangeError(FezcError, ValueError):
    exit_code = 4


class ToleranceTooTightError(FezcError):
    exit_code = 5


class NumericError(FezcError, ArithmeticError):
    exit_code = 1


class DomainError(FezcError, ValueError):
    exit_code = 6


class InfeasibleError(FezcError):
    """Model parameters violate an existence condition."""

    exit_code = 6
