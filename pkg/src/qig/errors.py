"""Exception types raised across the package."""


class QigError(Exception):
    """Base class for all package errors."""


class NotHermitian(QigError, ValueError):
    pass


class DimMismatch(QigError, ValueError):
    pass


class DomainError(QigError, ValueError):
    pass


class TraceNotOne(QigError, ValueError):
    pass


class NotFaithful(QigError, ValueError):
    pass


class NotTraceless(QigError, ValueError):
    pass


class BadDims(QigError, ValueError):
    pass


class ConditionViolated(QigError):
    """The hypothesis of an inequality does not hold for the given inputs.

    This is a property of the inputs, not a failure of the inequality, and
    campaigns count it separately from violations.
    """

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class ParseError(QigError, ValueError):
    pass
