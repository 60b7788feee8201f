"""Exception hierarchy shared by every module."""


class OneDimError(Exception):
    """Base class for all library errors."""


class DomainError(OneDimError, ValueError):
    """Input outside the domain of an operation (bad graph, wrong manifold, ...)."""


class PreconditionError(DomainError):
    """A numerically checked precondition failed.

    ``details`` carries the offending component or stage so callers can
    report it without parsing the message.
    """

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class NumericError(OneDimError, ArithmeticError):
    """A numerical routine failed to converge."""


class InvariantViolation(OneDimError):
    """A value broke a structural invariant (e.g. nonpositive derivative)."""
