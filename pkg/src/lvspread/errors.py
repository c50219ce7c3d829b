"""Exception hierarchy shared by all modules."""


class LVSpreadError(Exception):
    """Base class for package errors."""


class ValidationError(LVSpreadError, ValueError):
    """Malformed input: a shape, parameter set or scenario field is invalid."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class PreconditionError(LVSpreadError, ValueError):
    """An operation was called outside its mathematical domain."""


class InconclusiveError(LVSpreadError, RuntimeError):
    """A numerical estimate could not be certified (domain too short, no convergence)."""


class BlowUpError(LVSpreadError, FloatingPointError):
    """Non-finite value produced by time integration."""

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class ScenarioError(ValidationError):
    """Scenario-level semantic problem (overlapping supports, sizing rule...)."""


class CacheMismatchError(LVSpreadError):
    """A cached artifact was produced by a different scenario."""


class InsufficientDataError(LVSpreadError, ValueError):
    """Too few valid samples to fit a speed."""
