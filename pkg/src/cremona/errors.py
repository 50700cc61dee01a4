class CremonaError(Exception):
    """Base class for engine errors."""


class InputError(CremonaError, ValueError):
    """An operation was called outside its precondition."""


class InvariantViolation(CremonaError):
    """An internal consistency check failed; usually an inconsistent cluster."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class ReplayError(CremonaError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step
