"""Exception hierarchy shared by every module."""


class NSWSUError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(NSWSUError, ValueError):
    pass


class DomainError(NSWSUError, ValueError):
    """A constitutive function was evaluated outside its domain (e.g. phi at vacuum)."""


class UnsupportedRegimeError(NSWSUError, ValueError):
    pass


class ConfigError(NSWSUError, ValueError):
    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line


class NumericalFailure(NSWSUError, RuntimeError):
    """NaN/Inf appeared in a field."""

    def __init__(self, message, time=None):
        if time is not None:
            message = f"t={time!r}: {message}"
        super().__init__(message)
        self.time = time


class StepFailure(NumericalFailure):
    """A step produced negative density; retry with a smaller dt."""


class BudgetError(NSWSUError, RuntimeError):
    """Step or memory budget exhausted. ``trajectory`` holds the partial run, if any."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
