"""Exception hierarchy shared by the solver, simulator and file readers."""

from __future__ import annotations


class CloudletDPError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class ValidationError(CloudletDPError, ValueError):
    """An invariant violation, tagged with the field path that caused it."""

    def __init__(self, message: str, path: str = ""):
        self.message = message
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)

    def prefixed(self, prefix: str) -> "ValidationError":
        if not self.path or not prefix:
            path = prefix or self.path
        elif self.path.startswith("["):
            path = prefix + self.path
        else:
            path = f"{prefix}.{self.path}"
        return type(self)(self.message, path)


class InfeasibleTime(ValidationError):
    """Time constraint smaller than the number of nodes in the chain."""


class InvalidScenario(ValidationError):
    pass


class ParseError(CloudletDPError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


class NoFeasibleRoute(CloudletDPError):
    """No route reaches the confidence threshold within the time budget.

    ``best`` is the highest-performance frontier entry seen (or None when the
    frontier is empty) so callers can report how close the search came.
    """

    def __init__(self, message: str, best=None):
        self.best = best
        super().__init__(message)


class TooLarge(CloudletDPError):
    pass
