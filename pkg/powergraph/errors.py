"""Exceptions raised by the powergraph package."""

from pathlib import Path


class PowerGraphError(Exception):
    """Base class for all errors raised by powergraph."""


class GraphError(PowerGraphError):
    """The input is not a simple directed graph."""


class HierarchyError(PowerGraphError):
    """A module operation would break the module hierarchy."""


class DegenerateModuleError(PowerGraphError):
    """A module was requested with fewer than two members."""


class SizeLimitError(PowerGraphError):
    """An exact method was asked to work on a graph above its size cap."""


class PreconditionError(PowerGraphError):
    """Arguments of an operation violate its documented preconditions."""


class VerificationError(PowerGraphError):
    """A stored solution does not describe its graph."""

    def __init__(self, problems: list[str]) -> None:
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ParseError(PowerGraphError):
    """Malformed input text.

    Parameters
    ----------
    message : str
        What went wrong.
    line : int, optional
        1-based line number of the offending line.
    path : Path, optional
        File the text was read from.
    """

    def __init__(
        self,
        message: str,
        line: int | None = None,
        path: Path | str | None = None,
    ) -> None:
        self.message = message
        self.line = line
        self.path = path
        super().__init__(str(self))

    def __str__(self) -> str:
        location = []
        if self.path is not None:
            location.append(str(self.path))
        if self.line is not None:
            location.append(str(self.line))
        if location:
            return f"{':'.join(location)}: {self.message}"
        return self.message


class ConfigError(PowerGraphError):
    """A configuration file that cannot be read as sections of settings."""

    def __init__(self, message: str, path: Path | str) -> None:
        self.path = path
        super().__init__(f"{path}: {message}")
