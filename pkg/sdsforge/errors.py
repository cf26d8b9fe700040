"""Exceptions raised by sdsforge.

Classes:
    SdsforgeError: The base class of every error raised by the package.
    ConfigurationError: A configuration value or combination is invalid.
    ShapeError: Tensor shapes do not conform for an operation.
    NumericError: A computation produced a non-finite value.
    UsageError: An API was called in a way its contract forbids.
    DegenerateScoreError: A guidance score is too small to normalize.
    CheckpointError: A checkpoint file is malformed or has the wrong version.
"""

from __future__ import annotations

from typing import Optional

__all__ = (
    "CheckpointError",
    "ConfigurationError",
    "DegenerateScoreError",
    "NumericError",
    "SdsforgeError",
    "ShapeError",
    "UsageError",
)


class SdsforgeError(Exception):
    """Base class for all sdsforge errors."""


class ConfigurationError(SdsforgeError, ValueError):
    """A configuration value is missing, malformed, or out of range.

    Attributes:
        key: The configuration key at fault, if known.
        line: The 1-based line of the configuration text, if known.
        source: The configuration file, if known.
    """

    def __init__(
        self,
        message: str,
        *,
        key: Optional[str] = None,
        line: Optional[int] = None,
        source: Optional[str] = None,
    ) -> None:
        self.message = message
        self.key = key
        self.line = line
        self.source = source
        super().__init__(self._format())

    def _format(self) -> str:
        if self.source is not None and self.line is not None:
            return f"{self.source}:{self.line}: {self.message}"
        if self.source is not None:
            return f"{self.source}: {self.message}"
        if self.line is not None:
            return f"line {self.line}: {self.message}"
        return self.message


class ShapeError(SdsforgeError, ValueError):
    """Operand shapes do not conform."""


class NumericError(SdsforgeError, ArithmeticError):
    """A non-finite value was produced.

    Attributes:
        iteration: The adaptation iteration in which the value appeared, if the
            error was raised by the adaptation loop.
    """

    def __init__(self, message: str, *, iteration: Optional[int] = None) -> None:
        self.iteration = iteration
        if iteration is not None:
            message = f"iteration {iteration}: {message}"
        super().__init__(message)


class UsageError(SdsforgeError, RuntimeError):
    """An operation was invoked outside of its contract."""


class DegenerateScoreError(SdsforgeError, ArithmeticError):
    """A score tensor has (near) zero norm and cannot be normalized."""


class CheckpointError(SdsforgeError, ValueError):
    """A checkpoint could not be parsed.

    Attributes:
        path: The checkpoint file.
        line: The 1-based line where parsing failed.
    """

    def __init__(self, message: str, *, path: str, line: Optional[int] = None) -> None:
        self.path = path
        self.line = line
        location = f"{path}:{line}" if line is not None else path
        super().__init__(f"{location}: {message}")
