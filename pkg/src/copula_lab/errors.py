"""Semantic exception types shared across the package."""


class CopulaLabError(Exception):
    """Base class for all errors raised by this package."""


class InputError(CopulaLabError, ValueError):
    """An argument or parameter violates its contract."""


class DomainError(CopulaLabError, ValueError):
    """An evaluation was requested outside the function's domain."""


class ConfigError(CopulaLabError, ValueError):
    """An experiment configuration document is invalid; message names the field."""


class DegenerateSampleError(CopulaLabError, ValueError):
    """A sample has no variation where variation is required (e.g. zero variance)."""


class DegenerateTransformError(InputError):
    """A transform cannot support the requested claim (e.g. affine slope zero)."""


class CsvFormatError(InputError):
    """A CSV input is malformed; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
