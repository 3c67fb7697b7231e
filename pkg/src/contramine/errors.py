"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: usage problems exit 1 (handled
by argparse), :class:`DataError` subtypes exit 2, and :class:`TransportError`
subtypes exit 3.
"""

from __future__ import annotations


class ContramineError(Exception):
    """Base class for all package errors."""


class DataError(ContramineError):
    """A problem with input data or requested parameters (exit code 2)."""


class ParseError(DataError):
    """Malformed input file. Carries the offending path/line when known."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix += str(path)
        if line is not None:
            prefix += f":{line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ValidationError(DataError):
    """Data violates a documented invariant (duplicate ids, bad ranges, ...)."""


class ConfigError(DataError):
    """Invalid parameter combination for an operation."""


class DivergenceError(DataError):
    """Training produced a non-finite loss."""


class TransportError(ContramineError):
    """A remote scorer backend could not be reached (exit code 3)."""

    def __init__(self, message: str, *, retries: int = 0):
        self.retries = retries
        super().__init__(f"{message} (after {retries} retries)" if retries else message)


class ProtocolError(TransportError):
    """A remote scorer backend answered with a malformed response."""

    def __init__(self, message: str, *, index: int | None = None):
        self.index = index
        if index is not None:
            message = f"{message} (response index {index})"
        super().__init__(message)
