"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class DynabufError(Exception):
    """Base class for every error raised by this package."""


class ProtoParseError(DynabufError):
    """Syntax or semantic error in a ``.proto`` source file."""

    def __init__(self, message: str, filename: str = "<string>",
                 line: int = 0, column: int = 0):
        super().__init__(message)
        self.message = message
        self.filename = filename
        self.line = line
        self.column = column

    def __str__(self) -> str:
        return f"{self.filename}:{self.line}:{self.column}: {self.message}"


class PoolError(DynabufError):
    """Conflicting redefinition, unresolvable import, or dangling type reference."""


class FieldLookupError(DynabufError, LookupError):
    """A field selector (name or tag number) does not resolve on a descriptor."""


class CoercionError(DynabufError, TypeError):
    """A host value cannot be converted to or from a wire field value."""


class WireDecodeError(DynabufError):
    """Malformed binary wire data."""


class TextParseError(DynabufError):
    """Malformed text-format input."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def __str__(self) -> str:
        return f"line {self.line}:{self.column}: {self.message}"


class HistogramError(DynabufError, ValueError):
    """Histogram invariant violation (breaks ordering, length or count bounds)."""
