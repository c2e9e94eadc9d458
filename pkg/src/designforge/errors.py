"""Exception types shared across the package."""

from __future__ import annotations


class DesignforgeError(Exception):
    """Base class for all package errors."""


class InvalidPermutationError(DesignforgeError, ValueError):
    """Images do not describe a bijection, or degrees do not match."""


class ResourceLimitError(DesignforgeError, RuntimeError):
    """A configured cap on subsets, orbit size or work was exceeded.

    Carries the name of the limit and the value that tripped it so
    callers can report actionable messages.
    """

    def __init__(self, limit_name: str, limit: int, observed: int):
        self.limit_name = limit_name
        self.limit = limit
        self.observed = observed
        super().__init__(
            f"{limit_name} cap exceeded: needed {observed}, cap is {limit}"
        )


class ConsistencyError(DesignforgeError, RuntimeError):
    """An internal invariant failed; indicates a bug or corrupt input."""


class VerificationError(DesignforgeError, RuntimeError):
    """A claimed design property did not hold under exact counting."""


class IngestError(DesignforgeError, ValueError):
    """A generator file or registry entry could not be parsed or validated.

    line/column are 1-based positions into the offending source when known.
    """

    def __init__(self, message: str, *, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)
