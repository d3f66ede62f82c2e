"""Exception types and the small report record shared by the checkers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class DiffRestError(Exception):
    """Base class for all errors raised by this package."""


class BaseMismatchError(DiffRestError, ValueError):
    pass


class CapExceededError(DiffRestError):
    """An enumeration or closure grew past its configured cap."""


class ClosureError(DiffRestError, ValueError):
    """A supposedly closed collection of partial functions is not closed."""

    def __init__(self, message: str, missing: Any = None):
        super().__init__(message)
        self.missing = missing


class PreconditionError(DiffRestError, ValueError):
    """An operation was called on an input outside its contract."""


class VerificationError(DiffRestError):
    """A property that must hold by construction was found to fail."""


class ParseError(DiffRestError, ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}" if line else message)


@dataclass
class Report:
    """Outcome of an exhaustive check.

    ``failure`` names the first violated condition (in canonical order) and
    ``witness`` holds whatever data reproduces it.  Truthiness is ``ok``.
    """

    ok: bool
    failure: str | None = None
    witness: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "PASS"
        args = ",".join(f"{k}={v}" for k, v in self.witness.items())
        return f"{self.failure} FAIL at ({args})"

    @classmethod
    def passed(cls) -> "Report":
        return cls(True)

    @classmethod
    def failed(cls, failure: str, **witness: Any) -> "Report":
        return cls(False, failure, dict(witness))
