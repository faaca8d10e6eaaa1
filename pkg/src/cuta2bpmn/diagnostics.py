"""Diagnostics shared by the frontend, validator and graph checkers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    """Half-open region of a source file, 1-based lines and columns."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    message: str
    span: SourceSpan | None = None
    path: str | None = None

    def render(self) -> str:
        where = ""
        if self.span is not None:
            where = f" [{self.span}]"
        elif self.path is not None:
            where = f" [{self.path}]"
        return f"{self.severity.value}: {self.message}{where}"


def error(message: str, span: SourceSpan | None = None, path: str | None = None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, message, span, path)
