"""Exception types raised at pipeline stage boundaries."""

from __future__ import annotations

from .diagnostics import Diagnostic


class DiagnosticError(Exception):
    """An operation was handed input that its precondition rules out."""

    def __init__(self, message: str, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        detail = "; ".join(d.message for d in self.diagnostics[:3])
        if len(self.diagnostics) > 3:
            detail += f"; ... ({len(self.diagnostics)} total)"
        super().__init__(f"{message}: {detail}" if detail else message)


class InvalidWorkflowError(DiagnosticError):
    """Workflow failed validation and cannot be transformed."""


class IllFormedGraphError(DiagnosticError):
    """BPMN graph failed the well-formedness gate."""


class VerificationError(Exception):
    """The verifier cannot interpret the graph (e.g. missing gateway pairing)."""
