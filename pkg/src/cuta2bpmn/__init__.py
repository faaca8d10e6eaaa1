"""cuta2bpmn: compile block-structured CUTA4BPM models to sound BPMN 2.0.

Pipeline: parse (DSL or JSON) -> validate -> flatten to a BPMN graph ->
emit BPMN 2.0 XML -> verify soundness with an exhaustive token game.
"""

from .bpmn import (
    BpmnDefinitions,
    BpmnProcess,
    DataAssociation,
    DataDirection,
    DataObject,
    FlowNode,
    Lane,
    NodeKind,
    SequenceFlow,
    check_well_formed,
)
from .diagnostics import Diagnostic, Severity, SourceSpan
from .dsl import parse_dsl, print_dsl
from .errors import (
    DiagnosticError,
    IllFormedGraphError,
    InvalidWorkflowError,
    VerificationError,
)
from .flatten import Subgraph, TransformContext, block_counts, map_block, transform_workflow
from .generate import generate_random_workflow
from .jsonio import from_json, to_json
from .model import (
    Block,
    Case,
    CaseItem,
    ChoiceOption,
    ConditionPosition,
    CutaWorkflow,
    Document,
    Loop,
    MultipleChoice,
    OrganizationalUnit,
    Parallel,
    Role,
    Sequence,
    SequenceElement,
    SimpleActivity,
    iter_blocks,
    kind_of,
    validate_workflow,
)
from .verify import (
    SoundnessReport,
    Violation,
    ViolationKind,
    available_engines,
    default_engine,
    verify_soundness,
)
from .xml_emit import emit_xml

__version__ = "0.1.0"

__all__ = [
    "BpmnDefinitions",
    "BpmnProcess",
    "Block",
    "Case",
    "CaseItem",
    "ChoiceOption",
    "ConditionPosition",
    "CutaWorkflow",
    "DataAssociation",
    "DataDirection",
    "DataObject",
    "Diagnostic",
    "DiagnosticError",
    "Document",
    "FlowNode",
    "IllFormedGraphError",
    "InvalidWorkflowError",
    "Lane",
    "Loop",
    "MultipleChoice",
    "NodeKind",
    "OrganizationalUnit",
    "Parallel",
    "Role",
    "Sequence",
    "SequenceElement",
    "SequenceFlow",
    "Severity",
    "SimpleActivity",
    "SoundnessReport",
    "SourceSpan",
    "Subgraph",
    "TransformContext",
    "VerificationError",
    "Violation",
    "ViolationKind",
    "available_engines",
    "block_counts",
    "check_well_formed",
    "default_engine",
    "emit_xml",
    "from_json",
    "generate_random_workflow",
    "iter_blocks",
    "kind_of",
    "map_block",
    "parse_dsl",
    "print_dsl",
    "to_json",
    "transform_workflow",
    "validate_workflow",
    "verify_soundness",
]
