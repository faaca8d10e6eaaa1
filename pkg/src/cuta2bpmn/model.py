"""In-memory model of block-structured CUTA4BPM workflows.

A workflow is a named process owned by a company. Its body is a tree of
control-flow blocks: the atomic SimpleActivity card (a subject/action/object
sentence plus role, documents, location and time limit) and the composite
blocks Sequence, Case, Parallel, MultipleChoice and Loop. Roles belong to
organizational units; documents are shared entities referenced by name from
the activities that read or write them.

All types are immutable after construction and safe to share between
threads. Validation is a pure function returning diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Union

from .diagnostics import Diagnostic, error

Block = Union[
    "SimpleActivity", "Sequence", "Case", "Parallel", "MultipleChoice", "Loop"
]


class ConditionPosition(Enum):
    BEGIN = "begin"
    END = "end"


@dataclass(frozen=True)
class SimpleActivity:
    """One activity card: who does what to what, in which role."""

    subject: str
    action: str
    object: str
    role: str
    documents_in: tuple[str, ...] = ()
    documents_out: tuple[str, ...] = ()
    location: str | None = None
    time_limit: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "documents_in", tuple(self.documents_in))
        object.__setattr__(self, "documents_out", tuple(self.documents_out))

    @property
    def sentence(self) -> str:
        return f"{self.subject} {self.action} {self.object}"


@dataclass(frozen=True)
class SequenceElement:
    seq_no: int
    block: Block


@dataclass(frozen=True)
class Sequence:
    """Blocks executed one after the other, numbered 1..k."""

    elements: tuple[SequenceElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))


@dataclass(frozen=True)
class CaseItem:
    number: int
    condition: str
    body: Block


@dataclass(frozen=True)
class Case:
    """Exactly one of the alternatives runs, picked by its condition."""

    items: tuple[CaseItem, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class Parallel:
    """All branches run concurrently."""

    branches: tuple[Block, ...]

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))


@dataclass(frozen=True)
class ChoiceOption:
    condition: str
    body: Block


@dataclass(frozen=True)
class MultipleChoice:
    """One or more of the options run, each guarded by its condition."""

    options: tuple[ChoiceOption, ...]

    def __post_init__(self):
        object.__setattr__(self, "options", tuple(self.options))


@dataclass(frozen=True)
class Loop:
    """Repeat the body; the condition sits at the beginning or the end."""

    condition: str
    position: ConditionPosition
    body: Block


@dataclass(frozen=True)
class Document:
    name: str


@dataclass(frozen=True)
class Role:
    name: str
    unit: str


@dataclass(frozen=True)
class OrganizationalUnit:
    name: str
    roles: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "roles", tuple(sorted(self.roles)))


@dataclass(frozen=True)
class CutaWorkflow:
    """A complete process: metadata, the block tree, and the shared entities.

    documents and org_units are kept sorted by name so that structurally
    equal workflows compare equal regardless of construction order.
    """

    name: str
    company: str
    root: Block
    documents: tuple[Document, ...] = ()
    org_units: tuple[OrganizationalUnit, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "documents", tuple(sorted(self.documents, key=lambda d: d.name))
        )
        object.__setattr__(
            self, "org_units", tuple(sorted(self.org_units, key=lambda u: u.name))
        )

    def role_units(self) -> dict[str, str]:
        """Map each role name to its unit (first unit wins on conflicts)."""
        mapping: dict[str, str] = {}
        for unit in self.org_units:
            for role in unit.roles:
                mapping.setdefault(role, unit.name)
        return mapping

    def roles(self) -> tuple[Role, ...]:
        return tuple(
            Role(name, unit) for name, unit in sorted(self.role_units().items())
        )


_KINDS = {
    SimpleActivity: "activity",
    Sequence: "sequence",
    Case: "case",
    Parallel: "parallel",
    MultipleChoice: "multichoice",
    Loop: "loop",
}

BLOCK_KINDS = tuple(_KINDS.values())


def kind_of(block: Block) -> str:
    """The stable kind string of a block ("activity", "sequence", ...)."""
    return _KINDS[type(block)]


def child_blocks(block: Block) -> tuple[tuple[str, Block], ...]:
    """Children of a block paired with their path suffix.

    Sequence children are addressed by bare SeqNo; other composites prefix
    the suffix with their kind, e.g. root/2/case/1 is item 1 of the case
    that is element 2 of the root sequence.
    """
    if isinstance(block, Sequence):
        return tuple((str(e.seq_no), e.block) for e in block.elements)
    if isinstance(block, Case):
        return tuple((f"case/{it.number}", it.body) for it in block.items)
    if isinstance(block, Parallel):
        return tuple(
            (f"parallel/{i}", b) for i, b in enumerate(block.branches, start=1)
        )
    if isinstance(block, MultipleChoice):
        return tuple(
            (f"multichoice/{i}", o.body) for i, o in enumerate(block.options, start=1)
        )
    if isinstance(block, Loop):
        return (("loop", block.body),)
    return ()


def iter_blocks(root: Block, base: str = "root") -> Iterator[tuple[str, Block]]:
    """Yield (path, block) for the whole tree in preorder."""
    yield base, root
    for suffix, child in child_blocks(root):
        yield from iter_blocks(child, f"{base}/{suffix}")


def iter_activities(root: Block) -> Iterator[SimpleActivity]:
    for _, block in iter_blocks(root):
        if isinstance(block, SimpleActivity):
            yield block


def referenced_roles(root: Block) -> list[str]:
    """Role names in first-use order, deduplicated."""
    seen: list[str] = []
    for act in iter_activities(root):
        if act.role and act.role not in seen:
            seen.append(act.role)
    return seen


def referenced_documents(root: Block) -> list[str]:
    """Document names in first-use order, deduplicated."""
    seen: list[str] = []
    for act in iter_activities(root):
        for name in (*act.documents_in, *act.documents_out):
            if name and name not in seen:
                seen.append(name)
    return seen


def validate_workflow(workflow: CutaWorkflow) -> list[Diagnostic]:
    """Check every structural invariant; empty result means valid.

    Diagnostics are returned in path-lexicographic order and each names one
    violated rule at one tree path. Workflow-level problems use the path
    "workflow".
    """
    diags: list[Diagnostic] = []

    def flag(message: str, path: str) -> None:
        diags.append(error(message, path=path))

    if not workflow.name:
        flag("workflow name must be non-empty", "workflow")
    if not workflow.company:
        flag("company must be non-empty", "workflow")

    doc_names: set[str] = set()
    for doc in workflow.documents:
        if not doc.name:
            flag("document name must be non-empty", "workflow")
        elif doc.name in doc_names:
            flag(f"duplicate document '{doc.name}'", "workflow")
        else:
            doc_names.add(doc.name)

    unit_names: set[str] = set()
    role_owner: dict[str, str] = {}
    for unit in workflow.org_units:
        if not unit.name:
            flag("organizational unit name must be non-empty", "workflow")
        elif unit.name in unit_names:
            flag(f"duplicate organizational unit '{unit.name}'", "workflow")
        else:
            unit_names.add(unit.name)
        for role in unit.roles:
            if not role:
                flag(f"role name in unit '{unit.name}' must be non-empty", "workflow")
            elif role in role_owner:
                flag(
                    f"role '{role}' belongs to more than one organizational unit",
                    "workflow",
                )
            else:
                role_owner[role] = unit.name

    for path, block in iter_blocks(workflow.root):
        if isinstance(block, SimpleActivity):
            _validate_activity(block, path, role_owner, doc_names, flag)
        elif isinstance(block, Sequence):
            if not block.elements:
                flag("sequence must contain at least one element", path)
            elif [e.seq_no for e in block.elements] != list(
                range(1, len(block.elements) + 1)
            ):
                flag("SeqNo must be contiguous 1..k", path)
        elif isinstance(block, Case):
            if len(block.items) < 2:
                flag("case requires at least 2 items", path)
            if block.items and [it.number for it in block.items] != list(
                range(1, len(block.items) + 1)
            ):
                flag("case item numbers must be contiguous 1..k", path)
            for item in block.items:
                if not item.condition:
                    flag(
                        "case condition must be non-empty",
                        f"{path}/case/{item.number}",
                    )
        elif isinstance(block, Parallel):
            if len(block.branches) < 2:
                flag("parallel requires ≥2 branches", path)
        elif isinstance(block, MultipleChoice):
            if len(block.options) < 2:
                flag("multichoice requires at least 2 options", path)
            for i, option in enumerate(block.options, start=1):
                if not option.condition:
                    flag(
                        "multichoice option condition must be non-empty",
                        f"{path}/multichoice/{i}",
                    )
        elif isinstance(block, Loop):
            if not block.condition:
                flag("loop condition must be non-empty", path)

    diags.sort(key=lambda d: (d.path or "", d.message))
    return diags


def _validate_activity(act, path, role_owner, doc_names, flag) -> None:
    if not act.subject:
        flag("subject must be non-empty", path)
    if not act.action:
        flag("action must be non-empty", path)
    if not act.object:
        flag("object must be non-empty", path)
    if not act.role:
        flag("role must be non-empty", path)
    elif act.role not in role_owner:
        flag(f"unknown role '{act.role}'", path)
    for label, names in (("input", act.documents_in), ("output", act.documents_out)):
        seen: set[str] = set()
        for name in names:
            if name in seen:
                flag(f"duplicate {label} document '{name}'", path)
            seen.add(name)
            if name not in doc_names:
                flag(f"unknown document '{name}'", path)


def assemble_workflow(
    name: str,
    company: str,
    root: Block,
    role_units: dict[str, str],
) -> tuple[CutaWorkflow | None, list[Diagnostic]]:
    """Build a workflow from a parsed tree plus the role/unit bindings.

    The document set and the organizational units are derived from the
    references inside the tree, which is all the textual forms can express.
    Returns (workflow, []) or (None, diagnostics) when a referenced role was
    never bound to a unit.
    """
    diags: list[Diagnostic] = []
    units: dict[str, list[str]] = {}
    for role in referenced_roles(root):
        unit = role_units.get(role)
        if unit is None:
            diags.append(error(f"role '{role}' has no organizational unit"))
        else:
            units.setdefault(unit, []).append(role)
    if diags:
        return None, diags
    workflow = CutaWorkflow(
        name=name,
        company=company,
        root=root,
        documents=tuple(Document(n) for n in referenced_documents(root)),
        org_units=tuple(
            OrganizationalUnit(u, tuple(rs)) for u, rs in units.items()
        ),
    )
    return workflow, []
