"""JSON interchange for CUTA4BPM workflows.

The canonical form is a single object {"name", "company", "body"} where
body is the root block. Every block carries a "kind" discriminator, one of
"activity", "sequence", "case", "parallel", "multichoice", "loop". An
activity names its role's organizational unit inline ("unit"); documents
and units are re-derived from references on read, mirroring the DSL.
"""

from __future__ import annotations

import json

from .diagnostics import Diagnostic, error
from .model import (
    Block,
    Case,
    CaseItem,
    ChoiceOption,
    ConditionPosition,
    CutaWorkflow,
    Loop,
    MultipleChoice,
    Parallel,
    Sequence,
    SequenceElement,
    SimpleActivity,
    assemble_workflow,
    kind_of,
    validate_workflow,
)

_MAX_NESTING = 200


def to_json(workflow: CutaWorkflow) -> str:
    """Serialize to canonical JSON text (sorted keys, 2-space indent)."""
    role_units = workflow.role_units()
    doc = {
        "name": workflow.name,
        "company": workflow.company,
        "body": _block_dict(workflow.root, role_units),
    }
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _block_dict(block: Block, role_units: dict[str, str]) -> dict:
    kind = kind_of(block)
    if isinstance(block, SimpleActivity):
        out: dict = {
            "kind": kind,
            "subject": block.subject,
            "action": block.action,
            "object": block.object,
            "role": block.role,
            "in": list(block.documents_in),
            "out": list(block.documents_out),
        }
        unit = role_units.get(block.role)
        if unit is not None:
            out["unit"] = unit
        if block.location is not None:
            out["location"] = block.location
        if block.time_limit is not None:
            out["time_limit"] = block.time_limit
        return out
    if isinstance(block, Sequence):
        return {
            "kind": kind,
            "elements": [_block_dict(e.block, role_units) for e in block.elements],
        }
    if isinstance(block, Case):
        return {
            "kind": kind,
            "items": [
                {
                    "number": it.number,
                    "condition": it.condition,
                    "body": _block_dict(it.body, role_units),
                }
                for it in block.items
            ],
        }
    if isinstance(block, Parallel):
        return {
            "kind": kind,
            "branches": [_block_dict(b, role_units) for b in block.branches],
        }
    if isinstance(block, MultipleChoice):
        return {
            "kind": kind,
            "options": [
                {"condition": o.condition, "body": _block_dict(o.body, role_units)}
                for o in block.options
            ],
        }
    assert isinstance(block, Loop)
    return {
        "kind": kind,
        "condition": block.condition,
        "condition_position": block.position.value,
        "body": _block_dict(block.body, role_units),
    }


class _Reader:
    """Strict structural reader: unknown keys and wrong types are errors."""

    def __init__(self):
        self.diags: list[Diagnostic] = []
        self.role_units: dict[str, str] = {}

    def flag(self, message: str, path: str) -> None:
        self.diags.append(error(message, path=path))

    def read_workflow(self, obj) -> tuple[str, str, Block | None]:
        if not isinstance(obj, dict):
            self.flag("top-level value must be an object", "")
            return "", "", None
        self._check_keys(obj, {"name", "company", "body"}, "")
        name = self._string(obj, "name", "")
        company = self._string(obj, "company", "")
        if "body" not in obj:
            self.flag("missing field 'body'", "")
            return name, company, None
        return name, company, self.read_block(obj["body"], "body", 0)

    def read_block(self, obj, path: str, depth: int) -> Block | None:
        if depth > _MAX_NESTING:
            self.flag("nesting too deep", path)
            return None
        if not isinstance(obj, dict):
            self.flag("block must be an object", path)
            return None
        kind = obj.get("kind")
        if kind is None:
            self.flag("missing field 'kind'", path)
            return None
        if kind == "activity":
            return self._read_activity(obj, path)
        if kind == "sequence":
            self._check_keys(obj, {"kind", "elements"}, path)
            items = self._list(obj, "elements", path)
            elements = []
            for i, child in enumerate(items):
                block = self.read_block(child, f"{path}/elements/{i}", depth + 1)
                if block is not None:
                    elements.append(SequenceElement(len(elements) + 1, block))
            return Sequence(tuple(elements))
        if kind == "case":
            self._check_keys(obj, {"kind", "items"}, path)
            parsed = []
            for i, child in enumerate(self._list(obj, "items", path)):
                ipath = f"{path}/items/{i}"
                if not isinstance(child, dict):
                    self.flag("case item must be an object", ipath)
                    continue
                self._check_keys(child, {"number", "condition", "body"}, ipath)
                number = child.get("number")
                if not isinstance(number, int) or isinstance(number, bool):
                    self.flag("case item 'number' must be an integer", ipath)
                    number = i + 1
                condition = self._string(child, "condition", ipath)
                body = (
                    self.read_block(child["body"], f"{ipath}/body", depth + 1)
                    if "body" in child
                    else self.flag("missing field 'body'", ipath)
                )
                if body is not None:
                    parsed.append(CaseItem(number, condition, body))
            return Case(tuple(parsed))
        if kind == "parallel":
            self._check_keys(obj, {"kind", "branches"}, path)
            branches = []
            for i, child in enumerate(self._list(obj, "branches", path)):
                block = self.read_block(child, f"{path}/branches/{i}", depth + 1)
                if block is not None:
                    branches.append(block)
            return Parallel(tuple(branches))
        if kind == "multichoice":
            self._check_keys(obj, {"kind", "options"}, path)
            options = []
            for i, child in enumerate(self._list(obj, "options", path)):
                opath = f"{path}/options/{i}"
                if not isinstance(child, dict):
                    self.flag("multichoice option must be an object", opath)
                    continue
                self._check_keys(child, {"condition", "body"}, opath)
                condition = self._string(child, "condition", opath)
                body = (
                    self.read_block(child["body"], f"{opath}/body", depth + 1)
                    if "body" in child
                    else self.flag("missing field 'body'", opath)
                )
                if body is not None:
                    options.append(ChoiceOption(condition, body))
            return MultipleChoice(tuple(options))
        if kind == "loop":
            self._check_keys(obj, {"kind", "condition", "condition_position", "body"}, path)
            condition = self._string(obj, "condition", path)
            pos_text = obj.get("condition_position")
            if pos_text not in ("begin", "end"):
                self.flag("condition_position must be 'begin' or 'end'", path)
                pos_text = "begin"
            body = (
                self.read_block(obj["body"], f"{path}/body", depth + 1)
                if "body" in obj
                else self.flag("missing field 'body'", path)
            )
            if body is None:
                return None
            return Loop(condition, ConditionPosition(pos_text), body)
        self.flag(f"unknown block kind '{kind}'", path)
        return None

    def _read_activity(self, obj: dict, path: str) -> SimpleActivity:
        allowed = {"kind", "subject", "action", "object", "role", "unit",
                   "in", "out", "location", "time_limit"}
        self._check_keys(obj, allowed, path)
        role = self._string(obj, "role", path)
        unit = obj.get("unit")
        if unit is not None:
            if not isinstance(unit, str):
                self.flag("field 'unit' must be a string", path)
            elif role:
                bound = self.role_units.get(role)
                if bound is None:
                    self.role_units[role] = unit
                elif bound != unit:
                    self.flag(
                        f"role '{role}' is already assigned to unit '{bound}'", path
                    )
        location = obj.get("location")
        if location is not None and not isinstance(location, str):
            self.flag("field 'location' must be a string", path)
            location = None
        time_limit = obj.get("time_limit")
        if time_limit is not None and not isinstance(time_limit, str):
            self.flag("field 'time_limit' must be a string", path)
            time_limit = None
        return SimpleActivity(
            subject=self._string(obj, "subject", path),
            action=self._string(obj, "action", path),
            object=self._string(obj, "object", path),
            role=role,
            documents_in=tuple(self._string_list(obj, "in", path)),
            documents_out=tuple(self._string_list(obj, "out", path)),
            location=location,
            time_limit=time_limit,
        )

    def _check_keys(self, obj: dict, allowed: set[str], path: str) -> None:
        for key in sorted(set(obj) - allowed):
            self.flag(f"unexpected field '{key}'", path)

    def _string(self, obj: dict, key: str, path: str) -> str:
        value = obj.get(key, "")
        if not isinstance(value, str):
            self.flag(f"field '{key}' must be a string", path)
            return ""
        return value

    def _list(self, obj: dict, key: str, path: str) -> list:
        value = obj.get(key, [])
        if not isinstance(value, list):
            self.flag(f"field '{key}' must be an array", path)
            return []
        return value

    def _string_list(self, obj: dict, key: str, path: str) -> list[str]:
        out = []
        for i, value in enumerate(self._list(obj, key, path)):
            if isinstance(value, str):
                out.append(value)
            else:
                self.flag(f"entry {i} of '{key}' must be a string", path)
        return out


def from_json(text: str | bytes) -> CutaWorkflow | list[Diagnostic]:
    """Parse canonical JSON into a validated workflow, or diagnostics."""
    try:
        obj = json.loads(text)
    except (ValueError, UnicodeDecodeError) as exc:
        return [error(f"malformed JSON: {exc}")]
    reader = _Reader()
    name, company, root = reader.read_workflow(obj)
    if reader.diags or root is None:
        return reader.diags or [error("empty workflow body")]
    workflow, diags = assemble_workflow(name, company, root, reader.role_units)
    if workflow is None:
        return diags
    vdiags = validate_workflow(workflow)
    return vdiags if vdiags else workflow
