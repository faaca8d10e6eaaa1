"""Serialize BPMN definitions to BPMN 2.0 interchange XML.

Semantic model only (no diagram interchange). Output is deterministic: a
fixed declaration, 2-space indentation, fixed attribute order, and elements
grouped as events, tasks, gateways, flows, then data elements, each in
creation (id) order. gateway pairing metadata is never serialized.
"""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .bpmn import BpmnDefinitions, DataDirection, NodeKind, check_well_formed
from .errors import IllFormedGraphError

MODEL_NAMESPACE = "http://www.omg.org/spec/BPMN/20100524/MODEL"
_XSI_NAMESPACE = "http://www.w3.org/2001/XMLSchema-instance"
_TARGET_NAMESPACE = "http://cuta2bpmn.example/bpmn"


def emit_xml(defs: BpmnDefinitions) -> str:
    """Render well-formed definitions as BPMN 2.0 XML text.

    Raises IllFormedGraphError when check_well_formed reports diagnostics.
    """
    diags = check_well_formed(defs)
    if diags:
        raise IllFormedGraphError("graph is not well-formed", diags)

    process = defs.process
    w = _Writer()
    w.line('<?xml version="1.0" encoding="UTF-8"?>')
    w.open(
        "definitions",
        [
            ("xmlns", MODEL_NAMESPACE),
            ("xmlns:xsi", _XSI_NAMESPACE),
            ("id", "definitions_1"),
            ("targetNamespace", _TARGET_NAMESPACE),
        ],
    )
    w.open("collaboration", [("id", "collaboration_1")])
    w.leaf(
        "participant",
        [("id", "participant_1"), ("name", defs.pool_name), ("processRef", "process_1")],
    )
    w.close("collaboration")
    w.open("process", [("id", "process_1")])

    if defs.lanes:
        tasks_by_lane: dict[str, list[str]] = {lane.name: [] for lane in defs.lanes}
        for node in process.nodes:
            if node.kind is NodeKind.TASK and node.lane in tasks_by_lane:
                tasks_by_lane[node.lane].append(node.id)
        w.open("laneSet", [("id", "laneSet_1")])
        for i, lane in enumerate(defs.lanes, start=1):
            refs = tasks_by_lane[lane.name]
            if refs:
                w.open("lane", [("id", f"lane_{i}"), ("name", lane.name)])
                for node_id in refs:
                    w.text_leaf("flowNodeRef", node_id)
                w.close("lane")
            else:
                w.leaf("lane", [("id", f"lane_{i}"), ("name", lane.name)])
        w.close("laneSet")

    events = [n for n in process.nodes if n.kind in (NodeKind.START_EVENT, NodeKind.END_EVENT)]
    tasks = [n for n in process.nodes if n.kind is NodeKind.TASK]
    gateways = [n for n in process.nodes if n.kind not in
                (NodeKind.START_EVENT, NodeKind.END_EVENT, NodeKind.TASK)]

    for node in events + gateways:
        attrs = [("id", node.id)]
        if node.label:
            attrs.append(("name", node.label))
        w.leaf(node.kind.value, attrs)

    assocs_by_task: dict[str, list] = {}
    for assoc in process.data_assocs:
        assocs_by_task.setdefault(assoc.task, []).append(assoc)
    for task in tasks:
        attrs = [("id", task.id)]
        if task.label:
            attrs.append(("name", task.label))
        assocs = assocs_by_task.get(task.id, [])
        if task.documentation is None and not assocs:
            w.leaf("task", attrs)
            continue
        w.open("task", attrs)
        if task.documentation is not None:
            w.text_leaf("documentation", task.documentation)
        for assoc in assocs:
            ref = f"{assoc.data}_ref"
            if assoc.direction is DataDirection.INPUT:
                w.open("dataInputAssociation", [("id", assoc.id)])
                w.text_leaf("sourceRef", ref)
                w.text_leaf("targetRef", task.id)
                w.close("dataInputAssociation")
            else:
                w.open("dataOutputAssociation", [("id", assoc.id)])
                w.text_leaf("sourceRef", task.id)
                w.text_leaf("targetRef", ref)
                w.close("dataOutputAssociation")
        w.close("task")

    for flow in process.flows:
        attrs = [("id", flow.id), ("sourceRef", flow.source), ("targetRef", flow.target)]
        if flow.condition is None:
            w.leaf("sequenceFlow", attrs)
        else:
            w.open("sequenceFlow", attrs)
            w.line(
                w.pad() + '<conditionExpression xsi:type="tFormalExpression">'
                + escape(flow.condition)
                + "</conditionExpression>"
            )
            w.close("sequenceFlow")

    for data_object in process.data_objects:
        w.leaf("dataObject", [("id", data_object.id), ("name", data_object.name)])
        w.leaf(
            "dataObjectReference",
            [
                ("id", f"{data_object.id}_ref"),
                ("name", data_object.name),
                ("dataObjectRef", data_object.id),
            ],
        )

    w.close("process")
    w.close("definitions")
    return w.render()


class _Writer:
    """Tiny indenting XML writer with exact, stable formatting."""

    def __init__(self):
        self.lines: list[str] = []
        self.depth = 0

    def pad(self) -> str:
        return "  " * self.depth

    def line(self, text: str) -> None:
        self.lines.append(text)

    def open(self, tag: str, attrs=()) -> None:
        self.lines.append(f"{self.pad()}<{tag}{_render_attrs(attrs)}>")
        self.depth += 1

    def close(self, tag: str) -> None:
        self.depth -= 1
        self.lines.append(f"{self.pad()}</{tag}>")

    def leaf(self, tag: str, attrs=()) -> None:
        self.lines.append(f"{self.pad()}<{tag}{_render_attrs(attrs)}/>")

    def text_leaf(self, tag: str, text: str) -> None:
        self.lines.append(f"{self.pad()}<{tag}>{escape(text)}</{tag}>")

    def render(self) -> str:
        return "\n".join(self.lines) + "\n"


def _render_attrs(attrs) -> str:
    return "".join(f" {name}={quoteattr(value)}" for name, value in attrs)
