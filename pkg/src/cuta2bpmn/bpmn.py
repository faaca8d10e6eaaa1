"""BPMN target model: flow nodes, sequence flows, lanes, data objects.

Covers exactly the subset the flattener emits: start/end events, tasks,
exclusive/parallel/inclusive gateways, conditional sequence flows, one pool
with role lanes, and data objects wired to tasks by input/output
associations. gateway_pairs records which join closes which split; it is
metadata for the verifier and is never serialized.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .diagnostics import Diagnostic, error


class NodeKind(Enum):
    START_EVENT = "startEvent"
    END_EVENT = "endEvent"
    TASK = "task"
    EXCLUSIVE_GATEWAY = "exclusiveGateway"
    PARALLEL_GATEWAY = "parallelGateway"
    INCLUSIVE_GATEWAY = "inclusiveGateway"


GATEWAY_KINDS = frozenset(
    {NodeKind.EXCLUSIVE_GATEWAY, NodeKind.PARALLEL_GATEWAY, NodeKind.INCLUSIVE_GATEWAY}
)

CONDITIONAL_SOURCE_KINDS = frozenset(
    {NodeKind.EXCLUSIVE_GATEWAY, NodeKind.INCLUSIVE_GATEWAY}
)


class DataDirection(Enum):
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True)
class FlowNode:
    id: str
    kind: NodeKind
    label: str = ""
    lane: str | None = None
    documentation: str | None = None


@dataclass(frozen=True)
class SequenceFlow:
    id: str
    source: str
    target: str
    condition: str | None = None


@dataclass(frozen=True)
class DataObject:
    id: str
    name: str


@dataclass(frozen=True)
class DataAssociation:
    id: str
    direction: DataDirection
    task: str
    data: str


@dataclass(frozen=True)
class Lane:
    name: str


@dataclass
class BpmnProcess:
    nodes: list[FlowNode] = field(default_factory=list)
    flows: list[SequenceFlow] = field(default_factory=list)
    data_objects: list[DataObject] = field(default_factory=list)
    data_assocs: list[DataAssociation] = field(default_factory=list)
    gateway_pairs: dict[str, str] = field(default_factory=dict)

    def node_by_id(self) -> dict[str, FlowNode]:
        return {n.id: n for n in self.nodes}


@dataclass
class BpmnDefinitions:
    process: BpmnProcess
    pool_name: str
    lanes: list[Lane] = field(default_factory=list)


def check_well_formed(defs: BpmnDefinitions) -> list[Diagnostic]:
    """Structural gate for any constructed graph; empty result means clean.

    Beyond the local type invariants, every node must lie on some directed
    path from the start event to the end event; reachability is computed
    exactly in both directions.
    """
    diags: list[Diagnostic] = []
    process = defs.process

    def flag(message: str, where: str | None = None) -> None:
        diags.append(error(message, path=where))

    if not defs.pool_name:
        flag("pool name must be non-empty")

    lane_names: set[str] = set()
    for lane in defs.lanes:
        if not lane.name:
            flag("lane name must be non-empty")
        elif lane.name in lane_names:
            flag(f"duplicate lane name '{lane.name}'")
        else:
            lane_names.add(lane.name)

    ids: set[str] = set()
    for element_id in (
        [n.id for n in process.nodes]
        + [f.id for f in process.flows]
        + [d.id for d in process.data_objects]
        + [a.id for a in process.data_assocs]
    ):
        if not element_id:
            flag("element id must be non-empty")
        elif element_id in ids:
            flag(f"duplicate id '{element_id}'", element_id)
        else:
            ids.add(element_id)

    nodes = process.node_by_id()
    starts = [n for n in process.nodes if n.kind is NodeKind.START_EVENT]
    ends = [n for n in process.nodes if n.kind is NodeKind.END_EVENT]
    if len(starts) != 1:
        flag(f"exactly one start event required (found {len(starts)})")
    if len(ends) != 1:
        flag(f"exactly one end event required (found {len(ends)})")

    for node in process.nodes:
        if node.kind is NodeKind.TASK:
            if not node.lane:
                flag(f"task '{node.id}' must have a lane", node.id)
            elif node.lane not in lane_names:
                flag(f"task '{node.id}' references undeclared lane '{node.lane}'", node.id)
        elif node.lane is not None:
            flag(f"event or gateway '{node.id}' must not have a lane", node.id)

    out_degree: dict[str, int] = {}
    for flow in process.flows:
        for endpoint in (flow.source, flow.target):
            if endpoint not in nodes:
                flag(f"flow '{flow.id}' references unknown node '{endpoint}'", flow.id)
        if flow.source == flow.target:
            flag(f"flow '{flow.id}' is a self-loop", flow.id)
        out_degree[flow.source] = out_degree.get(flow.source, 0) + 1

    for flow in process.flows:
        if flow.condition is None or flow.source not in nodes:
            continue
        source = nodes[flow.source]
        if source.kind not in CONDITIONAL_SOURCE_KINDS:
            flag(
                f"condition on flow '{flow.id}' whose source '{flow.source}' "
                "is not an exclusive or inclusive gateway",
                flow.id,
            )
        elif out_degree.get(flow.source, 0) < 2:
            flag(
                f"condition on flow '{flow.id}' whose source '{flow.source}' "
                "is not a split (it has a single outgoing flow)",
                flow.id,
            )

    for split_id, join_id in process.gateway_pairs.items():
        if split_id not in nodes or join_id not in nodes:
            flag(f"gateway pair ({split_id} -> {join_id}) references an unknown node")
            continue
        split, join = nodes[split_id], nodes[join_id]
        if split_id == join_id:
            flag(f"gateway pair maps '{split_id}' to itself")
        if split.kind not in GATEWAY_KINDS or join.kind not in GATEWAY_KINDS:
            flag(f"gateway pair ({split_id} -> {join_id}) includes a non-gateway node")
        elif split.kind is not join.kind:
            flag(f"gateway pair ({split_id} -> {join_id}) mixes gateway kinds")

    object_names: set[str] = set()
    object_ids = {d.id for d in process.data_objects}
    for data_object in process.data_objects:
        if data_object.name in object_names:
            flag(f"duplicate data object name '{data_object.name}'", data_object.id)
        object_names.add(data_object.name)
    task_ids = {n.id for n in process.nodes if n.kind is NodeKind.TASK}
    for assoc in process.data_assocs:
        if assoc.task not in task_ids:
            flag(f"data association '{assoc.id}' references unknown task '{assoc.task}'", assoc.id)
        if assoc.data not in object_ids:
            flag(f"data association '{assoc.id}' references unknown data object '{assoc.data}'", assoc.id)

    if len(starts) == 1 and len(ends) == 1:
        forward = _closure(process.flows, starts[0].id, lambda f: (f.source, f.target))
        backward = _closure(process.flows, ends[0].id, lambda f: (f.target, f.source))
        for node in process.nodes:
            if node.id not in forward or node.id not in backward:
                flag(f"node '{node.id}' not on start→end path", node.id)

    return diags


def _closure(flows, origin: str, orient) -> set[str]:
    adjacency: dict[str, list[str]] = {}
    for flow in flows:
        src, dst = orient(flow)
        adjacency.setdefault(src, []).append(dst)
    seen = {origin}
    queue = deque([origin])
    while queue:
        for nxt in adjacency.get(queue.popleft(), ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen
