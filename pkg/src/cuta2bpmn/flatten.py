"""Recursive flattening of block trees into BPMN graphs.

Every block maps to a subgraph with designated entry and exit nodes; nested
blocks become subgraphs of subgraphs, so the result is a flat graph with no
hierarchy. Per-kind patterns:

  activity     -> one task (entry = exit); lane per role, data objects per
                  document, both deduplicated
  sequence     -> children chained with k-1 flows
  case         -> exclusive split/join pair, item conditions on the split's
                  outgoing flows
  parallel     -> parallel split/join pair, no conditions
  multichoice  -> inclusive split/join pair, option conditions on the
                  split's outgoing flows
  loop         -> an exclusive gateway pair G1/G2. Condition at the
                  beginning: G1 -> body (condition), body -> G1 loopback,
                  G1 -> G2 direct flow ("not (<condition>)"); G1 is both
                  merge and split. Condition at the end: G1 -> body,
                  body -> G2, G2 -> G1 loopback (condition), and the exit
                  flow that the parent creates from G2 carries
                  "not (<condition>)".

Ids are deterministic preorder counters with kind prefixes (task_1, gw_x_2,
sf_3, ...), so equal inputs produce byte-identical output downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

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
)
from .errors import InvalidWorkflowError
from .model import (
    Block,
    Case,
    ConditionPosition,
    CutaWorkflow,
    Loop,
    MultipleChoice,
    Parallel,
    Sequence,
    SimpleActivity,
    child_blocks,
    validate_workflow,
)

_ID_PREFIX = {
    NodeKind.START_EVENT: "start",
    NodeKind.END_EVENT: "end",
    NodeKind.TASK: "task",
    NodeKind.EXCLUSIVE_GATEWAY: "gw_x",
    NodeKind.PARALLEL_GATEWAY: "gw_p",
    NodeKind.INCLUSIVE_GATEWAY: "gw_i",
}


@dataclass(frozen=True)
class Subgraph:
    """Handles of a mapped block: its entry node, its exit node, and an
    optional condition the parent must place on the flow leaving the exit
    (used by loops with the condition at the end)."""

    entry: str
    exit: str
    exit_condition: str | None = None


@dataclass
class TransformContext:
    """Accumulates the growing graph and hands out deterministic ids."""

    nodes: list[FlowNode] = field(default_factory=list)
    flows: list[SequenceFlow] = field(default_factory=list)
    data_objects: list[DataObject] = field(default_factory=list)
    data_assocs: list[DataAssociation] = field(default_factory=list)
    gateway_pairs: dict[str, str] = field(default_factory=dict)
    lanes: list[str] = field(default_factory=list)
    _counters: dict[str, int] = field(default_factory=dict)
    _doc_ids: dict[str, str] = field(default_factory=dict)

    def new_id(self, prefix: str) -> str:
        n = self._counters.get(prefix, 0) + 1
        self._counters[prefix] = n
        return f"{prefix}_{n}"

    def add_node(
        self,
        kind: NodeKind,
        label: str = "",
        lane: str | None = None,
        documentation: str | None = None,
    ) -> str:
        node_id = self.new_id(_ID_PREFIX[kind])
        self.nodes.append(FlowNode(node_id, kind, label, lane, documentation))
        return node_id

    def add_flow(self, source: str, target: str, condition: str | None = None) -> str:
        flow_id = self.new_id("sf")
        self.flows.append(SequenceFlow(flow_id, source, target, condition))
        return flow_id

    def connect(self, sub: Subgraph, target: str) -> str:
        """Create the flow leaving a subgraph, honoring its exit condition."""
        return self.add_flow(sub.exit, target, sub.exit_condition)

    def lane_for(self, role: str) -> str:
        if role not in self.lanes:
            self.lanes.append(role)
        return role

    def data_object_for(self, name: str) -> str:
        existing = self._doc_ids.get(name)
        if existing is not None:
            return existing
        object_id = self.new_id("do")
        self._doc_ids[name] = object_id
        self.data_objects.append(DataObject(object_id, name))
        return object_id


def transform_workflow(workflow: CutaWorkflow) -> BpmnDefinitions:
    """Flatten a valid workflow into a BPMN definitions graph.

    Pure and deterministic, ids included. Raises InvalidWorkflowError when
    validation reports diagnostics.
    """
    diags = validate_workflow(workflow)
    if diags:
        raise InvalidWorkflowError("workflow failed validation", diags)
    ctx = TransformContext()
    start = ctx.add_node(NodeKind.START_EVENT)
    root = map_block(workflow.root, ctx)
    end = ctx.add_node(NodeKind.END_EVENT)
    ctx.add_flow(start, root.entry)
    ctx.connect(root, end)
    process = BpmnProcess(
        nodes=ctx.nodes,
        flows=ctx.flows,
        data_objects=ctx.data_objects,
        data_assocs=ctx.data_assocs,
        gateway_pairs=ctx.gateway_pairs,
    )
    return BpmnDefinitions(
        process=process,
        pool_name=workflow.company,
        lanes=[Lane(role) for role in ctx.lanes],
    )


def map_block(block: Block, ctx: TransformContext) -> Subgraph:
    """Dispatch a block to its pattern; returns its entry/exit handles."""
    if isinstance(block, SimpleActivity):
        return map_activity(block, ctx)
    if isinstance(block, Sequence):
        return map_sequence(block, ctx)
    if isinstance(block, Case):
        return map_case(block, ctx)
    if isinstance(block, Parallel):
        return map_parallel(block, ctx)
    if isinstance(block, MultipleChoice):
        return map_multichoice(block, ctx)
    assert isinstance(block, Loop)
    return map_loop(block, ctx)


def map_activity(activity: SimpleActivity, ctx: TransformContext) -> Subgraph:
    """One task in the role's lane, wired to its documents' data objects."""
    notes = []
    if activity.location is not None:
        notes.append(f"location: {activity.location}")
    if activity.time_limit is not None:
        notes.append(f"time_limit: {activity.time_limit}")
    task = ctx.add_node(
        NodeKind.TASK,
        label=activity.sentence,
        lane=ctx.lane_for(activity.role),
        documentation="; ".join(notes) or None,
    )
    for name in activity.documents_in:
        data = ctx.data_object_for(name)
        ctx.data_assocs.append(
            DataAssociation(ctx.new_id("da"), DataDirection.INPUT, task, data)
        )
    for name in activity.documents_out:
        data = ctx.data_object_for(name)
        ctx.data_assocs.append(
            DataAssociation(ctx.new_id("da"), DataDirection.OUTPUT, task, data)
        )
    return Subgraph(entry=task, exit=task)


def map_sequence(sequence: Sequence, ctx: TransformContext) -> Subgraph:
    subs: list[Subgraph] = []
    for element in sequence.elements:  # already in SeqNo order for valid input
        sub = map_block(element.block, ctx)
        if subs:
            ctx.connect(subs[-1], sub.entry)
        subs.append(sub)
    return Subgraph(
        entry=subs[0].entry,
        exit=subs[-1].exit,
        exit_condition=subs[-1].exit_condition,
    )


def map_case(case: Case, ctx: TransformContext) -> Subgraph:
    return _map_branching(
        ctx,
        NodeKind.EXCLUSIVE_GATEWAY,
        [(item.condition, item.body) for item in case.items],
    )


def map_parallel(parallel: Parallel, ctx: TransformContext) -> Subgraph:
    return _map_branching(
        ctx, NodeKind.PARALLEL_GATEWAY, [(None, b) for b in parallel.branches]
    )


def map_multichoice(choice: MultipleChoice, ctx: TransformContext) -> Subgraph:
    return _map_branching(
        ctx,
        NodeKind.INCLUSIVE_GATEWAY,
        [(option.condition, option.body) for option in choice.options],
    )


def _map_branching(
    ctx: TransformContext,
    kind: NodeKind,
    branches: list[tuple[str | None, Block]],
) -> Subgraph:
    """Split/join gateway pair with one conditioned (or plain) flow per
    branch into the body and one unconditioned flow out to the join."""
    split = ctx.add_node(kind)
    join = ctx.add_node(kind)
    ctx.gateway_pairs[split] = join
    for condition, body in branches:
        sub = map_block(body, ctx)
        ctx.add_flow(split, sub.entry, condition)
        ctx.connect(sub, join)
    return Subgraph(entry=split, exit=join)


def map_loop(loop: Loop, ctx: TransformContext) -> Subgraph:
    gate_in = ctx.add_node(NodeKind.EXCLUSIVE_GATEWAY)
    gate_out = ctx.add_node(NodeKind.EXCLUSIVE_GATEWAY)
    ctx.gateway_pairs[gate_in] = gate_out
    body = map_block(loop.body, ctx)
    negated = f"not ({loop.condition})"
    if loop.position is ConditionPosition.BEGIN:
        ctx.add_flow(gate_in, body.entry, loop.condition)
        ctx.connect(body, gate_in)  # loopback re-evaluates the condition
        ctx.add_flow(gate_in, gate_out, negated)
        return Subgraph(entry=gate_in, exit=gate_out)
    ctx.add_flow(gate_in, body.entry)
    ctx.connect(body, gate_out)
    ctx.add_flow(gate_out, gate_in, loop.condition)
    return Subgraph(entry=gate_in, exit=gate_out, exit_condition=negated)


def block_counts(block: Block) -> tuple[int, int]:
    """Expected (nodes, internal flows) of a block's subgraph.

    Structural recursion used by `stats` and as the census oracle:
    activities contribute (1, 0); a sequence adds k-1 connecting flows;
    branching blocks add a gateway pair and 2 flows per branch; a loop adds
    a gateway pair and 3 flows. The whole graph is (N(root)+2, E(root)+2)
    counting the events and their two flows.
    """
    if isinstance(block, SimpleActivity):
        return 1, 0
    children = [block_counts(child) for _, child in child_blocks(block)]
    nodes = sum(n for n, _ in children)
    flows = sum(e for _, e in children)
    if isinstance(block, Sequence):
        return nodes, flows + max(len(children) - 1, 0)
    if isinstance(block, Loop):
        return nodes + 2, flows + 3
    return nodes + 2, flows + 2 * len(children)
