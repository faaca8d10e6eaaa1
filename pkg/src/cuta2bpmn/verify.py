"""Token-game soundness verification of BPMN graphs.

Explores every reachable marking from one token on the start event's
outgoing flow. Firing rules: tasks and events consume a token from one
incoming flow and produce one on each outgoing flow; exclusive gateways
route one token one way (every choice is explored); parallel gateways
synchronize all incoming and fork all outgoing; inclusive splits activate
every non-empty subset of their outgoing flows; an inclusive join fires
exactly when the branches activated at its paired split (gateway_pairs)
have all arrived. Branch correspondence is positional: the i-th outgoing
flow of the split pairs with the i-th incoming flow of the join, both in
flow creation order.

Violations: Deadlock (a non-final marking with nothing enabled),
ImproperCompletion (the end event consumes while other tokens remain, or
completes twice), DeadNode (a node that fires in no exploration), and
StateExplosion (the state cap, or a token count beyond one byte, was hit;
the verdict is then inconclusive rather than a guarantee).

Two interchangeable engines exist: a compiled kernel (cuta2bpmn._tokengame,
built with Cython) and a pure-Python twin (_tokengame_py). The compiled one
is selected automatically when importable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from . import _tokengame_py
from .bpmn import BpmnDefinitions, NodeKind, check_well_formed
from .errors import IllFormedGraphError, VerificationError

try:
    from . import _tokengame  # compiled at install time when possible
except ImportError:  # pragma: no cover - depends on build environment
    _tokengame = None

_KIND_CODE = {
    NodeKind.START_EVENT: 0,
    NodeKind.END_EVENT: 1,
    NodeKind.TASK: 2,
    NodeKind.EXCLUSIVE_GATEWAY: 3,
    NodeKind.PARALLEL_GATEWAY: 4,
    NodeKind.INCLUSIVE_GATEWAY: 5,
}

DEFAULT_STATE_CAP = 1_000_000


class ViolationKind(Enum):
    DEADLOCK = "deadlock"
    IMPROPER_COMPLETION = "improper_completion"
    DEAD_NODE = "dead_node"
    STATE_EXPLOSION = "state_explosion"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    witness: str


@dataclass
class SoundnessReport:
    sound: bool
    violations: list[Violation]
    states_explored: int
    max_flow_tokens: int
    engine: str

    def to_json_dict(self) -> dict:
        return {
            "sound": self.sound,
            "violations": [
                {"kind": v.kind.value, "witness": v.witness} for v in self.violations
            ],
            "states_explored": self.states_explored,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    def __str__(self) -> str:
        lines = [f"sound: {'yes' if self.sound else 'no'}"]
        if self.violations:
            lines.append("violations:")
            lines.extend(f"  - {v.kind.value}: {v.witness}" for v in self.violations)
        lines.append(f"states explored: {self.states_explored}")
        lines.append(f"engine: {self.engine}")
        return "\n".join(lines)


def available_engines() -> tuple[str, ...]:
    return ("python",) if _tokengame is None else ("compiled", "python")


def default_engine() -> str:
    return "python" if _tokengame is None else "compiled"


@dataclass
class _CompiledGraph:
    kinds: bytes
    in_flows: list[tuple[int, ...]]
    out_flows: list[tuple[int, ...]]
    flow_target: tuple[int, ...]
    start: int
    n_flows: int
    incl_slot: dict[int, int]
    incl_join: dict[int, tuple[int, tuple[int, ...]]]
    n_slots: int
    node_ids: list[str]
    flow_ids: list[str]
    slot_node: list[str]


def _compile_graph(defs: BpmnDefinitions) -> _CompiledGraph:
    process = defs.process
    index = {node.id: i for i, node in enumerate(process.nodes)}
    n = len(process.nodes)
    kinds = bytes(_KIND_CODE[node.kind] for node in process.nodes)
    in_flows: list[list[int]] = [[] for _ in range(n)]
    out_flows: list[list[int]] = [[] for _ in range(n)]
    flow_target = []
    for f, flow in enumerate(process.flows):
        out_flows[index[flow.source]].append(f)
        in_flows[index[flow.target]].append(f)
        flow_target.append(index[flow.target])
    start = next(i for i, node in enumerate(process.nodes) if node.kind is NodeKind.START_EVENT)

    incl_slot: dict[int, int] = {}
    incl_join: dict[int, tuple[int, tuple[int, ...]]] = {}
    slot_node: list[str] = []
    inclusive_pairs = sorted(
        (index[s], index[j])
        for s, j in process.gateway_pairs.items()
        if process.nodes[index[s]].kind is NodeKind.INCLUSIVE_GATEWAY
    )
    for split, join in inclusive_pairs:
        if len(out_flows[split]) != len(in_flows[join]):
            raise VerificationError(
                f"inclusive pair {process.nodes[split].id} -> "
                f"{process.nodes[join].id} has mismatched branch counts"
            )
        slot = len(slot_node)
        incl_slot[split] = slot
        incl_join[join] = (slot, tuple(in_flows[join]))
        slot_node.append(process.nodes[split].id)
    for i, node in enumerate(process.nodes):
        if (
            node.kind is NodeKind.INCLUSIVE_GATEWAY
            and i not in incl_join
            and len(in_flows[i]) > 1
        ):
            raise VerificationError(
                f"inclusive join '{node.id}' has no gateway pairing annotation"
            )

    return _CompiledGraph(
        kinds=kinds,
        in_flows=[tuple(v) for v in in_flows],
        out_flows=[tuple(v) for v in out_flows],
        flow_target=tuple(flow_target),
        start=start,
        n_flows=len(process.flows),
        incl_slot=incl_slot,
        incl_join=incl_join,
        n_slots=len(slot_node),
        node_ids=[node.id for node in process.nodes],
        flow_ids=[flow.id for flow in process.flows],
        slot_node=slot_node,
    )


def _render_marking(state: bytes, graph: _CompiledGraph) -> str:
    F = graph.n_flows
    tokens = ", ".join(
        f"{graph.flow_ids[i]}:{state[i]}" for i in range(F) if state[i]
    )
    text = "tokens{" + tokens + "}"
    if state[F]:
        text += f" completed={state[F]}"
    active = []
    for slot, node_id in enumerate(graph.slot_node):
        base = F + 1 + 4 * slot
        mask = (
            state[base]
            | (state[base + 1] << 8)
            | (state[base + 2] << 16)
            | (state[base + 3] << 24)
        )
        if mask:
            branches = ",".join(str(i) for i in range(32) if (mask >> i) & 1)
            active.append(f"{node_id}=[{branches}]")
    if active:
        text += " active{" + " ".join(active) + "}"
    return text


def verify_soundness(
    defs: BpmnDefinitions,
    state_cap: int = DEFAULT_STATE_CAP,
    engine: str | None = None,
) -> SoundnessReport:
    """Run the exhaustive token game and report soundness.

    The graph must be well-formed (IllFormedGraphError otherwise). engine
    is "compiled", "python" or None for the best available one.
    """
    diags = check_well_formed(defs)
    if diags:
        raise IllFormedGraphError("graph is not well-formed", diags)
    engine_name = engine or default_engine()
    if engine_name == "compiled":
        if _tokengame is None:
            raise VerificationError("compiled engine requested but not built")
        impl = _tokengame
    elif engine_name == "python":
        impl = _tokengame_py
    else:
        raise VerificationError(f"unknown engine '{engine_name}'")

    graph = _compile_graph(defs)
    states, exploded, overflowed, fired, max_tokens, deadlocks, impropers = impl.explore(
        graph.kinds,
        graph.in_flows,
        graph.out_flows,
        graph.flow_target,
        graph.start,
        graph.n_flows,
        graph.incl_slot,
        graph.incl_join,
        graph.n_slots,
        state_cap,
    )

    violations = [
        Violation(ViolationKind.DEADLOCK, _render_marking(s, graph)) for s in deadlocks
    ]
    violations += [
        Violation(ViolationKind.IMPROPER_COMPLETION, _render_marking(s, graph))
        for s in impropers
    ]
    if overflowed:
        violations.append(
            Violation(
                ViolationKind.STATE_EXPLOSION,
                "a flow exceeded 255 tokens; the graph appears unbounded",
            )
        )
    elif exploded:
        violations.append(
            Violation(
                ViolationKind.STATE_EXPLOSION,
                f"state cap of {state_cap} reached before exhausting the marking space",
            )
        )
    else:
        # Dead-node analysis is only meaningful after a complete exploration.
        for i, node_id in enumerate(graph.node_ids):
            if not fired[i] and graph.kinds[i] != 0:
                violations.append(Violation(ViolationKind.DEAD_NODE, node_id))

    violations.sort(key=lambda v: (v.kind.value, v.witness))
    return SoundnessReport(
        sound=not violations,
        violations=violations,
        states_explored=states,
        max_flow_tokens=max_tokens,
        engine=engine_name,
    )
