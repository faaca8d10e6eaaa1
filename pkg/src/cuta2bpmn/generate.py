"""Deterministic random workflow generator for corpus building and tests."""

from __future__ import annotations

import random

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
    Sequence,
    SequenceElement,
    SimpleActivity,
    iter_activities,
    referenced_documents,
    referenced_roles,
)

# Small fixed pools so that roles and documents are shared across activities.
_UNITS: dict[str, tuple[str, ...]] = {
    "Sales": ("Clerk", "Manager"),
    "Support": ("Agent", "Supervisor"),
    "Finance": ("Accountant",),
}
_ROLES = tuple(role for roles in _UNITS.values() for role in roles)
_ROLE_UNIT = {role: unit for unit, roles in _UNITS.items() for role in roles}
_DOCUMENTS = ("Order", "Invoice", "Receipt", "Report", "Contract", "Form")
_SUBJECTS = ("Ann", "Bob", "Carol", "Dave", "Eve")
_ACTIONS = ("files", "reviews", "approves", "signs", "archives", "checks")
_OBJECTS = ("the order", "the invoice", "the report", "the claim", "the request")
_CONDITIONS = (
    "amount exceeds 1000",
    "customer is new",
    "data is valid",
    "approval granted",
    "stock available",
    "deadline missed",
)
_LOCATIONS = ("Office", "Archive", "Front desk")
_TIME_LIMITS = ("2 days", "1 week", "24 hours")
_COMPANIES = ("ACME", "Globex", "Initech", "Umbrella")

_BLOCK_KINDS = ("activity", "sequence", "case", "parallel", "multichoice", "loop")

# Bound on the product of concurrent branch counts along any nesting path.
# Keeps the reachable marking space of every generated model desk-sized so
# the exhaustive verifier never needs to give up on corpus models.
_WIDTH_CAP = 6


def generate_random_workflow(
    seed: int,
    max_depth: int,
    max_fanout: int,
    max_activities: int = 50,
) -> CutaWorkflow:
    """Generate a valid workflow, identical for identical parameters.

    The block kind is drawn uniformly from the kinds feasible at each node:
    the depth limit forces SimpleActivity leaves, an activity budget of
    max_activities bounds total size, and nested concurrency (parallel and
    multichoice blocks) is limited to a branch-count product of 8 so the
    state space stays exhaustively explorable. Branching composites need a
    budget of at least one activity per branch.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if max_fanout < 2:
        raise ValueError("max_fanout must be >= 2")
    if max_activities < 1:
        raise ValueError("max_activities must be >= 1")

    rng = random.Random(seed)
    company = rng.choice(_COMPANIES)
    root, _ = _gen_block(rng, max_depth, max_fanout, max_activities, 1)

    units: dict[str, list[str]] = {}
    for role in referenced_roles(root):
        units.setdefault(_ROLE_UNIT[role], []).append(role)
    return CutaWorkflow(
        name=f"generated-{seed}",
        company=company,
        root=root,
        documents=tuple(Document(n) for n in referenced_documents(root)),
        org_units=tuple(OrganizationalUnit(u, tuple(rs)) for u, rs in units.items()),
    )


def _gen_block(
    rng: random.Random, depth_left: int, max_fanout: int, budget: int, width: int
) -> tuple[Block, int]:
    """Return (block, activities used); never uses more than budget."""
    concurrent_ok = width * 2 <= _WIDTH_CAP
    feasible = ["activity"]
    if depth_left > 1:
        feasible += ["sequence", "loop"]
        if budget >= 2:
            feasible += ["case"]
            if concurrent_ok:
                feasible += ["parallel", "multichoice"]
    kind = rng.choice(sorted(feasible))

    if kind == "activity":
        return _gen_activity(rng), 1
    if kind == "loop":
        body, used = _gen_block(rng, depth_left - 1, max_fanout, budget, width)
        position = rng.choice((ConditionPosition.BEGIN, ConditionPosition.END))
        return Loop(rng.choice(_CONDITIONS), position, body), used

    min_children = 1 if kind == "sequence" else 2
    max_children = min(max_fanout, budget)
    if kind in ("parallel", "multichoice"):
        max_children = min(max_children, _WIDTH_CAP // width)
    k = rng.randint(min_children, max(min_children, max_children))
    child_width = width * k if kind in ("parallel", "multichoice") else width
    children: list[Block] = []
    used_total = 0
    remaining = budget
    for i in range(k):
        reserve = k - i - 1  # one activity for each branch still to come
        avail = max(1, remaining - reserve)
        child_budget = rng.randint(1, avail)
        child, used = _gen_block(rng, depth_left - 1, max_fanout, child_budget, child_width)
        children.append(child)
        used_total += used
        remaining -= used

    if kind == "sequence":
        return (
            Sequence(tuple(SequenceElement(i + 1, c) for i, c in enumerate(children))),
            used_total,
        )
    if kind == "case":
        items = tuple(
            CaseItem(i + 1, rng.choice(_CONDITIONS), c) for i, c in enumerate(children)
        )
        return Case(items), used_total
    if kind == "parallel":
        return Parallel(tuple(children)), used_total
    options = tuple(ChoiceOption(rng.choice(_CONDITIONS), c) for c in children)
    return MultipleChoice(options), used_total


def _gen_activity(rng: random.Random) -> SimpleActivity:
    docs_in = rng.sample(_DOCUMENTS, rng.randint(0, 2))
    docs_out = rng.sample(_DOCUMENTS, rng.randint(0, 2))
    location = rng.choice(_LOCATIONS) if rng.random() < 0.3 else None
    time_limit = rng.choice(_TIME_LIMITS) if rng.random() < 0.3 else None
    return SimpleActivity(
        subject=rng.choice(_SUBJECTS),
        action=rng.choice(_ACTIONS),
        object=rng.choice(_OBJECTS),
        role=rng.choice(_ROLES),
        documents_in=tuple(docs_in),
        documents_out=tuple(docs_out),
        location=location,
        time_limit=time_limit,
    )


def activity_count(workflow: CutaWorkflow) -> int:
    return sum(1 for _ in iter_activities(workflow.root))
