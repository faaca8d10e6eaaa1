import pytest

from cuta2bpmn.generate import activity_count, generate_random_workflow
from cuta2bpmn.model import (
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
    validate_workflow,
)


def act(role="Clerk", **kw):
    fields = dict(subject="Ann", action="files", object="the form", role=role)
    fields.update(kw)
    return SimpleActivity(**fields)


def wf(root, documents=(), units=(("Sales", ("Clerk",)),), name="W", company="ACME"):
    return CutaWorkflow(
        name=name,
        company=company,
        root=root,
        documents=tuple(Document(d) for d in documents),
        org_units=tuple(OrganizationalUnit(n, r) for n, r in units),
    )


def messages(workflow):
    return [d.message for d in validate_workflow(workflow)]


def test_minimal_workflow_is_valid():
    assert validate_workflow(wf(act())) == []


def test_parallel_requires_two_branches():
    diags = validate_workflow(wf(Parallel((act(),))))
    assert [d.message for d in diags] == ["parallel requires ≥2 branches"]
    assert diags[0].path == "root"


def test_seqno_must_be_contiguous():
    seq = Sequence((SequenceElement(1, act()), SequenceElement(3, act())))
    assert "SeqNo must be contiguous 1..k" in messages(wf(seq))


def test_empty_sequence_flagged():
    assert "sequence must contain at least one element" in messages(wf(Sequence(())))


def test_case_needs_two_items_and_contiguous_numbers():
    assert "case requires at least 2 items" in messages(
        wf(Case((CaseItem(1, "ok", act()),)))
    )
    bad_numbers = Case((CaseItem(2, "a", act()), CaseItem(3, "b", act())))
    assert "case item numbers must be contiguous 1..k" in messages(wf(bad_numbers))


def test_case_condition_non_empty_with_item_path():
    case = Case((CaseItem(1, "", act()), CaseItem(2, "b", act())))
    diags = validate_workflow(wf(case))
    assert [(d.message, d.path) for d in diags] == [
        ("case condition must be non-empty", "root/case/1")
    ]


def test_multichoice_invariants():
    assert "multichoice requires at least 2 options" in messages(
        wf(MultipleChoice((ChoiceOption("x", act()),)))
    )
    mc = MultipleChoice((ChoiceOption("", act()), ChoiceOption("y", act())))
    assert "multichoice option condition must be non-empty" in messages(wf(mc))


def test_loop_condition_non_empty():
    loop = Loop("", ConditionPosition.BEGIN, act())
    assert "loop condition must be non-empty" in messages(wf(loop))


@pytest.mark.parametrize(
    "field,message",
    [
        ("subject", "subject must be non-empty"),
        ("action", "action must be non-empty"),
        ("object", "object must be non-empty"),
        ("role", "role must be non-empty"),
    ],
)
def test_activity_sentence_parts_non_empty(field, message):
    assert message in messages(wf(act(**{field: ""})))


def test_unknown_role_and_unknown_document():
    assert "unknown role 'Ghost'" in messages(wf(act(role="Ghost")))
    assert "unknown document 'Order'" in messages(wf(act(documents_in=("Order",))))


def test_duplicate_documents_in_activity_lists():
    workflow = wf(act(documents_in=("Order", "Order")), documents=("Order",))
    assert "duplicate input document 'Order'" in messages(workflow)
    workflow = wf(act(documents_out=("Order", "Order")), documents=("Order",))
    assert "duplicate output document 'Order'" in messages(workflow)


def test_workflow_level_invariants():
    assert "workflow name must be non-empty" in messages(wf(act(), name=""))
    assert "company must be non-empty" in messages(wf(act(), company=""))
    assert "duplicate document 'Order'" in messages(
        wf(act(), documents=("Order", "Order"))
    )
    two_units = (("Sales", ("Clerk",)), ("Support", ("Clerk",)))
    assert "role 'Clerk' belongs to more than one organizational unit" in messages(
        wf(act(), units=two_units)
    )


def test_validation_is_pure_and_path_sorted():
    seq = Sequence(
        (
            SequenceElement(1, Parallel((act(),))),
            SequenceElement(2, act(role="Ghost")),
        )
    )
    workflow = wf(seq)
    first = validate_workflow(workflow)
    second = validate_workflow(workflow)
    assert first == second
    paths = [d.path for d in first]
    assert paths == sorted(paths)
    for diag in first:
        assert diag.path is not None


# --- generator -------------------------------------------------------------


def test_depth_one_forces_activity_root():
    workflow = generate_random_workflow(seed=1, max_depth=1, max_fanout=2)
    assert isinstance(workflow.root, SimpleActivity)


def test_generator_is_deterministic():
    a = generate_random_workflow(42, 4, 3)
    b = generate_random_workflow(42, 4, 3)
    assert a == b
    assert a != generate_random_workflow(43, 4, 3)


@pytest.mark.parametrize("depth,fanout", [(0, 2), (1, 1), (-1, 2)])
def test_generator_rejects_bad_bounds(depth, fanout):
    with pytest.raises(ValueError):
        generate_random_workflow(1, depth, fanout)


def test_generated_corpus_is_valid_and_bounded(corpus):
    for workflow in corpus:
        assert validate_workflow(workflow) == []
        assert activity_count(workflow) <= 50


def test_generator_shares_roles_and_documents(corpus):
    # pools are small, so sharing must show up across a real corpus
    shared_doc = shared_role = False
    for workflow in corpus:
        from cuta2bpmn.model import iter_activities

        acts = list(iter_activities(workflow.root))
        docs = [n for a in acts for n in (*a.documents_in, *a.documents_out)]
        roles = [a.role for a in acts]
        if len(docs) != len(set(docs)):
            shared_doc = True
        if len(roles) != len(set(roles)):
            shared_role = True
    assert shared_doc and shared_role
