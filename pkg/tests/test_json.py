import json

import pytest

from cuta2bpmn.jsonio import from_json, to_json
from cuta2bpmn.model import ConditionPosition, CutaWorkflow, Loop


def test_round_trip_on_corpus(corpus):
    for workflow in corpus:
        again = from_json(to_json(workflow))
        assert again == workflow


def test_to_json_is_deterministic(small_corpus):
    workflow = small_corpus[7]
    assert to_json(workflow) == to_json(workflow)


def test_unknown_kind_is_reported():
    doc = {
        "name": "W",
        "company": "C",
        "body": {"kind": "sequence", "elements": [{"kind": "teleport"}]},
    }
    diags = from_json(json.dumps(doc))
    assert isinstance(diags, list)
    assert any("unknown block kind 'teleport'" in d.message for d in diags)
    assert any(d.path == "body/elements/0" for d in diags)


def test_condition_position_serializes_as_begin_or_end(small_corpus):
    for workflow in small_corpus:
        text = to_json(workflow)
        doc = json.loads(text)

        def check(block):
            if block.get("kind") == "loop":
                assert block["condition_position"] in ("begin", "end")
            for key in ("elements", "branches"):
                for child in block.get(key, []):
                    check(child)
            for key in ("items", "options"):
                for child in block.get(key, []):
                    check(child["body"])
            if "body" in block:
                check(block["body"])

        check(doc["body"])


def test_loop_positions_round_trip():
    for position, literal in ((ConditionPosition.BEGIN, "begin"), (ConditionPosition.END, "end")):
        src = {
            "name": "W",
            "company": "C",
            "body": {
                "kind": "loop",
                "condition": "more",
                "condition_position": literal,
                "body": _activity_json(),
            },
        }
        workflow = from_json(json.dumps(src))
        assert isinstance(workflow, CutaWorkflow)
        assert isinstance(workflow.root, Loop)
        assert workflow.root.position is position


def test_invalid_condition_position():
    src = {
        "name": "W",
        "company": "C",
        "body": {
            "kind": "loop",
            "condition": "more",
            "condition_position": "middle",
            "body": _activity_json(),
        },
    }
    diags = from_json(json.dumps(src))
    assert isinstance(diags, list)
    assert any("condition_position must be 'begin' or 'end'" in d.message for d in diags)


def test_malformed_json():
    diags = from_json("{not json")
    assert isinstance(diags, list)
    assert any("malformed JSON" in d.message for d in diags)


def test_unexpected_field_is_reported():
    src = {"name": "W", "company": "C", "body": _activity_json(), "color": "red"}
    diags = from_json(json.dumps(src))
    assert isinstance(diags, list)
    assert any("unexpected field 'color'" in d.message for d in diags)


@pytest.mark.parametrize(
    "mutate,needle",
    [
        (lambda d: d.__setitem__("name", 7), "field 'name' must be a string"),
        (lambda d: d["body"].__setitem__("in", "Order"), "field 'in' must be an array"),
        (lambda d: d["body"].__setitem__("in", [3]), "entry 0 of 'in' must be a string"),
        (lambda d: d.pop("body"), "missing field 'body'"),
        (lambda d: d["body"].pop("kind"), "missing field 'kind'"),
    ],
)
def test_type_errors_are_reported(mutate, needle):
    doc = {"name": "W", "company": "C", "body": _activity_json()}
    mutate(doc)
    diags = from_json(json.dumps(doc))
    assert isinstance(diags, list)
    assert any(needle in d.message for d in diags), diags


def test_validation_runs_after_reading():
    doc = {
        "name": "W",
        "company": "C",
        "body": {"kind": "parallel", "branches": [_activity_json()]},
    }
    diags = from_json(json.dumps(doc))
    assert isinstance(diags, list)
    assert any("parallel requires ≥2 branches" == d.message for d in diags)


def test_role_unit_conflict_across_activities():
    doc = {
        "name": "W",
        "company": "C",
        "body": {
            "kind": "sequence",
            "elements": [_activity_json(unit="U1"), _activity_json(unit="U2")],
        },
    }
    diags = from_json(json.dumps(doc))
    assert isinstance(diags, list)
    assert any("already assigned to unit 'U1'" in d.message for d in diags)


def _activity_json(unit="U"):
    return {
        "kind": "activity",
        "subject": "Ann",
        "action": "files",
        "object": "the form",
        "role": "R",
        "unit": unit,
        "in": [],
        "out": [],
    }
