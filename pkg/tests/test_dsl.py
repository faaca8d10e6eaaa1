import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuta2bpmn.diagnostics import Diagnostic
from cuta2bpmn.dsl import parse_dsl, print_dsl
from cuta2bpmn.model import CutaWorkflow, SimpleActivity

MINIMAL = (
    'workflow "W" company "ACME" { activity { subject:"Ann" action:"files" '
    'object:"the form" role:"Clerk" in "Sales" } }'
)


def test_parse_minimal_workflow():
    workflow = parse_dsl(MINIMAL)
    assert isinstance(workflow, CutaWorkflow)
    assert workflow.name == "W"
    assert workflow.company == "ACME"
    root = workflow.root
    assert isinstance(root, SimpleActivity)
    assert (root.subject, root.action, root.object, root.role) == (
        "Ann", "files", "the form", "Clerk",
    )
    assert workflow.role_units() == {"Clerk": "Sales"}


def test_single_branch_parallel_reports_validator_diagnostic():
    src = (
        'workflow "W" company "ACME" { parallel { activity { subject:"A" '
        'action:"b" object:"c" role:"R" in "U" } } }'
    )
    diags = parse_dsl(src)
    assert isinstance(diags, list)
    assert any("parallel requires ≥2 branches" == d.message for d in diags)
    assert all(d.span is not None for d in diags)


def test_unclosed_block_single_diagnostic_at_eof():
    src = 'workflow "W" {'
    diags = parse_dsl(src)
    assert isinstance(diags, list) and len(diags) == 1
    diag = diags[0]
    assert "unclosed block" in diag.message
    assert diag.span is not None
    assert diag.span.start_line == 1
    assert diag.span.start_col == len(src) + 1


def test_truncated_nested_block_is_unclosed():
    diags = parse_dsl('workflow "W" company "C" { sequence { activity {')
    assert isinstance(diags, list)
    assert any("unclosed block" in d.message for d in diags)


def test_round_trip_on_corpus(small_corpus):
    for workflow in small_corpus:
        text = print_dsl(workflow)
        again = parse_dsl(text)
        assert isinstance(again, CutaWorkflow), text
        assert again == workflow


def test_print_is_deterministic(small_corpus):
    workflow = small_corpus[3]
    assert print_dsl(workflow) == print_dsl(workflow)


def test_minimal_print_contains_one_activity_block():
    workflow = parse_dsl(MINIMAL)
    assert print_dsl(workflow).count("activity {") == 1


def test_role_unit_conflict_is_reported():
    src = (
        'workflow "W" company "C" { sequence {'
        ' activity { subject:"A" action:"b" object:"c" role:"R" in "U1" }'
        ' activity { subject:"A" action:"b" object:"c" role:"R" in "U2" }'
        " } }"
    )
    diags = parse_dsl(src)
    assert isinstance(diags, list)
    assert any("already assigned to unit 'U1'" in d.message for d in diags)


def test_role_without_unit_is_reported():
    src = (
        'workflow "W" company "C" { activity { subject:"A" action:"b" '
        'object:"c" role:"R" } }'
    )
    diags = parse_dsl(src)
    assert isinstance(diags, list)
    assert any("role 'R' has no organizational unit" in d.message for d in diags)
    assert all(d.span is not None for d in diags)


def test_later_role_use_may_omit_unit():
    src = (
        'workflow "W" company "C" { sequence {'
        ' activity { subject:"A" action:"b" object:"c" role:"R" in "U" }'
        ' activity { subject:"D" action:"e" object:"f" role:"R" }'
        " } }"
    )
    workflow = parse_dsl(src)
    assert isinstance(workflow, CutaWorkflow)
    assert workflow.role_units() == {"R": "U"}


def test_duplicate_field_is_reported():
    src = (
        'workflow "W" company "C" { activity { subject:"A" subject:"B" '
        'action:"b" object:"c" role:"R" in "U" } }'
    )
    diags = parse_dsl(src)
    assert isinstance(diags, list)
    assert any("duplicate field 'subject'" in d.message for d in diags)


@pytest.mark.parametrize(
    "src,needle",
    [
        ('workflow "W', "unterminated string"),
        ('workflow "W\\q"', "invalid escape"),
        ("workflow @", "unexpected character"),
        ('workflow "W" company "C" { activity { } } trailing', "trailing input"),
        ('workflow "W" company "C" { widget { } }', "expected a block"),
        ('workflow "W" company "C" { loop mid "c" { activity { } } }', "'pre' or 'post'"),
        ("", "expected 'workflow'"),
    ],
)
def test_syntax_errors_have_spans(src, needle):
    diags = parse_dsl(src)
    assert isinstance(diags, list) and diags
    assert any(needle in d.message for d in diags), diags
    assert all(d.span is not None for d in diags)


def test_deep_nesting_reports_instead_of_crashing():
    src = 'workflow "W" company "C" { ' + "sequence { " * 400
    diags = parse_dsl(src)
    assert isinstance(diags, list)
    assert any("nesting too deep" in d.message for d in diags)


def test_comments_and_whitespace_are_skipped():
    src = (
        "# heading comment\n"
        'workflow "W" company "C" {\n'
        "  # the only step\n"
        '  activity { subject:"A" action:"b" object:"c" role:"R" in "U" }\n'
        "}\n"
    )
    assert isinstance(parse_dsl(src), CutaWorkflow)


def test_string_escapes_round_trip():
    src = (
        'workflow "quo\\"te" company "back\\\\slash" { activity { '
        'subject:"A" action:"b" object:"c" role:"R" in "U" } }'
    )
    workflow = parse_dsl(src)
    assert isinstance(workflow, CutaWorkflow)
    assert workflow.name == 'quo"te'
    assert workflow.company == "back\\slash"
    again = parse_dsl(print_dsl(workflow))
    assert again == workflow


def test_bytes_input_is_accepted():
    result = parse_dsl(MINIMAL.encode() + b"\xff\xfe")
    assert isinstance(result, list)  # trailing garbage, but no crash


@given(st.text(max_size=200))
@settings(max_examples=300, deadline=None)
def test_parser_totality_on_text(text):
    result = parse_dsl(text)
    assert isinstance(result, (CutaWorkflow, list))
    if isinstance(result, list):
        assert result
        assert all(isinstance(d, Diagnostic) and d.span is not None for d in result)


def test_parser_totality_on_random_bytes():
    rng = random.Random(99)
    for _ in range(500):
        blob = rng.randbytes(rng.randint(0, 120))
        result = parse_dsl(blob)
        assert isinstance(result, (CutaWorkflow, list))
