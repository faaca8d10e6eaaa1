import json
import xml.etree.ElementTree as ET

from click.testing import CliRunner

from cuta2bpmn.cli import main
from cuta2bpmn.dsl import parse_dsl, print_dsl
from cuta2bpmn.model import CutaWorkflow

MINIMAL = (
    'workflow "W" company "ACME" { activity { subject:"Ann" action:"files" '
    'object:"the form" role:"Clerk" in "Sales" } }\n'
)

BROKEN = (
    'workflow "W" company "ACME" { parallel { activity { subject:"Ann" '
    'action:"files" object:"the form" role:"Clerk" in "Sales" } } }\n'
)

SEQ3 = (
    'workflow "S" company "ACME" { sequence {'
    ' activity { subject:"Ann" action:"files" object:"the order" role:"Clerk" in "Sales" }'
    ' activity { subject:"Bob" action:"reviews" object:"the order" role:"Clerk" }'
    ' activity { subject:"Carol" action:"signs" object:"the order" role:"Clerk" }'
    " } }\n"
)


def invoke(*args):
    return CliRunner().invoke(main, args, catch_exceptions=False)


def test_check_ok(tmp_path):
    path = tmp_path / "w.cuta"
    path.write_text(MINIMAL)
    result = invoke("check", str(path))
    assert result.exit_code == 0
    assert "ok" in result.stderr


def test_check_reports_diagnostics(tmp_path):
    path = tmp_path / "broken.cuta"
    path.write_text(BROKEN)
    result = invoke("check", str(path))
    assert result.exit_code == 1
    assert "parallel requires" in result.stderr
    assert result.stdout == ""


def test_check_reads_json(tmp_path):
    workflow = parse_dsl(MINIMAL)
    from cuta2bpmn.jsonio import to_json

    path = tmp_path / "w.cuta.json"
    path.write_text(to_json(workflow))
    assert invoke("check", str(path)).exit_code == 0


def test_compile_writes_sound_bpmn(tmp_path):
    src = tmp_path / "w.cuta"
    src.write_text(MINIMAL)
    out = tmp_path / "w.bpmn"
    result = invoke("compile", str(src), "-o", str(out))
    assert result.exit_code == 0
    assert "sound" in result.stderr
    tree = ET.parse(out)
    assert tree.getroot().tag.endswith("definitions")


def test_compile_is_byte_deterministic(tmp_path):
    src = tmp_path / "w.cuta"
    src.write_text(SEQ3)
    outputs = []
    for i in range(2):
        out = tmp_path / f"run{i}.bpmn"
        json_out = tmp_path / f"run{i}.cuta.json"
        result = invoke("compile", str(src), "-o", str(out), "--json", str(json_out))
        assert result.exit_code == 0
        outputs.append((out.read_bytes(), json_out.read_bytes()))
    assert outputs[0] == outputs[1]


def test_compile_json_round_trips_to_same_bpmn(tmp_path):
    src = tmp_path / "w.cuta"
    src.write_text(SEQ3)
    out1 = tmp_path / "direct.bpmn"
    json_out = tmp_path / "w.cuta.json"
    assert invoke("compile", str(src), "-o", str(out1), "--json", str(json_out)).exit_code == 0
    out2 = tmp_path / "via_json.bpmn"
    assert invoke("compile", str(json_out), "-o", str(out2)).exit_code == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_compile_no_verify_skips_soundness(tmp_path):
    src = tmp_path / "w.cuta"
    src.write_text(MINIMAL)
    out = tmp_path / "w.bpmn"
    result = invoke("compile", str(src), "-o", str(out), "--no-verify")
    assert result.exit_code == 0
    assert "sound" not in result.stderr


def test_compile_engine_flag(tmp_path):
    src = tmp_path / "w.cuta"
    src.write_text(MINIMAL)
    out = tmp_path / "w.bpmn"
    assert invoke("compile", str(src), "-o", str(out), "--engine", "python").exit_code == 0


def test_verify_prints_report(tmp_path):
    src = tmp_path / "w.cuta"
    src.write_text(MINIMAL)
    result = invoke("verify", str(src))
    assert result.exit_code == 0
    assert "sound: yes" in result.stdout
    assert "states explored: 3" in result.stdout


def test_verify_json_report(tmp_path):
    src = tmp_path / "w.cuta"
    src.write_text(MINIMAL)
    result = invoke("verify", str(src), "--json")
    doc = json.loads(result.stdout)
    assert doc["sound"] is True
    assert doc["states_explored"] == 3


def test_stats_reports_counting_laws(tmp_path):
    src = tmp_path / "seq3.cuta"
    src.write_text(SEQ3)
    result = invoke("stats", str(src))
    assert result.exit_code == 0
    assert "nodes=5" in result.stdout
    assert "flows=4" in result.stdout
    assert "counting law: nodes ok" in result.stdout
    assert "flows ok" in result.stdout


def test_fmt_prints_canonical_dsl(tmp_path):
    src = tmp_path / "w.cuta"
    src.write_text(MINIMAL)
    result = invoke("fmt", str(src))
    assert result.exit_code == 0
    assert result.stdout == print_dsl(parse_dsl(MINIMAL))


def test_gen_emits_parseable_deterministic_dsl():
    first = invoke("gen", "--seed", "7", "--depth", "3", "--fanout", "3")
    second = invoke("gen", "--seed", "7", "--depth", "3", "--fanout", "3")
    assert first.exit_code == 0
    assert first.stdout == second.stdout
    workflow = parse_dsl(first.stdout)
    assert isinstance(workflow, CutaWorkflow)


def test_gen_rejects_bad_bounds():
    result = invoke("gen", "--seed", "1", "--depth", "0")
    assert result.exit_code == 2


def test_missing_file_is_io_error():
    result = invoke("check", "no/such/file.cuta")
    assert result.exit_code == 2
    assert "cannot read" in result.stderr


def test_unknown_extension_is_usage_error(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text(MINIMAL)
    assert invoke("check", str(path)).exit_code == 2


def test_format_override(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text(MINIMAL)
    assert invoke("check", str(path), "--format", "dsl").exit_code == 0
