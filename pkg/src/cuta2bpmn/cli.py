"""Command-line pipeline: parse, validate, transform, emit, verify.

Exit codes: 0 clean, 1 diagnostics or unsound model, 2 I/O or usage
errors. Diagnostics go to stderr; artifacts go to files or stdout.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .diagnostics import Diagnostic
from .dsl import parse_dsl, print_dsl
from .flatten import block_counts, transform_workflow
from .generate import generate_random_workflow
from .jsonio import from_json, to_json
from .bpmn import NodeKind
from .model import CutaWorkflow, iter_blocks, kind_of
from .verify import verify_soundness
from .xml_emit import emit_xml

_FORMAT_CHOICE = click.option(
    "--format",
    "fmt",
    type=click.Choice(["dsl", "json"]),
    default=None,
    help="Input format; default is sniffed from the extension.",
)
_ENGINE_CHOICE = click.option(
    "--engine",
    type=click.Choice(["compiled", "python"]),
    default=None,
    help="Verifier engine; default picks the compiled kernel when built.",
)


@click.group()
def main():
    """Compile block-structured CUTA4BPM process models to sound BPMN 2.0."""


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(2)


def _sniff_format(path: str, fmt: str | None) -> str:
    if fmt is not None:
        return fmt
    if path.endswith(".cuta.json"):
        return "json"
    if path.endswith(".cuta"):
        return "dsl"
    raise click.UsageError(
        f"cannot infer format of '{path}' (expected .cuta or .cuta.json); use --format"
    )


def _report(diags: list[Diagnostic]) -> None:
    for diag in diags:
        click.echo(diag.render(), err=True)


def _load(path: str, fmt: str | None) -> CutaWorkflow:
    data = _read_bytes(path)
    if _sniff_format(path, fmt) == "json":
        result = from_json(data)
    else:
        result = parse_dsl(data, file_name=path)
    if isinstance(result, list):
        _report(result)
        sys.exit(1)
    return result


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        click.echo(f"error: cannot write {path}: {exc}", err=True)
        sys.exit(2)


@main.command()
@click.argument("input", type=click.Path())
@_FORMAT_CHOICE
def check(input: str, fmt: str | None):
    """Parse and validate a model; report diagnostics."""
    _load(input, fmt)
    click.echo(f"{input}: ok", err=True)


@main.command()
@click.argument("input", type=click.Path())
@click.option("-o", "--output", required=True, type=click.Path(), help="BPMN XML output file.")
@click.option("--json", "json_out", type=click.Path(), default=None,
              help="Also write the model as canonical interchange JSON.")
@click.option("--no-verify", is_flag=True, help="Skip the soundness check.")
@_FORMAT_CHOICE
@_ENGINE_CHOICE
def compile(input: str, output: str, json_out: str | None, no_verify: bool,
            fmt: str | None, engine: str | None):
    """Run the full pipeline and write the BPMN file."""
    workflow = _load(input, fmt)
    defs = transform_workflow(workflow)
    _write_text(output, emit_xml(defs))
    if json_out is not None:
        _write_text(json_out, to_json(workflow))
    if no_verify:
        return
    report = verify_soundness(defs, engine=engine)
    if report.sound:
        click.echo(f"{input}: sound ({report.states_explored} states)", err=True)
    else:
        click.echo(f"{input}: NOT sound", err=True)
        for violation in report.violations:
            click.echo(f"  {violation.kind.value}: {violation.witness}", err=True)
        sys.exit(1)


@main.command()
@click.argument("input", type=click.Path())
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")
@_FORMAT_CHOICE
@_ENGINE_CHOICE
def verify(input: str, as_json: bool, fmt: str | None, engine: str | None):
    """Compile in memory and print the soundness report."""
    workflow = _load(input, fmt)
    report = verify_soundness(transform_workflow(workflow), engine=engine)
    click.echo(report.to_json() if as_json else str(report), nl=False)
    if not report.sound:
        sys.exit(1)


@main.command()
@click.argument("input", type=click.Path())
@_FORMAT_CHOICE
def stats(input: str, fmt: str | None):
    """Print graph counts and the per-block counting-law breakdown."""
    workflow = _load(input, fmt)
    defs = transform_workflow(workflow)
    process = defs.process
    click.echo(f"workflow: {workflow.name}")
    click.echo(f"company:  {workflow.company}")
    click.echo("blocks:")
    for path, block in iter_blocks(workflow.root):
        nodes, flows = block_counts(block)
        click.echo(f"  {path:<40} {kind_of(block):<12} nodes={nodes:<4} flows={flows}")
    tasks = sum(1 for n in process.nodes if n.kind is NodeKind.TASK)
    gateways = len(process.nodes) - tasks - 2
    n_root, e_root = block_counts(workflow.root)
    click.echo(
        f"graph: nodes={len(process.nodes)} flows={len(process.flows)} "
        f"tasks={tasks} gateways={gateways} lanes={len(defs.lanes)} "
        f"data_objects={len(process.data_objects)}"
    )
    node_law = "ok" if len(process.nodes) == n_root + 2 else "VIOLATED"
    flow_law = "ok" if len(process.flows) == e_root + 2 else "VIOLATED"
    click.echo(f"counting law: nodes {node_law} (N(root)+2={n_root + 2}), "
               f"flows {flow_law} (E(root)+2={e_root + 2})")


@main.command()
@click.argument("input", type=click.Path())
@_FORMAT_CHOICE
def fmt(input: str, fmt: str | None):
    """Pretty-print the canonical DSL form to stdout."""
    workflow = _load(input, fmt)
    click.echo(print_dsl(workflow), nl=False)


@main.command()
@click.option("--seed", required=True, type=int)
@click.option("--depth", default=4, show_default=True, type=int)
@click.option("--fanout", default=3, show_default=True, type=int)
def gen(seed: int, depth: int, fanout: int):
    """Emit a random valid workflow as DSL text."""
    try:
        workflow = generate_random_workflow(seed, depth, fanout)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    click.echo(print_dsl(workflow), nl=False)


if __name__ == "__main__":
    main()
