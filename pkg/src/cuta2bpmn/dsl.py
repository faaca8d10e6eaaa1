"""Textual DSL for CUTA4BPM workflows: lexer, parser and pretty-printer.

Grammar (strings are double-quoted, escaping \\" and \\\\; `#` starts a
line comment):

    workflow    := "workflow" STRING ["company" STRING] "{" block "}"
    block       := activity | sequence | case | parallel | multichoice | loop
    activity    := "activity" "{" field* "}"
    field       := ("subject"|"action"|"object"|"location"|"time_limit") ":" STRING
                 | "role" ":" STRING ["in" STRING]
                 | ("in"|"out") ":" STRING ("," STRING)*
    sequence    := "sequence" "{" block* "}"
    case        := "case" "{" ("when" STRING "{" block "}")* "}"
    parallel    := "parallel" "{" block* "}"
    multichoice := "multichoice" "{" ("option" STRING "{" block "}")* "}"
    loop        := "loop" ("pre"|"post") STRING "{" block "}"

SeqNo and case numbers are implied by lexical order. A role is bound to its
organizational unit at first use (`role: "Clerk" in "Sales"`); later uses
may omit the binding, and conflicting re-bindings are errors. Cardinality
rules (e.g. a parallel needs two branches) are left to the validator so the
parser stays permissive; the parser guarantees only syntax.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, SourceSpan, error
from .model import (
    Block,
    Case,
    CaseItem,
    ChoiceOption,
    ConditionPosition,
    CutaWorkflow,
    Loop,
    MultipleChoice,
    Parallel,
    Sequence,
    SequenceElement,
    SimpleActivity,
    assemble_workflow,
    iter_blocks,
    validate_workflow,
)

_MAX_NESTING = 200

_BLOCK_KEYWORDS = ("activity", "sequence", "case", "parallel", "multichoice", "loop")
_SIMPLE_FIELDS = ("subject", "action", "object", "location", "time_limit")


@dataclass(frozen=True)
class _Token:
    kind: str  # 'string' | 'word' | '{' | '}' | ':' | ',' | 'eof' | 'error'
    text: str
    value: str
    line: int
    col: int
    end_line: int
    end_col: int


def _tokenize(source: str, file_name: str) -> list[_Token]:
    """Total lexer: malformed input becomes 'error' tokens, never raises."""
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(source)

    def push(kind, text, value, l0, c0):
        tokens.append(_Token(kind, text, value, l0, c0, line, col))

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
                col += 1
            continue
        l0, c0 = line, col
        if ch in "{}:,":
            i += 1
            col += 1
            push(ch, ch, ch, l0, c0)
            continue
        if ch == '"':
            i += 1
            col += 1
            parts: list[str] = []
            closed = False
            bad_escape = False
            while i < n:
                ch = source[i]
                if ch == "\n":
                    break
                i += 1
                col += 1
                if ch == '"':
                    closed = True
                    break
                if ch == "\\":
                    if i < n and source[i] in ('"', "\\"):
                        parts.append(source[i])
                        i += 1
                        col += 1
                    else:
                        bad_escape = True
                else:
                    parts.append(ch)
            if not closed:
                push("error", "", "unterminated string", l0, c0)
            elif bad_escape:
                push("error", "", "invalid escape in string (only \\\" and \\\\ are allowed)", l0, c0)
            else:
                push("string", source[i - 1], "".join(parts), l0, c0)
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            col += j - i
            i = j
            push("word", word, word, l0, c0)
            continue
        i += 1
        col += 1
        push("error", ch, f"unexpected character {ch!r}", l0, c0)

    tokens.append(_Token("eof", "", "", line, col, line, col))
    return tokens


class _Abort(Exception):
    pass


class _Parser:
    def __init__(self, tokens: list[_Token], file_name: str):
        self.tokens = tokens
        self.file = file_name
        self.pos = 0
        self.diags: list[Diagnostic] = []      # fatal syntax errors
        self.sem_diags: list[Diagnostic] = []  # recoverable semantic problems
        self.block_spans: dict[int, SourceSpan] = {}  # id(block) -> span
        self.role_units: dict[str, str] = {}
        self.role_spans: dict[str, SourceSpan] = {}

    # token plumbing -------------------------------------------------------

    def _peek(self) -> _Token:
        return self.tokens[self.pos]

    def _next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        if tok.kind == "error":
            self._fail(tok.value, tok)
        return tok

    def _span(self, tok: _Token, end: _Token | None = None) -> SourceSpan:
        last = end or tok
        return SourceSpan(self.file, tok.line, tok.col, last.end_line, last.end_col)

    def _fail(self, message: str, tok: _Token) -> None:
        self.diags.append(error(message, span=self._span(tok)))
        raise _Abort

    def _expect(self, kind: str, what: str) -> _Token:
        tok = self._next()
        if tok.kind != kind:
            if tok.kind == "eof" and kind == "}":
                self._fail("unclosed block (expected '}' before end of file)", tok)
            self._fail(f"expected {what}, found {_describe(tok)}", tok)
        return tok

    def _expect_word(self, word: str) -> _Token:
        tok = self._next()
        if tok.kind != "word" or tok.value != word:
            self._fail(f"expected '{word}', found {_describe(tok)}", tok)
        return tok

    def _at_word(self, *words: str) -> bool:
        tok = self._peek()
        return tok.kind == "word" and tok.value in words

    # grammar --------------------------------------------------------------

    def parse(self) -> CutaWorkflow | list[Diagnostic]:
        try:
            first = self._expect_word("workflow")
            name = self._expect("string", "the workflow name").value
            company = ""
            if self._at_word("company"):
                self._next()
                company = self._expect("string", "the company name").value
            self._expect("{", "'{'")
            root = self._parse_block(0)
            self._expect("}", "'}'")
            if self._peek().kind != "eof":
                self._fail(
                    f"unexpected trailing input after workflow: {_describe(self._peek())}",
                    self._peek(),
                )
        except _Abort:
            return self.diags

        if self.sem_diags:
            return self.sem_diags

        workflow, diags = assemble_workflow(name, company, root, self.role_units)
        if workflow is None:
            return [
                Diagnostic(d.severity, d.message, self._role_span(d.message), d.path)
                for d in diags
            ]

        vdiags = validate_workflow(workflow)
        if vdiags:
            spans = {
                path: self.block_spans.get(id(block))
                for path, block in iter_blocks(workflow.root)
            }
            fallback = self._span(first, self.tokens[self.pos - 1])
            return [
                Diagnostic(
                    d.severity, d.message, spans.get(d.path) or fallback, d.path
                )
                for d in vdiags
            ]
        return workflow

    def _parse_block(self, depth: int) -> Block:
        if depth > _MAX_NESTING:
            self._fail("nesting too deep", self._peek())
        tok = self._next()
        if tok.kind == "eof":
            self._fail("unclosed block (expected a block before end of file)", tok)
        if tok.kind != "word" or tok.value not in _BLOCK_KEYWORDS:
            self._fail(
                "expected a block (activity, sequence, case, parallel, "
                f"multichoice or loop), found {_describe(tok)}",
                tok,
            )
        if tok.value == "activity":
            return self._parse_activity(tok)
        if tok.value == "sequence":
            blocks, end = self._parse_block_list(tok, depth)
            seq = Sequence(tuple(SequenceElement(i + 1, b) for i, b in enumerate(blocks)))
            return self._record(seq, tok, end)
        if tok.value == "parallel":
            blocks, end = self._parse_block_list(tok, depth)
            return self._record(Parallel(tuple(blocks)), tok, end)
        if tok.value == "case":
            items: list[CaseItem] = []
            self._expect("{", "'{'")
            while self._at_word("when"):
                self._next()
                condition = self._expect("string", "the case condition").value
                self._expect("{", "'{'")
                body = self._parse_block(depth + 1)
                self._expect("}", "'}'")
                items.append(CaseItem(len(items) + 1, condition, body))
            end = self._expect("}", "'when' or '}'")
            return self._record(Case(tuple(items)), tok, end)
        if tok.value == "multichoice":
            options: list[ChoiceOption] = []
            self._expect("{", "'{'")
            while self._at_word("option"):
                self._next()
                condition = self._expect("string", "the option condition").value
                self._expect("{", "'{'")
                body = self._parse_block(depth + 1)
                self._expect("}", "'}'")
                options.append(ChoiceOption(condition, body))
            end = self._expect("}", "'option' or '}'")
            return self._record(MultipleChoice(tuple(options)), tok, end)
        # loop
        pos_tok = self._next()
        if pos_tok.kind != "word" or pos_tok.value not in ("pre", "post"):
            self._fail(f"expected 'pre' or 'post', found {_describe(pos_tok)}", pos_tok)
        condition = self._expect("string", "the loop condition").value
        self._expect("{", "'{'")
        body = self._parse_block(depth + 1)
        end = self._expect("}", "'}'")
        position = (
            ConditionPosition.BEGIN if pos_tok.value == "pre" else ConditionPosition.END
        )
        return self._record(Loop(condition, position, body), tok, end)

    def _parse_block_list(self, start: _Token, depth: int) -> tuple[list[Block], _Token]:
        self._expect("{", "'{'")
        blocks: list[Block] = []
        while True:
            tok = self._peek()
            if tok.kind == "}":
                return blocks, self._next()
            if tok.kind == "eof":
                self._fail("unclosed block (expected '}' before end of file)", tok)
            blocks.append(self._parse_block(depth + 1))

    def _parse_activity(self, start: _Token) -> SimpleActivity:
        self._expect("{", "'{'")
        fields: dict[str, object] = {}
        while True:
            tok = self._peek()
            if tok.kind == "}":
                end = self._next()
                break
            if tok.kind == "eof":
                self._fail("unclosed block (expected '}' before end of file)", tok)
            if tok.kind != "word" or tok.value not in (*_SIMPLE_FIELDS, "role", "in", "out"):
                self._fail(f"expected an activity field or '}}', found {_describe(tok)}", tok)
            name_tok = self._next()
            name = name_tok.value
            self._expect(":", "':'")
            if name in _SIMPLE_FIELDS:
                value: object = self._expect("string", f"the {name} text").value
            elif name == "role":
                role_tok = self._expect("string", "the role name")
                value = role_tok.value
                self.role_spans.setdefault(role_tok.value, self._span(role_tok))
                if self._at_word("in"):
                    self._next()
                    unit_tok = self._expect("string", "the organizational unit name")
                    self._bind_role(role_tok.value, unit_tok.value, self._span(unit_tok))
            else:  # in / out document list
                names = [self._expect("string", "a document name").value]
                while self._peek().kind == ",":
                    self._next()
                    names.append(self._expect("string", "a document name").value)
                value = tuple(names)
            if name in fields:
                self.sem_diags.append(
                    error(f"duplicate field '{name}' in activity", span=self._span(name_tok))
                )
            else:
                fields[name] = value
        act = SimpleActivity(
            subject=str(fields.get("subject", "")),
            action=str(fields.get("action", "")),
            object=str(fields.get("object", "")),
            role=str(fields.get("role", "")),
            documents_in=fields.get("in", ()),  # type: ignore[arg-type]
            documents_out=fields.get("out", ()),  # type: ignore[arg-type]
            location=fields.get("location"),  # type: ignore[arg-type]
            time_limit=fields.get("time_limit"),  # type: ignore[arg-type]
        )
        return self._record(act, start, end)

    def _bind_role(self, role: str, unit: str, span: SourceSpan) -> None:
        bound = self.role_units.get(role)
        if bound is None:
            self.role_units[role] = unit
        elif bound != unit:
            self.sem_diags.append(
                error(f"role '{role}' is already assigned to unit '{bound}'", span=span)
            )

    def _record(self, block: Block, start: _Token, end: _Token) -> Block:
        self.block_spans[id(block)] = self._span(start, end)
        return block

    def _role_span(self, message: str) -> SourceSpan | None:
        for role, span in self.role_spans.items():
            if f"'{role}'" in message:
                return span
        # role never bound: point at the whole file
        last = self.tokens[-1]
        return SourceSpan(self.file, 1, 1, last.end_line, last.end_col)


def _describe(tok: _Token) -> str:
    if tok.kind == "eof":
        return "end of file"
    if tok.kind == "string":
        return f'string "{tok.value}"'
    if tok.kind == "word":
        return f"'{tok.value}'"
    return f"'{tok.kind}'"


def parse_dsl(source: str | bytes, file_name: str = "<input>") -> CutaWorkflow | list[Diagnostic]:
    """Parse DSL text into a validated workflow.

    Returns the workflow on success, otherwise a non-empty list of
    diagnostics, each carrying a source span. Total over arbitrary input:
    bytes are decoded with replacement and any malformed text yields
    diagnostics rather than exceptions.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8", errors="replace")
    parser = _Parser(_tokenize(source, file_name), file_name)
    result = parser.parse()
    if isinstance(result, list) and not result:  # defensive; parse always reports
        result = [error("invalid input", span=SourceSpan(file_name, 1, 1, 1, 1))]
    return result


def print_dsl(workflow: CutaWorkflow) -> str:
    """Render a workflow as canonical DSL text.

    Deterministic: 2-space indentation, fields in fixed order, role/unit
    binding written at every use. Re-parsing the output reconstructs the
    workflow (documents and units are re-derived from the references, so
    entities no activity mentions are not representable).
    """
    role_units = workflow.role_units()
    out: list[str] = [
        f"workflow {_quote(workflow.name)} company {_quote(workflow.company)} {{"
    ]
    _print_block(workflow.root, 1, role_units, out)
    out.append("}")
    return "\n".join(out) + "\n"


def _print_block(block: Block, depth: int, role_units: dict[str, str], out: list[str]) -> None:
    pad = "  " * depth
    if isinstance(block, SimpleActivity):
        out.append(f"{pad}activity {{")
        inner = "  " * (depth + 1)
        out.append(f"{inner}subject: {_quote(block.subject)}")
        out.append(f"{inner}action: {_quote(block.action)}")
        out.append(f"{inner}object: {_quote(block.object)}")
        role_line = f"{inner}role: {_quote(block.role)}"
        unit = role_units.get(block.role)
        if unit is not None:
            role_line += f" in {_quote(unit)}"
        out.append(role_line)
        if block.documents_in:
            out.append(f"{inner}in: " + ", ".join(_quote(d) for d in block.documents_in))
        if block.documents_out:
            out.append(f"{inner}out: " + ", ".join(_quote(d) for d in block.documents_out))
        if block.location is not None:
            out.append(f"{inner}location: {_quote(block.location)}")
        if block.time_limit is not None:
            out.append(f"{inner}time_limit: {_quote(block.time_limit)}")
        out.append(f"{pad}}}")
    elif isinstance(block, Sequence):
        out.append(f"{pad}sequence {{")
        for element in block.elements:
            _print_block(element.block, depth + 1, role_units, out)
        out.append(f"{pad}}}")
    elif isinstance(block, Case):
        out.append(f"{pad}case {{")
        for item in block.items:
            out.append(f"{pad}  when {_quote(item.condition)} {{")
            _print_block(item.body, depth + 2, role_units, out)
            out.append(f"{pad}  }}")
        out.append(f"{pad}}}")
    elif isinstance(block, Parallel):
        out.append(f"{pad}parallel {{")
        for branch in block.branches:
            _print_block(branch, depth + 1, role_units, out)
        out.append(f"{pad}}}")
    elif isinstance(block, MultipleChoice):
        out.append(f"{pad}multichoice {{")
        for option in block.options:
            out.append(f"{pad}  option {_quote(option.condition)} {{")
            _print_block(option.body, depth + 2, role_units, out)
            out.append(f"{pad}  }}")
        out.append(f"{pad}}}")
    else:  # Loop
        word = "pre" if block.position is ConditionPosition.BEGIN else "post"
        out.append(f"{pad}loop {word} {_quote(block.condition)} {{")
        _print_block(block.body, depth + 1, role_units, out)
        out.append(f"{pad}}}")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'
