"""Reader and writer for ``.anl`` domain corpora.

Grammar::

    file     := domain+
    domain   := "domain" IDENT "{" section* "}"
    section  := "entities:" IDENT ("," IDENT)* ";"
              | ("attribute" | "function" | "relation") IDENT "/" INT ";"
              | "facts:" fact+
    fact     := expr ";"
    expr     := IDENT "(" arg ("," arg)* ")"
    arg      := IDENT | expr
    IDENT    := [A-Za-z][A-Za-z0-9_-]*

``#`` starts a comment that runs to the end of the line. Declarations may
appear anywhere in a block; identifiers used as arguments that were not listed
under ``entities:`` become entities on first use.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Literal, Union

from .domain import PREDICATE_KINDS, Domain, DomainBuilder, DomainError

DiagnosticCode = Literal[
    "syntax",
    "undeclared-predicate",
    "arity-mismatch",
    "duplicate-name",
    "attribute-nonentity-arg",
    "function-nonterm-arg",
    "cycle",
]


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Literal["error", "warning"]
    line: int
    column: int
    code: DiagnosticCode
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: [{self.code}] {self.message}"


@dataclass
class ParseResult:
    domains: dict[str, Domain] = field(default_factory=dict)
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(d.severity == "error" for d in self.diagnostics)


class CorpusError(Exception):
    def __init__(self, diagnostics: list[ParseDiagnostic], source: str = "<corpus>"):
        self.diagnostics = diagnostics
        lines = "\n".join(f"{source}:{d}" for d in diagnostics)
        super().__init__(f"corpus failed to parse:\n{lines}")


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<ident>[A-Za-z][A-Za-z0-9_-]*)
  | (?P<int>[0-9]+)
  | (?P<punct>[{}(),;:/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class _Tok:
    kind: str  # ident | int | punct | bad | eof
    text: str
    line: int
    col: int


def _tokenize(source: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            toks.append(_Tok("bad", source[pos], line, col))
            pos += 1
            continue
        kind = m.lastgroup
        text = m.group()
        if kind in ("ident", "int", "punct"):
            toks.append(_Tok(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


@dataclass(frozen=True)
class _Name:
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class _Call:
    name: str
    args: tuple["_Arg", ...]
    line: int
    col: int


_Arg = Union[_Name, _Call]


class _SyntaxError(Exception):
    def __init__(self, tok: _Tok, message: str):
        super().__init__(message)
        self.tok = tok


@dataclass
class _Block:
    name: str
    tok: _Tok
    decls: list[tuple[str, str, int, _Tok]] = field(default_factory=list)
    entities: list[_Tok] = field(default_factory=list)
    facts: list[_Call] = field(default_factory=list)


class _Parser:
    def __init__(self, source: str):
        self.toks = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> _Tok:
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        tok = self.tok
        if tok.kind == "bad":
            raise _SyntaxError(tok, f"unexpected character {tok.text!r}")
        if tok.kind != kind or (text is not None and tok.text != text):
            want = repr(text) if text is not None else kind
            got = repr(tok.text) if tok.kind != "eof" else "end of input"
            raise _SyntaxError(tok, f"expected {want}, got {got}")
        return self.advance()

    def blocks(self) -> Iterator[_Block | _SyntaxError]:
        if self.tok.kind == "eof":
            yield _SyntaxError(self.tok, "expected at least one 'domain' block")
            return
        while self.tok.kind != "eof":
            start = self.i
            try:
                yield self.block()
            except _SyntaxError as err:
                yield err
                self.recover(start)

    def recover(self, start: int) -> None:
        # Skip to the next "domain IDENT {" after the failed block's keyword.
        self.i = max(self.i, start + 1)
        while self.tok.kind != "eof":
            if (
                self.tok.kind == "ident"
                and self.tok.text == "domain"
                and self.peek().kind == "ident"
                and self.peek(2).text == "{"
            ):
                return
            self.advance()

    def block(self) -> _Block:
        kw = self.expect("ident", "domain")
        name = self.expect("ident")
        self.expect("punct", "{")
        blk = _Block(name.text, kw)
        while not (self.tok.kind == "punct" and self.tok.text == "}"):
            self.section(blk)
        self.advance()
        return blk

    def section(self, blk: _Block) -> None:
        tok = self.tok
        if tok.kind == "ident" and tok.text == "entities" and self.peek().text == ":":
            self.advance()
            self.advance()
            blk.entities.append(self.expect("ident"))
            while self.tok.text == "," and self.tok.kind == "punct":
                self.advance()
                blk.entities.append(self.expect("ident"))
            self.expect("punct", ";")
        elif tok.kind == "ident" and tok.text == "facts" and self.peek().text == ":":
            self.advance()
            self.advance()
            blk.facts.append(self.fact())
            while self.tok.kind == "ident" and self.peek().text == "(":
                blk.facts.append(self.fact())
        elif tok.kind == "ident" and tok.text in PREDICATE_KINDS:
            self.advance()
            name = self.expect("ident")
            self.expect("punct", "/")
            arity = self.expect("int")
            self.expect("punct", ";")
            blk.decls.append((name.text, tok.text, int(arity.text), name))
        else:
            got = repr(tok.text) if tok.kind != "eof" else "end of input"
            raise _SyntaxError(
                tok, f"expected 'entities:', 'facts:', a declaration or '}}', got {got}"
            )

    def fact(self) -> _Call:
        call = self.expr()
        self.expect("punct", ";")
        return call

    def expr(self) -> _Call:
        name = self.expect("ident")
        self.expect("punct", "(")
        args = [self.arg()]
        while self.tok.kind == "punct" and self.tok.text == ",":
            self.advance()
            args.append(self.arg())
        self.expect("punct", ")")
        return _Call(name.text, tuple(args), name.line, name.col)

    def arg(self) -> _Arg:
        if self.tok.kind == "ident" and self.peek().text == "(":
            return self.expr()
        name = self.expect("ident")
        return _Name(name.text, name.line, name.col)


def _error(line: int, col: int, code: str, message: str) -> ParseDiagnostic:
    return ParseDiagnostic("error", line, col, code, message)  # type: ignore[arg-type]


def _build(blk: _Block) -> tuple[Domain | None, list[ParseDiagnostic]]:
    diags: list[ParseDiagnostic] = []
    builder = DomainBuilder(blk.name)
    for name, kind, arity, tok in blk.decls:
        try:
            builder.declare(name, kind, arity)
        except DomainError as err:
            diags.append(_error(tok.line, tok.col, err.code, str(err)))
    for tok in blk.entities:
        if builder.has_entity(tok.text):
            diags.append(
                ParseDiagnostic(
                    "warning", tok.line, tok.col, "duplicate-name",
                    f"entity {tok.text!r} listed more than once",
                )
            )
            continue
        try:
            builder.add_entity(tok.text)
        except DomainError as err:
            diags.append(_error(tok.line, tok.col, err.code, str(err)))

    def visit(node: _Arg) -> int | None:
        if isinstance(node, _Name):
            try:
                return builder.add_entity(node.text)
            except DomainError as err:
                diags.append(_error(node.line, node.col, err.code, str(err)))
                return None
        args = [visit(a) for a in node.args]
        if any(a is None for a in args):
            return None
        try:
            return builder.add_expression(node.name, args)  # type: ignore[arg-type]
        except DomainError as err:
            diags.append(_error(node.line, node.col, err.code, str(err)))
            return None

    for call in blk.facts:
        eid = visit(call)
        if eid is not None:
            builder.add_fact(eid)
    if any(d.severity == "error" for d in diags):
        return None, diags
    return builder.build(), diags


def parse_corpus(source: str) -> ParseResult:
    """Parse every ``domain`` block in ``source``.

    Errors abort only the block they occur in; the remaining blocks are still
    returned.
    """
    result = ParseResult()
    for item in _Parser(source).blocks():
        if isinstance(item, _SyntaxError):
            result.diagnostics.append(_error(item.tok.line, item.tok.col, "syntax", str(item)))
            continue
        if item.name in result.domains:
            result.diagnostics.append(
                _error(item.tok.line, item.tok.col, "duplicate-name",
                       f"domain {item.name!r} defined more than once")
            )
            continue
        domain, diags = _build(item)
        result.diagnostics.extend(diags)
        if domain is not None:
            result.domains[domain.name] = domain
    return result


def load_corpus(path: str | Path) -> dict[str, Domain]:
    """Parse a corpus file, raising :class:`CorpusError` on any error."""
    path = Path(path)
    result = parse_corpus(path.read_text(encoding="utf-8"))
    if not result.ok:
        raise CorpusError(result.diagnostics, str(path))
    return result.domains


def serialize(domain: Domain) -> str:
    """Canonical text for ``domain``: declarations sorted by kind then name,
    entities and facts in id / original order."""
    lines = [f"domain {domain.name} {{"]
    if domain.entities:
        names = ", ".join(domain.elements[e].name for e in domain.entities)
        lines.append(f"  entities: {names};")
    decls = sorted(domain.declarations.values(), key=lambda d: (PREDICATE_KINDS.index(d.kind), d.name))
    lines.extend(f"  {d.kind} {d.name}/{d.arity};" for d in decls)
    if domain.facts:
        lines.append("  facts:")
        lines.extend(f"    {domain.render(f)};" for f in domain.facts)
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize_corpus(domains: dict[str, Domain] | list[Domain]) -> str:
    items = list(domains.values()) if isinstance(domains, dict) else list(domains)
    return "\n".join(serialize(d) for d in items)
