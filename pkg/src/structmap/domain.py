"""Typed predicate-calculus domains.

A domain is a forest of entities and predicate expressions. Expressions are
structurally deduplicated: the same predicate applied to the same argument ids
is one element. Each element carries the structural properties the scoring
code reads: its level (height above the entities), its frequency (number of
top-level facts whose closure contains it) and whether it is a root.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal

PredicateKind = Literal["attribute", "function", "relation"]
PREDICATE_KINDS: tuple[str, ...] = ("attribute", "function", "relation")


class DomainError(ValueError):
    """Raised when a domain would violate one of its structural invariants.

    ``code`` uses the same vocabulary as parser diagnostics so the parser can
    re-raise builder failures at a source location.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class UnknownElement(KeyError):
    pass


@dataclass(frozen=True, slots=True)
class PredicateDecl:
    name: str
    kind: PredicateKind
    arity: int

    def __post_init__(self) -> None:
        if self.kind not in PREDICATE_KINDS:
            raise DomainError("syntax", f"unknown predicate kind {self.kind!r}")
        if self.arity < 1:
            raise DomainError("arity-mismatch", f"{self.name}: arity must be positive")
        if self.kind == "attribute" and self.arity != 1:
            raise DomainError("arity-mismatch", f"attribute {self.name} must have arity 1")

    def signature(self) -> str:
        return f"{self.kind} {self.name}/{self.arity}"


@dataclass(frozen=True, slots=True)
class Element:
    id: int
    name: str
    predicate: PredicateDecl | None = None
    args: tuple[int, ...] = ()
    level: int = 0
    freq: int = 0
    is_root: bool = False

    @property
    def is_entity(self) -> bool:
        return self.predicate is None

    @property
    def kind(self) -> str:
        return "entity" if self.predicate is None else self.predicate.kind


@dataclass(frozen=True)
class Domain:
    name: str
    declarations: dict[str, PredicateDecl]
    elements: tuple[Element, ...]
    entities: tuple[int, ...]
    facts: tuple[int, ...]
    _text: dict[int, str] = field(default_factory=dict, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.elements)

    def element(self, eid: int) -> Element:
        if not 0 <= eid < len(self.elements):
            raise UnknownElement(f"{self.name}: no element with id {eid}")
        return self.elements[eid]

    @property
    def expressions(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.elements if not e.is_entity)

    def roots(self) -> tuple[int, ...]:
        return tuple(f for f in self.facts if self.elements[f].is_root)

    def render(self, eid: int) -> str:
        """Canonical text of an element, e.g. ``pressure(beaker)``."""
        text = self._text.get(eid)
        if text is None:
            el = self.element(eid)
            if el.is_entity:
                text = el.name
            else:
                text = f"{el.name}({', '.join(self.render(a) for a in el.args)})"
            self._text[eid] = text
        return text

    def closure(self, eid: int) -> set[int]:
        """Ids of ``eid`` and everything below it."""
        seen: set[int] = set()
        stack = [eid]
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(self.elements[cur].args)
        return seen

    def by_text(self) -> dict[str, int]:
        return {self.render(e.id): e.id for e in self.elements}


def level_of(domain: Domain, eid: int) -> int:
    return domain.element(eid).level


def freq_of(domain: Domain, eid: int) -> int:
    return domain.element(eid).freq


def roots_of(domain: Domain) -> list[int]:
    return list(domain.roots())


class DomainBuilder:
    """Incrementally assembles a :class:`Domain`.

    Arguments must already exist when an expression is added, so the argument
    graph is acyclic by construction.
    """

    def __init__(self, name: str):
        self.name = name
        self.declarations: dict[str, PredicateDecl] = {}
        self._entity_ids: dict[str, int] = {}
        self._names: list[str] = []
        self._preds: list[PredicateDecl | None] = []
        self._args: list[tuple[int, ...]] = []
        self._levels: list[int] = []
        self._dedup: dict[tuple[str, tuple[int, ...]], int] = {}
        self._facts: list[int] = []
        self._fact_set: set[int] = set()

    def declare(self, name: str, kind: str, arity: int) -> PredicateDecl:
        if name in self._entity_ids:
            raise DomainError("duplicate-name", f"{name!r} is already an entity")
        decl = PredicateDecl(name, kind, arity)  # type: ignore[arg-type]
        prior = self.declarations.get(name)
        if prior is not None:
            raise DomainError("duplicate-name", f"predicate {name!r} declared twice")
        self.declarations[name] = decl
        return decl

    def add_entity(self, name: str) -> int:
        if name in self.declarations:
            raise DomainError("duplicate-name", f"{name!r} is already a predicate")
        eid = self._entity_ids.get(name)
        if eid is not None:
            return eid
        eid = self._new(name, None, ())
        self._entity_ids[name] = eid
        return eid

    def has_entity(self, name: str) -> bool:
        return name in self._entity_ids

    def add_expression(self, predicate: str, args: Iterable[int]) -> int:
        args = tuple(args)
        decl = self.declarations.get(predicate)
        if decl is None:
            raise DomainError("undeclared-predicate", f"predicate {predicate!r} is not declared")
        if len(args) != decl.arity:
            raise DomainError(
                "arity-mismatch",
                f"{predicate} expects {decl.arity} argument(s), got {len(args)}",
            )
        for a in args:
            if not 0 <= a < len(self._names):
                raise DomainError("cycle", f"argument id {a} does not exist yet")
            arg_kind = "entity" if self._preds[a] is None else self._preds[a].kind
            if decl.kind == "attribute" and arg_kind != "entity":
                raise DomainError(
                    "attribute-nonentity-arg",
                    f"attribute {predicate} takes entities only, got a {arg_kind}",
                )
            if decl.kind == "function" and arg_kind not in ("entity", "function"):
                raise DomainError(
                    "function-nonterm-arg",
                    f"function {predicate} takes entities or functions, got a {arg_kind}",
                )
        key = (predicate, args)
        eid = self._dedup.get(key)
        if eid is None:
            eid = self._new(predicate, decl, args)
            self._dedup[key] = eid
        return eid

    @property
    def fact_count(self) -> int:
        return len(self._facts)

    def add_fact(self, eid: int) -> None:
        if eid not in self._fact_set:
            self._fact_set.add(eid)
            self._facts.append(eid)

    def _new(self, name: str, decl: PredicateDecl | None, args: tuple[int, ...]) -> int:
        eid = len(self._names)
        self._names.append(name)
        self._preds.append(decl)
        self._args.append(args)
        self._levels.append(1 + max(self._levels[a] for a in args) if args else 0)
        return eid

    def build(self) -> Domain:
        n = len(self._names)
        is_arg = [False] * n
        for args in self._args:
            for a in args:
                is_arg[a] = True
        freq = [0] * n
        for fact in self._facts:
            seen: set[int] = set()
            stack = [fact]
            while stack:
                cur = stack.pop()
                if cur in seen:
                    continue
                seen.add(cur)
                stack.extend(self._args[cur])
            for eid in seen:
                freq[eid] += 1
        elements = tuple(
            Element(
                id=i,
                name=self._names[i],
                predicate=self._preds[i],
                args=self._args[i],
                level=self._levels[i],
                freq=freq[i],
                is_root=i in self._fact_set and not is_arg[i],
            )
            for i in range(n)
        )
        entities = tuple(i for i in range(n) if self._preds[i] is None)
        return Domain(
            name=self.name,
            declarations=dict(self.declarations),
            elements=elements,
            entities=entities,
            facts=tuple(self._facts),
        )


def isomorphic(a: Domain, b: Domain) -> bool:
    """Structural equality up to element ids.

    Dedup makes the rendered text of an element a unique key, so two domains
    are isomorphic when they agree on declarations, fact order and the
    per-element structural properties keyed by rendered text.
    """
    if a.name != b.name or a.declarations != b.declarations:
        return False
    if [a.render(f) for f in a.facts] != [b.render(f) for f in b.facts]:
        return False

    def props(d: Domain) -> dict[str, tuple[str, int, int, bool]]:
        return {d.render(e.id): (e.kind, e.level, e.freq, e.is_root) for e in d.elements}

    return props(a) == props(b)
