"""Seeded random domains for scaling and property experiments."""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass

from .domain import Domain, DomainBuilder, PredicateDecl


class GeneratorError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    n_entities: int
    n_facts: int
    max_level: int
    predicate_pool: int
    ambiguity: float
    seed: int

    def validate(self) -> None:
        for name in ("n_entities", "n_facts", "max_level", "predicate_pool"):
            if getattr(self, name) < 1:
                raise GeneratorError(f"{name} must be positive")
        if not 0.0 <= self.ambiguity <= 1.0:
            raise GeneratorError("ambiguity must lie in [0, 1]")

    def as_dict(self) -> dict[str, object]:
        return asdict(self)


_FACT_ATTEMPTS = 20


class _Gen:
    def __init__(self, spec: GeneratorSpec, builder: DomainBuilder):
        self.spec = spec
        self.rng = random.Random(spec.seed)
        self.b = builder
        self.entities = [builder.add_entity(f"e{i}") for i in range(spec.n_entities)]
        self.unused = list(self.entities)
        self.rng.shuffle(self.unused)
        self.decls: list[PredicateDecl] = []

    def entity(self) -> int:
        if self.unused:
            return self.unused.pop()
        return self.rng.choice(self.entities)

    def predicate(self, kinds: tuple[str, ...]) -> PredicateDecl:
        """Reuse a declared predicate with probability ``ambiguity``, else
        declare a fresh one while the pool lasts.

        ``kinds`` is in preference order; later kinds are only used once the
        pool is exhausted and nothing of an earlier kind can be reused.
        """
        fresh_ok = len(self.decls) < self.spec.predicate_pool
        for kind in kinds:
            pool = [d for d in self.decls if d.kind == kind]
            if not fresh_ok:
                if pool and self.spec.ambiguity > 0.0:
                    return self.rng.choice(pool)
                continue
            if pool and self.rng.random() < self.spec.ambiguity:
                return self.rng.choice(pool)
            arity = 1 if kind in ("attribute", "function") else self.rng.choice((2, 2, 3))
            decl = self.b.declare(f"p{len(self.decls)}", kind, arity)
            self.decls.append(decl)
            return decl
        raise GeneratorError(
            f"predicate pool of {self.spec.predicate_pool} exhausted"
            + (" (ambiguity 0 forbids reuse)" if self.spec.ambiguity == 0.0 else "")
        )

    def expression(self, level: int, top: bool) -> int:
        """An element of exactly ``level``."""
        if level == 0:
            return self.entity()
        if level >= 2:
            kinds: tuple[str, ...] = ("relation",)
        else:
            roll = self.rng.random()
            if top:
                kinds = ("attribute", "relation") if roll < 0.3 else ("relation", "attribute")
            elif roll < 0.4:
                kinds = ("function", "relation", "attribute")
            elif roll < 0.55:
                kinds = ("attribute", "relation", "function")
            else:
                kinds = ("relation", "function", "attribute")
        decl = self.predicate(kinds)
        if level == 1:
            args = [self.entity() for _ in range(decl.arity)]
        else:
            deep = self.rng.randrange(decl.arity)
            args = [
                self.expression(level - 1 if i == deep else self.rng.randint(0, level - 1), False)
                for i in range(decl.arity)
            ]
        return self.b.add_expression(decl.name, args)


def generate_domain(spec: GeneratorSpec, name: str = "generated") -> Domain:
    """Random domain for ``spec``; identical seeds give identical domains.

    The first fact reaches ``max_level``; the rest draw their level uniformly
    from 1..max_level. Entities are consumed unused-first so every entity
    occurs in some fact whenever there are at least as many facts as entities.
    With ``ambiguity`` 0 every expression gets its own predicate name, so the
    pool must be large enough for all of them.
    """
    spec.validate()
    if spec.ambiguity == 0.0 and spec.predicate_pool < spec.max_level:
        raise GeneratorError("max_level unreachable: ambiguity 0 needs a fresh predicate per level")
    gen = _Gen(spec, DomainBuilder(name))
    for i in range(spec.n_facts):
        level = spec.max_level if i == 0 else gen.rng.randint(1, spec.max_level)
        for _ in range(_FACT_ATTEMPTS):
            before = gen.b.fact_count
            gen.b.add_fact(gen.expression(level, True))
            if gen.b.fact_count > before:
                break
    return gen.b.build()
