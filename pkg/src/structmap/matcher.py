"""Match-hypothesis generation between a base and a target domain."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Literal

from .domain import Domain

PredicateRule = Literal["identical", "free"]
EntityMode = Literal["sanctioned", "all"]


@dataclass(frozen=True)
class RuleSet:
    """Which pairs of elements may be matched.

    ``identical`` pairs relations and attributes only with the same name;
    ``free`` pairs any two predicates of the same kind and arity. With
    ``functions_by_arity`` set, functions are matched on kind and arity even
    under ``identical`` (pressure(x) may match temperature(y)).

    ``sanctioned`` creates entity matches only where a valid expression match
    places two entities in argument correspondence; ``all`` pairs every base
    entity with every target entity.
    """

    predicate_rule: PredicateRule = "identical"
    entity_mode: EntityMode = "sanctioned"
    functions_by_arity: bool = True

    def __post_init__(self) -> None:
        if self.predicate_rule not in ("identical", "free"):
            raise ValueError(f"unknown predicate rule {self.predicate_rule!r}")
        if self.entity_mode not in ("sanctioned", "all"):
            raise ValueError(f"unknown entity mode {self.entity_mode!r}")

    def as_dict(self) -> dict[str, object]:
        return {
            "predicate_rule": self.predicate_rule,
            "entity_mode": self.entity_mode,
            "functions_by_arity": self.functions_by_arity,
        }


SME_RULES = RuleSet("identical", "sanctioned")
GIBSON_RULES = RuleSet("free", "all")


@dataclass(frozen=True, slots=True)
class MatchHypothesis:
    id: int
    base: int
    target: int
    kind: Literal["entity", "expression"]
    arg_matches: tuple[int, ...]
    valid: bool
    min_level: int
    freq_b: int
    freq_t: int
    rootedness: int

    @property
    def static_score(self) -> int:
        """The selection-order independent part of the best-map potential."""
        return len(self.arg_matches) + self.min_level + self.freq_b + self.freq_t + self.rootedness


@dataclass
class MatchSet:
    base: Domain
    target: Domain
    rules: RuleSet
    matches: tuple[MatchHypothesis, ...]
    by_base: dict[int, tuple[int, ...]]
    by_target: dict[int, tuple[int, ...]]
    _closures: dict[int, frozenset[int]] = field(default_factory=dict, repr=False)
    _consistent: dict[int, bool] = field(default_factory=dict, repr=False)

    @property
    def total(self) -> int:
        return len(self.matches)

    def __len__(self) -> int:
        return len(self.matches)

    def __getitem__(self, mid: int) -> MatchHypothesis:
        return self.matches[mid]

    def valid_ids(self) -> list[int]:
        return [m.id for m in self.matches if m.valid]

    @property
    def valid_count(self) -> int:
        return sum(1 for m in self.matches if m.valid)

    def weight(self, mid: int) -> int:
        """Structural weight of one match: one plus the level of its base element."""
        return 1 + self.base.elements[self.matches[mid].base].level

    def closure(self, mid: int) -> frozenset[int]:
        """The match plus, recursively, all of its argument matches."""
        got = self._closures.get(mid)
        if got is None:
            m = self.matches[mid]
            acc = {mid}
            for a in m.arg_matches:
                acc |= self.closure(a)
            got = frozenset(acc)
            self._closures[mid] = got
        return got

    def is_consistent(self, mids) -> bool:
        """True when the matches pair elements one-to-one in both directions."""
        fwd: dict[int, int] = {}
        back: dict[int, int] = {}
        for mid in mids:
            m = self.matches[mid]
            if fwd.setdefault(m.base, m.target) != m.target:
                return False
            if back.setdefault(m.target, m.base) != m.base:
                return False
        return True

    def closure_consistent(self, mid: int) -> bool:
        got = self._consistent.get(mid)
        if got is None:
            got = self.is_consistent(self.closure(mid))
            self._consistent[mid] = got
        return got

    def correspondence(self, mid: int) -> tuple[str, str, str]:
        m = self.matches[mid]
        return self.base.render(m.base), self.target.render(m.target), m.kind

    def find(self, base_text: str, target_text: str) -> MatchHypothesis | None:
        """Look a match up by the rendered text of its two elements."""
        b = self.base.by_text().get(base_text)
        t = self.target.by_text().get(target_text)
        if b is None or t is None:
            return None
        for mid in self.by_base.get(b, ()):
            if self.matches[mid].target == t:
                return self.matches[mid]
        return None


def _pred_key(domain: Domain, eid: int, rules: RuleSet) -> tuple:
    decl = domain.elements[eid].predicate
    assert decl is not None
    if rules.predicate_rule == "free" or (decl.kind == "function" and rules.functions_by_arity):
        return (decl.kind, decl.arity)
    return (decl.kind, decl.arity, decl.name)


def generate_matches(base: Domain, target: Domain, rules: RuleSet = SME_RULES) -> MatchSet:
    """Build every match hypothesis admitted by ``rules``.

    Expression pairs that pass the predicate rule are all recorded; those whose
    arguments cannot be matched position by position are kept with
    ``valid=False``. Match ids follow (base id, target id) order.
    """
    targets_by_key: dict[tuple, list[int]] = defaultdict(list)
    for t in target.expressions:
        targets_by_key[_pred_key(target, t, rules)].append(t)

    # (base, target) -> (valid, arg pairs)
    expr_pairs: dict[tuple[int, int], tuple[bool, tuple[tuple[int, int], ...]]] = {}
    entity_pairs: set[tuple[int, int]] = set()
    base_order = sorted(base.expressions, key=lambda e: (base.elements[e].level, e))
    for b in base_order:
        b_el = base.elements[b]
        for t in targets_by_key.get(_pred_key(base, b, rules), ()):
            t_el = target.elements[t]
            valid = True
            pairs = tuple(zip(b_el.args, t_el.args))
            for ba, ta in pairs:
                ba_ent = base.elements[ba].is_entity
                ta_ent = target.elements[ta].is_entity
                if ba_ent and ta_ent:
                    continue
                if ba_ent != ta_ent:
                    valid = False
                    break
                sub = expr_pairs.get((ba, ta))
                if sub is None or not sub[0]:
                    valid = False
                    break
            expr_pairs[(b, t)] = (valid, pairs if valid else ())
            if valid:
                for ba, ta in pairs:
                    if base.elements[ba].is_entity:
                        entity_pairs.add((ba, ta))

    if rules.entity_mode == "all":
        entity_pairs = {(b, t) for b in base.entities for t in target.entities}

    keys = sorted(set(expr_pairs) | entity_pairs)
    ids = {key: i for i, key in enumerate(keys)}
    matches = []
    by_base: dict[int, list[int]] = defaultdict(list)
    by_target: dict[int, list[int]] = defaultdict(list)
    for i, (b, t) in enumerate(keys):
        b_el, t_el = base.elements[b], target.elements[t]
        if b_el.is_entity:
            kind, valid, arg_ids = "entity", True, ()
        else:
            valid, pairs = expr_pairs[(b, t)]
            kind, arg_ids = "expression", tuple(ids[p] for p in pairs)
        matches.append(
            MatchHypothesis(
                id=i,
                base=b,
                target=t,
                kind=kind,
                arg_matches=arg_ids,
                valid=valid,
                min_level=min(b_el.level, t_el.level),
                freq_b=b_el.freq,
                freq_t=t_el.freq,
                rootedness=int(b_el.is_root) + int(t_el.is_root),
            )
        )
        by_base[b].append(i)
        by_target[t].append(i)
    return MatchSet(
        base=base,
        target=target,
        rules=rules,
        matches=tuple(matches),
        by_base={k: tuple(v) for k, v in by_base.items()},
        by_target={k: tuple(v) for k, v in by_target.items()},
    )


def match_count_profile(
    n_entities: int,
    rules: RuleSet,
    seed: int,
    steps: int = 4,
    facts_per_entity: float = 1.0,
    max_level: int = 2,
    predicate_pool: int = 8,
    ambiguity: float = 0.5,
) -> list[tuple[int, int]]:
    """Total match counts on random domain pairs of doubling size.

    Sizes run ``n_entities * 2**k`` for ``k < steps``; fact count scales with
    the entity count so structure density stays fixed.
    """
    from .generator import GeneratorSpec, generate_domain

    if n_entities < 1:
        raise ValueError("n_entities must be >= 1")
    out = []
    for k in range(steps):
        size = n_entities * 2**k
        n_facts = max(1, round(size * facts_per_entity))
        base = generate_domain(
            GeneratorSpec(size, n_facts, max_level, predicate_pool, ambiguity, seed + 2 * k), "base"
        )
        target = generate_domain(
            GeneratorSpec(size, n_facts, max_level, predicate_pool, ambiguity, seed + 2 * k + 1),
            "target",
        )
        out.append((size, generate_matches(base, target, rules).total))
    return out
