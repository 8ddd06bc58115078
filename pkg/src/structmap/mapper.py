"""Partial mappings (p-maps) and their merging into global mappings (g-maps).

A p-map is the downward closure of a root match. G-maps are built either by
the greedy merge (seed with the best p-map, fold in the rest in score order
where consistent) or by exhaustively enumerating maximal consistent unions of
p-maps, which is exponential and therefore guarded by a budget.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .matcher import MatchSet

DEFAULT_PMAP_CAP = 20


class PMapBudgetExceeded(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"{count} consistent p-maps exceed the optimal-merge cap of {cap}")
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class PMap:
    root_match: int
    members: frozenset[int]
    entity_correspondences: frozenset[tuple[int, int]]
    ses: float
    internally_consistent: bool

    @property
    def id(self) -> int:
        return self.root_match


@dataclass(frozen=True)
class GMap:
    members: frozenset[int]
    correspondences: tuple[tuple[int, int], ...]
    score: float
    provenance: tuple[int, ...] = ()

    @property
    def key(self) -> tuple[int, ...]:
        """Canonical tie-break key: ascending member ids."""
        return tuple(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)


def ses(members: Iterable[int] | PMap | GMap, matches: MatchSet, trickle_down: float = 0.0) -> float:
    """Structural evaluation score.

    Each member contributes one plus the level of its base element. With a
    non-zero ``trickle_down`` a member also receives that fraction of the
    contribution of every parent match inside the set.
    """
    if isinstance(members, (PMap, GMap)):
        members = members.members
    members = set(members)
    if not trickle_down:
        return sum(matches.weight(m) for m in members)
    order = sorted(members, key=lambda m: -matches.base.elements[matches[m].base].level)
    score = {m: float(matches.weight(m)) for m in members}
    for m in order:
        for a in matches[m].arg_matches:
            if a in score:
                score[a] += trickle_down * score[m]
    return sum(score.values())


def make_gmap(members: Iterable[int], matches: MatchSet, provenance: Iterable[int] = (),
              trickle_down: float = 0.0) -> GMap:
    members = frozenset(members)
    corr = tuple(sorted((matches[m].base, matches[m].target) for m in members))
    return GMap(members, corr, ses(members, matches, trickle_down), tuple(provenance))


def _root_ids(matches: MatchSet) -> tuple[list[int], list[int]]:
    """Consistent roots and maximal inconsistent matches.

    A valid expression match is a consistent root when its closure is
    one-to-one and no consistent valid match has it as an argument. Matches
    whose closure is inconsistent and that have no valid parent at all are
    reported separately so they show up in the instrumentation.
    """
    has_valid_parent: set[int] = set()
    has_consistent_parent: set[int] = set()
    for m in matches.matches:
        if not m.valid or m.kind != "expression":
            continue
        consistent = matches.closure_consistent(m.id)
        for a in m.arg_matches:
            has_valid_parent.add(a)
            if consistent:
                has_consistent_parent.add(a)
    roots, broken = [], []
    for m in matches.matches:
        if not m.valid or m.kind != "expression":
            continue
        if matches.closure_consistent(m.id):
            if m.id not in has_consistent_parent:
                roots.append(m.id)
        elif m.id not in has_valid_parent:
            broken.append(m.id)
    return roots, broken


def build_pmaps(matches: MatchSet, trickle_down: float = 0.0) -> list[PMap]:
    """One p-map per root match, best SES first (ties by root match id).

    Inconsistent p-maps are included with ``internally_consistent=False``;
    merging skips them.
    """
    roots, broken = _root_ids(matches)
    pmaps = []
    for rid in roots + broken:
        members = matches.closure(rid)
        ents = frozenset(
            (matches[m].base, matches[m].target) for m in members if matches[m].kind == "entity"
        )
        pmaps.append(
            PMap(
                root_match=rid,
                members=members,
                entity_correspondences=ents,
                ses=ses(members, matches, trickle_down),
                internally_consistent=matches.closure_consistent(rid),
            )
        )
    pmaps.sort(key=lambda p: (-p.ses, p.root_match))
    return pmaps


class _Mapping:
    """Running base->target / target->base maps for consistency checks."""

    def __init__(self, matches: MatchSet):
        self.matches = matches
        self.fwd: dict[int, int] = {}
        self.back: dict[int, int] = {}

    def accepts(self, members: Iterable[int]) -> bool:
        for mid in members:
            m = self.matches[mid]
            if self.fwd.get(m.base, m.target) != m.target:
                return False
            if self.back.get(m.target, m.base) != m.base:
                return False
        return True

    def add(self, members: Iterable[int]) -> None:
        for mid in members:
            m = self.matches[mid]
            self.fwd[m.base] = m.target
            self.back[m.target] = m.base


def greedy_merge(pmaps: list[PMap], matches: MatchSet, trickle_down: float = 0.0) -> list[GMap]:
    """Greedy merge producing a ranked list of alternative g-maps.

    Each g-map is seeded with the best p-map not yet absorbed by an earlier
    g-map and then folds in every other p-map, in score order, that keeps the
    union one-to-one. G-maps are returned in the order they were seeded, so
    the first one is always the greedy answer even when a later alternative
    happens to score higher.
    """
    usable = sorted((p for p in pmaps if p.internally_consistent), key=lambda p: (-p.ses, p.root_match))
    covered: set[int] = set()
    gmaps: list[GMap] = []
    for seed in usable:
        if seed.root_match in covered:
            continue
        state = _Mapping(matches)
        state.add(seed.members)
        members = set(seed.members)
        merged = [seed.root_match]
        for p in usable:
            if p is seed or not state.accepts(p.members):
                continue
            state.add(p.members)
            members |= p.members
            merged.append(p.root_match)
        covered.update(merged)
        gmaps.append(make_gmap(members, matches, merged, trickle_down))
    return gmaps


def _compatible(a: PMap, b: PMap, matches: MatchSet) -> bool:
    state = _Mapping(matches)
    state.add(a.members)
    return state.accepts(b.members)


class _BranchAndBound:
    """Exact search for the best one-to-one union of p-maps.

    P-map member sets are bitmasks over match ids and compatibility is a
    bitmask over p-map indices. Every clique of the compatibility graph is
    visited in index order unless the score of the current union plus every
    remaining compatible p-map cannot reach the best score found so far.
    """

    def __init__(self, usable: list[PMap], matches: MatchSet, trickle_down: float = 0.0):
        self.usable = usable
        self.matches = matches
        self.trickle_down = trickle_down
        n = len(usable)
        self.masks = [sum(1 << m for m in p.members) for p in usable]
        self.adj = [0] * n
        for i in range(n):
            for j in range(i + 1, n):
                if _compatible(usable[i], usable[j], matches):
                    self.adj[i] |= 1 << j
                    self.adj[j] |= 1 << i
        by_weight: dict[int, int] = {}
        for mid in set().union(*(p.members for p in usable)):
            w = matches.weight(mid)
            by_weight[w] = by_weight.get(w, 0) | 1 << mid
        self.weights = sorted(by_weight.items())
        self.best_score: float = -1
        self.best_key: tuple[int, ...] = ()
        self.best_mask = 0
        self.best_chosen: list[int] = []

    def score(self, mask: int) -> float:
        # both scores grow with the member set, so the bound below stays valid
        if self.trickle_down:
            return ses(self.key(mask), self.matches, self.trickle_down)
        return sum(w * (mask & lm).bit_count() for w, lm in self.weights)

    def bound(self, members: int, cur: float, cand: int) -> float:
        """Upper bound on any union reachable from ``members`` via ``cand``.

        The union of everything still compatible bounds every score. For
        plain SES there is also a colouring bound: candidates are split into
        groups of mutually incompatible p-maps, at most one per group can be
        added, and gains are additive over disjoint new members.
        """
        reach = members
        c = cand
        while c:
            low = c & -c
            reach |= self.masks[low.bit_length() - 1]
            c ^= low
        best = self.score(reach)
        if self.trickle_down:
            return best
        colour_bound = cur
        remaining = cand
        while remaining and colour_bound < best:
            free = remaining
            top = 0
            while free:
                low = free & -free
                v = low.bit_length() - 1
                top = max(top, self.score(self.masks[v] & ~members))
                free &= ~self.adj[v] & ~low
                remaining &= ~low
            colour_bound += top
        return min(best, colour_bound)

    @staticmethod
    def key(mask: int) -> tuple[int, ...]:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return tuple(out)

    def run(self) -> None:
        stack = [(0, (1 << len(self.usable)) - 1, ())]
        while stack:
            members, cand, chosen = stack.pop()
            cur = self.score(members)
            if cur > self.best_score or (cur == self.best_score and self.key(members) < self.best_key):
                self.best_score, self.best_key = cur, self.key(members)
                self.best_mask, self.best_chosen = members, list(chosen)
            if not cand:
                continue
            if self.bound(members, cur, cand) < self.best_score:
                continue
            # push in reverse so the highest-scoring p-map is expanded first
            children = []
            rest = cand
            while rest:
                low = rest & -rest
                v = low.bit_length() - 1
                rest ^= low
                children.append((members | self.masks[v], rest & self.adj[v], chosen + (v,)))
            stack.extend(reversed(children))


def optimal_merge(
    pmaps: list[PMap],
    matches: MatchSet,
    cap: int = DEFAULT_PMAP_CAP,
    trickle_down: float = 0.0,
) -> GMap:
    """Best g-map over all consistent unions of p-maps.

    Raises :class:`PMapBudgetExceeded` when there are more than ``cap``
    consistent p-maps. Equal scores are resolved in favour of the smaller
    ascending member-id sequence. The search is exact; branch-and-bound only
    skips unions that provably cannot reach the best score.
    """
    usable = sorted((p for p in pmaps if p.internally_consistent), key=lambda p: (-p.ses, p.root_match))
    if len(usable) > cap:
        raise PMapBudgetExceeded(len(usable), cap)
    if not usable:
        return make_gmap((), matches)
    search = _BranchAndBound(usable, matches, trickle_down)
    search.run()
    chosen = [usable[i].root_match for i in search.best_chosen]
    return make_gmap(search.key(search.best_mask), matches, chosen, trickle_down)


def check_gmap(members: Iterable[int], matches: MatchSet) -> list[str]:
    """Invariant violations of a g-map (empty when it is well formed)."""
    members = set(members)
    problems = []
    if not matches.is_consistent(members):
        problems.append("not one-to-one")
    for mid in members:
        m = matches[mid]
        if not m.valid:
            problems.append(f"invalid match {mid}")
        missing = [a for a in m.arg_matches if a not in members]
        if missing:
            problems.append(f"match {mid} missing argument matches {missing}")
    return problems
