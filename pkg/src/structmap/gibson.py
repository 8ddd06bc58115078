"""GIBSON: grow a g-map by repeatedly selecting the match with the highest
best-map potential.

The potential of a match between base element b and target element t is::

    |args(b,t)| + min(level(b), level(t)) + freq(b) + freq(t) + rootedness(b,t)
        + |new(b,t)| * |known|

where ``new`` is what selecting the match would add to the g-map (the match
and its not-yet-known argument closure) and ``known`` is the g-map so far. The
first five terms never change during a run; only the product is rescored as
the g-map grows. When several conflicting matches tie for the top score the
run forks, one branch per alternative, up to a total branch budget.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .domain import Domain
from .mapper import GMap, build_pmaps, make_gmap
from .matcher import GIBSON_RULES, MatchHypothesis, MatchSet, RuleSet, generate_matches
from .report import RunReport, percent_correct

DEFAULT_FORK_CAP = 8
StopRule = Literal["all", "entities"]


@dataclass(frozen=True)
class GibsonScore:
    am_size: int
    min_level: int
    freq_b: int
    freq_t: int
    rootedness: int
    new_times_known: int

    @property
    def total(self) -> int:
        return (
            self.am_size + self.min_level + self.freq_b + self.freq_t
            + self.rootedness + self.new_times_known
        )


@dataclass
class GibsonState:
    known: set[int] = field(default_factory=set)
    alive: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    new_counts: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    mapped_base: set[int] = field(default_factory=set)
    selections: list[int] = field(default_factory=list)
    fork_depth: int = 0
    cycle: int = 0
    universe: np.ndarray | None = None

    @property
    def candidates(self) -> set[int]:
        """Match ids still eligible for selection."""
        if self.universe is None:
            return set()
        return set(self.universe[self.alive].tolist())

    def copy(self) -> "GibsonState":
        return GibsonState(
            known=set(self.known),
            alive=self.alive.copy(),
            new_counts=self.new_counts.copy(),
            mapped_base=set(self.mapped_base),
            selections=list(self.selections),
            fork_depth=self.fork_depth,
            cycle=self.cycle,
            universe=self.universe,
        )


@dataclass
class GibsonResult:
    gmaps: list[GMap]
    cycles_to_best: int
    forks_taken: int
    report: RunReport
    selections: list[int] = field(default_factory=list)
    matches: MatchSet | None = field(default=None, repr=False)


def best_map_potential(m: MatchHypothesis, state: GibsonState, matches: MatchSet) -> GibsonScore:
    new = matches.closure(m.id) - state.known
    return GibsonScore(
        am_size=len(m.arg_matches),
        min_level=m.min_level,
        freq_b=m.freq_b,
        freq_t=m.freq_t,
        rootedness=m.rootedness,
        new_times_known=len(new) * len(state.known),
    )


class _Engine:
    """Vectorised bookkeeping for one match set.

    Candidates are valid matches whose own closure is one-to-one. For each
    match the engine knows which candidates contain it in their closure, so
    adding a match to the g-map updates new-match counts and excludes
    conflicting candidates without rescanning closures.
    """

    def __init__(self, matches: MatchSet, stop: StopRule = "all"):
        self.matches = matches
        ids = [m.id for m in matches.matches if m.valid and matches.closure_consistent(m.id)]
        self.ids = np.array(ids, dtype=np.int64)
        self.pos = {mid: i for i, mid in enumerate(ids)}
        self.static = np.array([matches[mid].static_score for mid in ids], dtype=np.int64)
        self.sizes = np.array([len(matches.closure(mid)) for mid in ids], dtype=np.int64)
        holders: dict[int, list[int]] = {}
        for i, mid in enumerate(ids):
            for x in matches.closure(mid):
                holders.setdefault(x, []).append(i)
        self.holders = {x: np.array(v, dtype=np.int64) for x, v in holders.items()}
        self._empty = np.zeros(0, dtype=np.int64)
        base = matches.base
        if stop == "entities":
            self.goal = len(base.entities)
            self._counts = lambda eid: base.elements[eid].is_entity
        else:
            self.goal = len(base.elements)
            self._counts = lambda eid: True

    def initial(self) -> GibsonState:
        return GibsonState(
            alive=np.ones(len(self.ids), dtype=bool),
            new_counts=self.sizes.copy(),
            universe=self.ids,
        )

    def scores(self, state: GibsonState) -> np.ndarray:
        return self.static + state.new_counts * len(state.known)

    def finished(self, state: GibsonState) -> bool:
        return not state.alive.any() or len(state.mapped_base) >= self.goal

    def _rivals(self, mid: int) -> list[int]:
        m = self.matches[mid]
        out = [y for y in self.matches.by_base.get(m.base, ()) if y != mid]
        out += [y for y in self.matches.by_target.get(m.target, ()) if y != mid]
        return out

    def conflicts(self, a: int, b: int) -> bool:
        ms = self.matches
        return not ms.is_consistent(ms.closure(int(self.ids[a])) | ms.closure(int(self.ids[b])))

    def select(self, state: GibsonState, position: int) -> None:
        mid = int(self.ids[position])
        for x in sorted(self.matches.closure(mid) - state.known):
            state.known.add(x)
            xb = self.matches[x].base
            if self._counts(xb):
                state.mapped_base.add(xb)
            holders = self.holders.get(x, self._empty)
            state.new_counts[holders] -= 1
            if x in self.pos:
                state.alive[self.pos[x]] = False
            for y in self._rivals(x):
                state.alive[self.holders.get(y, self._empty)] = False
        state.selections.append(mid)
        state.cycle += 1


def _run(matches: MatchSet, fork_cap: int, stop: StopRule) -> tuple[list[tuple[GibsonState, int]], int]:
    engine = _Engine(matches, stop)
    pending = [engine.initial()]
    branches = 1
    forks = 0
    finished: list[tuple[GibsonState, int]] = []
    while pending:
        state = pending.pop()
        while not engine.finished(state):
            scores = np.where(state.alive, engine.scores(state), -1)
            top = scores.max()
            tied = np.flatnonzero(scores == top)
            winner = int(tied[0])
            for alt in tied[1:]:
                if branches >= fork_cap:
                    break
                alt = int(alt)
                if not engine.conflicts(winner, alt):
                    continue
                child = state.copy()
                child.fork_depth += 1
                engine.select(child, alt)
                pending.append(child)
                branches += 1
                forks += 1
            engine.select(state, winner)
        finished.append((state, state.cycle))
    return finished, forks


def gibson_map(
    base: Domain,
    target: Domain,
    rules: RuleSet = GIBSON_RULES,
    fork_cap: int = DEFAULT_FORK_CAP,
    stop: StopRule = "all",
    reference=None,
    matches: MatchSet | None = None,
) -> GibsonResult:
    """Map ``base`` onto ``target``.

    Returns the distinct g-maps found across all branches, best first (score
    descending, then ascending member ids). ``reference`` is an optional
    collection of (base id, target id) pairs used for ``percent_correct``.
    """
    if fork_cap < 1:
        raise ValueError("fork_cap must be >= 1")
    t0 = time.perf_counter()
    if matches is None:
        matches = generate_matches(base, target, rules)
    finished, forks = _run(matches, fork_cap, stop)
    distinct: dict[tuple[int, ...], tuple[GMap, int, list[int]]] = {}
    for state, cycles in finished:
        g = make_gmap(state.known, matches, state.selections)
        prior = distinct.get(g.key)
        if prior is None or cycles < prior[1]:
            distinct[g.key] = (g, cycles, state.selections)
    ranked = sorted(distinct.values(), key=lambda item: (-item[0].score, item[0].key))
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    best, cycles_to_best, selections = ranked[0]
    report = RunReport(
        strategy="gibson",
        rules=matches.rules,
        total_matches=matches.total,
        valid_matches=matches.valid_count,
        pmap_count=len(build_pmaps(matches)),
        gmap_count=len(ranked),
        best_gmap_size=len(best),
        best_gmap_score=best.score,
        cycles_to_best=cycles_to_best,
        forks=forks,
        percent_correct=None if reference is None else percent_correct(best.correspondences, reference),
        wall_time_ms=elapsed_ms,
    )
    return GibsonResult(
        gmaps=[g for g, _, _ in ranked],
        cycles_to_best=cycles_to_best,
        forks_taken=forks,
        report=report,
        selections=list(selections),
        matches=matches,
    )


def identity_pairs(domain: Domain) -> set[tuple[int, int]]:
    """The correct self-mapping: every element that occurs in some fact."""
    return {(e.id, e.id) for e in domain.elements if e.freq > 0}


def self_map(domain: Domain, rules: RuleSet = GIBSON_RULES, fork_cap: int = DEFAULT_FORK_CAP) -> GibsonResult:
    return gibson_map(domain, domain, rules, fork_cap, reference=identity_pairs(domain))
