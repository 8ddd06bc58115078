"""Instrumentation record shared by every mapping strategy."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Literal

from .matcher import RuleSet

Strategy = Literal["sme-greedy", "sme-optimal", "gibson"]
STRATEGIES: tuple[str, ...] = ("sme-greedy", "sme-optimal", "gibson")


@dataclass
class RunReport:
    strategy: Strategy
    rules: RuleSet
    total_matches: int
    valid_matches: int
    pmap_count: int
    gmap_count: int
    best_gmap_size: int
    best_gmap_score: float
    cycles_to_best: int | None = None
    forks: int | None = None
    percent_correct: float | None = None
    wall_time_ms: float | None = None

    def violations(self) -> list[str]:
        out = []
        if self.valid_matches > self.total_matches:
            out.append("valid_matches > total_matches")
        if self.best_gmap_size > self.valid_matches:
            out.append("best_gmap_size > valid_matches")
        if self.percent_correct is not None and not 0 <= self.percent_correct <= 100:
            out.append("percent_correct outside [0, 100]")
        return out

    def as_dict(self, timing: bool = True) -> dict[str, object]:
        d = asdict(self)
        d["rules"] = {"predicate_rule": self.rules.predicate_rule, "entity_mode": self.rules.entity_mode}
        if not timing:
            d["wall_time_ms"] = None
        return d


def percent_correct(correspondences, reference) -> float:
    """Share of the reference pairs recovered, as a percentage.

    An empty reference is vacuously recovered in full.
    """
    reference = set(reference)
    if not reference:
        return 100.0
    return 100.0 * len(set(correspondences) & reference) / len(reference)
