"""Run strategies end to end and collect benchmark rows."""
from __future__ import annotations

import csv
import io
import itertools
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .domain import Domain
from .generator import GeneratorError, GeneratorSpec, generate_domain
from .gibson import DEFAULT_FORK_CAP, gibson_map, identity_pairs
from .mapper import DEFAULT_PMAP_CAP, GMap, PMapBudgetExceeded, build_pmaps, greedy_merge, optimal_merge
from .matcher import GIBSON_RULES, SME_RULES, MatchSet, RuleSet, generate_matches
from .report import STRATEGIES, RunReport, percent_correct

# Target domains in paired bench instances are generated from seed + offset.
TARGET_SEED_OFFSET = 1_000_003


def default_rules(strategy: str) -> RuleSet:
    return GIBSON_RULES if strategy == "gibson" else SME_RULES


@dataclass
class MapOutcome:
    report: RunReport
    gmaps: list[GMap]
    matches: MatchSet


def run_strategy(
    base: Domain,
    target: Domain,
    strategy: str,
    rules: RuleSet | None = None,
    fork_cap: int = DEFAULT_FORK_CAP,
    pmap_cap: int = DEFAULT_PMAP_CAP,
    reference=None,
) -> MapOutcome:
    """Map ``base`` onto ``target`` with one strategy.

    When ``base is target`` and no reference is given, the identity mapping
    is used as the reference for ``percent_correct``.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    rules = rules or default_rules(strategy)
    if reference is None and base is target:
        reference = identity_pairs(base)

    if strategy == "gibson":
        res = gibson_map(base, target, rules, fork_cap, reference=reference)
        return MapOutcome(res.report, res.gmaps, res.matches)

    t0 = time.perf_counter()
    matches = generate_matches(base, target, rules)
    pmaps = build_pmaps(matches)
    if strategy == "sme-greedy":
        # reported best first, like the other strategies
        gmaps = sorted(greedy_merge(pmaps, matches), key=lambda g: (-g.score, g.key))
    else:
        gmaps = [optimal_merge(pmaps, matches, pmap_cap)]
    elapsed = (time.perf_counter() - t0) * 1000.0
    best = gmaps[0] if gmaps else None
    report = RunReport(
        strategy=strategy,  # type: ignore[arg-type]
        rules=rules,
        total_matches=matches.total,
        valid_matches=matches.valid_count,
        pmap_count=len(pmaps),
        gmap_count=len(gmaps),
        best_gmap_size=len(best) if best else 0,
        best_gmap_score=best.score if best else 0,
        percent_correct=(
            None if reference is None
            else percent_correct(best.correspondences if best else (), reference)
        ),
        wall_time_ms=elapsed,
    )
    return MapOutcome(report, gmaps, matches)


def gmap_json(gmap: GMap, matches: MatchSet) -> dict[str, object]:
    corr = []
    for b, t in gmap.correspondences:
        kind = "entity" if matches.base.elements[b].is_entity else "expression"
        corr.append({"base": matches.base.render(b), "target": matches.target.render(t), "kind": kind})
    return {"score": gmap.score, "correspondences": corr, "provenance": list(gmap.provenance)}


def outcome_json(outcome: MapOutcome, timing: bool = False) -> dict[str, object]:
    return {
        "report": outcome.report.as_dict(timing),
        "gmaps": [gmap_json(g, outcome.matches) for g in outcome.gmaps],
    }


BENCH_FIELDS = [
    "instance", "seed", "n_entities", "n_facts", "max_level", "predicate_pool", "ambiguity",
    "pairing", "strategy", "predicate_rule", "entity_mode", "total_matches", "valid_matches",
    "pmap_count", "gmap_count", "best_gmap_size", "best_gmap_score", "cycles_to_best", "forks",
    "percent_correct", "wall_time_ms", "error",
]


@dataclass(frozen=True)
class BenchJob:
    instance: int
    spec: GeneratorSpec
    strategies: tuple[str, ...]
    rules: RuleSet | None = None
    self_pair: bool = False
    fork_cap: int = DEFAULT_FORK_CAP
    pmap_cap: int = DEFAULT_PMAP_CAP
    repeats: int = 5
    timing: bool = False


def bench_specs(
    entities, facts, levels, pools, ambiguities, seed: int, seeds: int
) -> list[GeneratorSpec]:
    return [
        GeneratorSpec(n, f, lvl, pool, amb, seed + k)
        for n, f, lvl, pool, amb, k in itertools.product(
            entities, facts, levels, pools, ambiguities, range(seeds)
        )
    ]


def run_job(job: BenchJob) -> list[dict[str, object]]:
    spec = job.spec
    common = {
        "instance": job.instance, "seed": spec.seed, "n_entities": spec.n_entities,
        "n_facts": spec.n_facts, "max_level": spec.max_level,
        "predicate_pool": spec.predicate_pool, "ambiguity": spec.ambiguity,
        "pairing": "self" if job.self_pair else "pair",
    }
    try:
        base = generate_domain(spec, "base")
        target = base if job.self_pair else generate_domain(
            replace(spec, seed=spec.seed + TARGET_SEED_OFFSET), "target"
        )
    except GeneratorError as err:
        return [dict(common, strategy=s, error=f"generator: {err}") for s in job.strategies]

    rows = []
    for strategy in job.strategies:
        rules = job.rules or default_rules(strategy)
        row = dict(common, strategy=strategy, predicate_rule=rules.predicate_rule,
                   entity_mode=rules.entity_mode)
        try:
            times = []
            for _ in range(job.repeats if job.timing else 1):
                outcome = run_strategy(base, target, strategy, rules, job.fork_cap, job.pmap_cap)
                times.append(outcome.report.wall_time_ms)
        except PMapBudgetExceeded as err:
            rows.append(dict(row, error=f"budget: {err}"))
            continue
        rep = outcome.report
        row.update(
            total_matches=rep.total_matches, valid_matches=rep.valid_matches,
            pmap_count=rep.pmap_count, gmap_count=rep.gmap_count,
            best_gmap_size=rep.best_gmap_size, best_gmap_score=rep.best_gmap_score,
            cycles_to_best=rep.cycles_to_best, forks=rep.forks,
            percent_correct=rep.percent_correct,
            wall_time_ms=round(statistics.median(times), 3) if job.timing else None,
        )
        bad = rep.violations()
        if bad:
            row["error"] = "report: " + "; ".join(bad)
        rows.append(row)
    return rows


def run_bench(jobs: list[BenchJob], workers: int = 1) -> list[dict[str, object]]:
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run_job, jobs))
    else:
        chunks = [run_job(j) for j in jobs]
    order = {s: i for i, s in enumerate(STRATEGIES)}
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (r["instance"], order.get(str(r["strategy"]), 99)))
    return rows


def rows_to_csv(rows: list[dict[str, object]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in BENCH_FIELDS})
    return buf.getvalue()
