"""Acceptance suite: one test per criterion, each recorded as a PASS/FAIL line
in the terminal summary (see conftest.py)."""
import os
import resource
import subprocess
import sys
import time

import numpy as np
import pytest

import oracles
from structmap import (
    GIBSON_RULES,
    SME_RULES,
    GeneratorSpec,
    RuleSet,
    best_map_potential,
    build_pmaps,
    generate_domain,
    generate_matches,
    gibson_map,
    greedy_merge,
    optimal_merge,
    self_map,
)
from structmap.gibson import _Engine
from structmap.harness import run_strategy
from structmap.mapper import check_gmap
from structmap.matcher import match_count_profile

RESULTS: list[str] = []

# Self-maps of generated domains with reused predicate names can have a few
# hundred consistent p-maps; the exact merge handles them in well under a
# second, so the default budget is lifted here rather than skipping domains.
SELF_MAP_CAP = 1000

CANONICAL = {
    ("pressure(beaker)", "temperature(coffee)"),
    ("beaker", "coffee"),
    ("vial", "ice-cube"),
    ("pipe", "bar"),
    ("water", "heat"),
}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def top_pairs(outcome):
    ms = outcome.matches
    g = outcome.gmaps[0]
    return {(ms.base.render(b), ms.target.render(t)) for b, t in g.correspondences}


def test_criterion_1_classic_flow(classics):
    b, t = classics["water-flow"], classics["heat-flow"]
    problems, times = [], {}
    for strategy in ("sme-greedy", "sme-optimal", "gibson"):
        t0 = time.perf_counter()
        out = run_strategy(b, t, strategy)
        times[strategy] = time.perf_counter() - t0
        missing = CANONICAL - top_pairs(out)
        if missing:
            problems.append(f"{strategy} misses {sorted(missing)}")
        if times[strategy] >= 1.0:
            problems.append(f"{strategy} took {times[strategy]:.3f}s")
    ms = generate_matches(b, t, GIBSON_RULES)
    oracle = optimal_merge(build_pmaps(ms), ms)
    res = gibson_map(b, t, GIBSON_RULES)
    if res.gmaps[0].members != oracle.members:
        problems.append("gibson rank 1 differs from optimal_merge")
    slowest = max(times.values())
    record(1, not problems, "; ".join(problems) or f"5/5 correspondences in every top g-map, gibson rank 1 = oracle, slowest {slowest * 1000:.1f} ms")


def _random_pairs(count: int):
    """Small generated pairs within the default p-map cap, drawn by seed."""
    seed = 0
    while count:
        n = 3 + seed % 6
        spec = GeneratorSpec(n, n, 2 + seed % 2, 6, 0.5, seed)
        ms = generate_matches(generate_domain(spec, "b"),
                              generate_domain(GeneratorSpec(n, n, spec.max_level, 6, 0.5, seed + 500_000), "t"),
                              SME_RULES)
        pmaps = build_pmaps(ms)
        seed += 1
        if sum(p.internally_consistent for p in pmaps) > 20:
            continue
        count -= 1
        yield ms, pmaps


def test_criterion_2a_greedy_vs_optimal():
    total = equal = violations = worse = 0
    for ms, pmaps in _random_pairs(200):
        total += 1
        best = optimal_merge(pmaps, ms)
        greedy = greedy_merge(pmaps, ms)
        first = greedy[0].score if greedy else 0
        worse += first > best.score
        equal += first == best.score
        for g in greedy + [best]:
            violations += bool(check_gmap(g.members, ms))
    ok = total == 200 and worse == 0 and violations == 0
    record(2, ok, f"(a) {total} pairs, greedy > optimal on {worse}, invariant violations {violations}, "
                  f"greedy = optimal rate {100 * equal / total:.1f}%")


def test_criterion_2b_gibson_oracle_on_classics(classics):
    bad = []
    for b_name, t_name in (("water-flow", "heat-flow"), ("solar-system", "rutherford-atom")):
        b, t = classics[b_name], classics[t_name]
        ms = generate_matches(b, t, GIBSON_RULES)
        oracle = optimal_merge(build_pmaps(ms), ms)
        res = gibson_map(b, t, GIBSON_RULES)
        if res.gmaps[0].members != oracle.members:
            bad.append(f"{b_name}/{t_name}")
    record(2, not bad, f"(b) gibson rank 1 equals optimal_merge on both classics" if not bad else f"(b) differs on {bad}")


def test_criterion_3_self_map_identity(classics):
    failures = []
    for name, d in classics.items():
        ms = generate_matches(d, d, SME_RULES)
        best = optimal_merge(build_pmaps(ms), ms, cap=SELF_MAP_CAP)
        if set(best.correspondences) != oracles.identity(d):
            failures.append(f"optimal {name}")
    generated = 0
    for seed in range(100):
        n = 2 + seed % 10
        d = generate_domain(GeneratorSpec(n, n, 1 + seed % 3, 8, 0.5, seed), "g")
        ms = generate_matches(d, d, SME_RULES)
        best = optimal_merge(build_pmaps(ms), ms, cap=SELF_MAP_CAP)
        if set(best.correspondences) != oracles.identity(d):
            failures.append(f"optimal generated seed {seed}")
        generated += 1
    gib = 0
    for seed in range(100):
        n = 2 + seed % 15
        d = generate_domain(GeneratorSpec(n, n, 1 + seed % 4, 500, 0.0, seed), "g")
        pc = self_map(d, GIBSON_RULES).report.percent_correct
        if pc != 100.0:
            failures.append(f"gibson ambiguity-0 seed {seed}: {pc}")
        gib += 1
    record(3, not failures,
           f"optimal 100% on {len(classics)} bundled + {generated} generated, gibson 100% on {gib} ambiguity-0 domains"
           if not failures else f"failures: {failures[:5]}")


def test_criterion_4_growth_exponent():
    t0 = time.perf_counter()
    slopes = {}
    for rules in (RuleSet("free", "all"), RuleSet("identical", "all")):
        pts = [p for seed in range(10) for p in match_count_profile(8, rules, seed, steps=4)]
        sizes = np.log([s for s, _ in pts])
        counts = np.log([c for _, c in pts])
        slopes[rules.predicate_rule] = float(np.polyfit(sizes, counts, 1)[0])
    elapsed = time.perf_counter() - t0
    ok = all(1.8 <= s <= 2.2 for s in slopes.values()) and elapsed < 120
    detail = ", ".join(f"{k}+all slope {v:.3f}" for k, v in slopes.items())
    record(4, ok, f"{detail} over sizes 8-64 x 10 seeds, {elapsed:.1f}s")


def test_criterion_5_feature_oracle(classics):
    checked = dynamic = 0
    mismatches = []
    names = list(classics)
    for b_name in names:
        for t_name in names:
            b, t = classics[b_name], classics[t_name]
            ms = generate_matches(b, t, GIBSON_RULES)
            eng = _Engine(ms)
            state = eng.initial()
            while True:
                known = {(ms[k].base, ms[k].target) for k in state.known}
                for m in ms.matches:
                    if not m.valid:
                        continue
                    s = best_map_potential(m, state, ms)
                    want = oracles.static_terms(b, t, m.base, m.target)
                    want["new_times_known"] = oracles.dynamic_term(b, t, m.base, m.target, known)
                    got = {k: getattr(s, k) for k in want}
                    if got != want or s.total != sum(want.values()):
                        mismatches.append((b_name, t_name, m.id))
                    checked += 1
                    dynamic += bool(want["new_times_known"])
                if eng.finished(state):
                    break
                scores = np.where(state.alive, eng.scores(state), -1)
                eng.select(state, int(np.argmax(scores)))
    record(5, not mismatches and dynamic > 0,
           f"{checked} score evaluations over 16 bundled pairs and every cycle, {dynamic} with a non-zero product term, "
           f"{len(mismatches)} mismatches")


def test_criterion_6_determinism(classics_path, tmp_path):
    cmd = [sys.executable, "-m", "structmap"]
    outputs = []
    for k in range(2):
        csv_path = tmp_path / f"bench{k}.csv"
        json_path = tmp_path / f"map{k}.json"
        subprocess.run(cmd + ["bench", "--entities", "4,8,12", "--seeds", "3", "--seed", "42",
                              "--workers", str(1 + k), "--out", str(csv_path)], check=True)
        subprocess.run(cmd + ["map", str(classics_path), "water-flow", "heat-flow", "--strategy", "gibson",
                              "--out", str(json_path)], check=True)
        outputs.append((csv_path.read_bytes(), json_path.read_bytes()))
    same_csv = outputs[0][0] == outputs[1][0]
    same_json = outputs[0][1] == outputs[1][1]
    record(6, same_csv and same_json,
           f"bench CSV identical: {same_csv} ({len(outputs[0][0])} bytes), map JSON identical: {same_json}")


def test_criterion_7_scale():
    spec = GeneratorSpec(100, 100, 2, 8, 0.5, 7)
    b = generate_domain(spec, "b")
    t = generate_domain(GeneratorSpec(100, 100, 2, 8, 0.5, 8), "t")
    t0 = time.perf_counter()
    res = gibson_map(b, t, GIBSON_RULES)
    elapsed = time.perf_counter() - t0
    total = res.report.total_matches
    peak_mb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
    ok = total >= 10_000 and elapsed < 600 and res.report.violations() == []
    record(7, ok, f"{total} total matches, g-map size {res.report.best_gmap_size}, {elapsed:.2f}s, "
                  f"peak RSS {peak_mb:.0f} MB")
