"""Command-line front end: ``structmap {parse,map,selfmap,bench,gen}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .dsl import parse_corpus, serialize, serialize_corpus
from .generator import GeneratorError, GeneratorSpec, generate_domain
from .gibson import DEFAULT_FORK_CAP, identity_pairs
from .harness import (
    BenchJob,
    bench_specs,
    default_rules,
    outcome_json,
    rows_to_csv,
    run_bench,
    run_strategy,
)
from .mapper import DEFAULT_PMAP_CAP, PMapBudgetExceeded
from .matcher import RuleSet
from .report import STRATEGIES

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNKNOWN_DOMAIN = 3
EXIT_CAP = 4
EXIT_USAGE = 5


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _strategies(text: str) -> list[str]:
    names = [x.strip() for x in text.split(",") if x.strip()]
    for n in names:
        if n not in STRATEGIES:
            raise argparse.ArgumentTypeError(f"unknown strategy {n!r}; choose from {', '.join(STRATEGIES)}")
    return names


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(obj: object) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load(path: str):
    try:
        source = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise _CliError(EXIT_PARSE, f"cannot read {path}: {err}")
    result = parse_corpus(source)
    for d in result.diagnostics:
        print(f"{path}:{d}", file=sys.stderr)
    if not result.ok:
        raise _CliError(EXIT_PARSE, f"{path}: corpus has errors")
    return result.domains


def _domain(domains, name: str):
    if name not in domains:
        known = ", ".join(domains) or "none"
        raise _CliError(EXIT_UNKNOWN_DOMAIN, f"unknown domain {name!r} (known: {known})")
    return domains[name]


def _rules(args, strategy: str) -> RuleSet:
    base = default_rules(strategy)
    return RuleSet(
        args.pred_rule or base.predicate_rule,
        args.entity_mode or base.entity_mode,
    )


def _reference(path: str | None, base, target):
    """Reference pairs from a JSON list of ``[base_text, target_text]``."""
    if path is None:
        return identity_pairs(base) if base is target else None
    try:
        pairs = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as err:
        raise _CliError(EXIT_USAGE, f"cannot read reference {path}: {err}")
    b_ids, t_ids = base.by_text(), target.by_text()
    out = set()
    for b, t in pairs:
        if b not in b_ids or t not in t_ids:
            raise _CliError(EXIT_USAGE, f"reference pair {b!r} ~ {t!r} names unknown elements")
        out.add((b_ids[b], t_ids[t]))
    return out


def _add_rule_flags(p: argparse.ArgumentParser, strategy_default: str | None = "gibson") -> None:
    if strategy_default is not None:
        p.add_argument("--strategy", choices=STRATEGIES, default=strategy_default)
    p.add_argument("--pred-rule", choices=("identical", "free"), default=None,
                   help="predicate matching rule (default depends on strategy)")
    p.add_argument("--entity-mode", choices=("sanctioned", "all"), default=None,
                   help="entity matching mode (default depends on strategy)")
    p.add_argument("--fork-cap", type=int, default=DEFAULT_FORK_CAP)
    p.add_argument("--pmap-cap", type=int, default=DEFAULT_PMAP_CAP)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="structmap", description="Structure-mapping analogy engines.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="check a corpus and summarise its domains")
    p.add_argument("corpus")
    p.add_argument("--canonical", action="store_true", help="print the canonical corpus text instead")
    p.add_argument("--out")

    p = sub.add_parser("map", help="map one domain onto another")
    p.add_argument("corpus")
    p.add_argument("base")
    p.add_argument("target")
    _add_rule_flags(p)
    p.add_argument("--reference", help="JSON list of [base, target] element pairs")
    p.add_argument("--timing", action="store_true", help="include wall_time_ms in the output")
    p.add_argument("--out")

    p = sub.add_parser("selfmap", help="map domains onto themselves")
    p.add_argument("corpus")
    p.add_argument("domains", nargs="*", help="domain names (default: all)")
    _add_rule_flags(p)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")

    p = sub.add_parser("bench", help="run strategies over generated instances")
    p.add_argument("--strategy", type=_strategies, default=list(STRATEGIES),
                   help="comma-separated strategies (default: all)")
    _add_rule_flags(p, strategy_default=None)
    p.add_argument("--entities", type=_ints, default=[8])
    p.add_argument("--facts", type=_ints, default=[8])
    p.add_argument("--max-level", type=_ints, default=[2])
    p.add_argument("--pool", type=_ints, default=[8])
    p.add_argument("--ambiguity", type=_floats, default=[0.5])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=1, help="instances per parameter combination")
    p.add_argument("--self", action="store_true", help="map each generated domain onto itself")
    p.add_argument("--repeats", type=int, default=5, help="timing repeats (median is reported)")
    p.add_argument("--timing", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--out")

    p = sub.add_parser("gen", help="write a generated domain as corpus text")
    p.add_argument("--entities", type=int, default=8)
    p.add_argument("--facts", type=int, default=8)
    p.add_argument("--max-level", type=int, default=2)
    p.add_argument("--pool", type=int, default=8)
    p.add_argument("--ambiguity", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default="generated")
    p.add_argument("--out")
    return parser


def _cmd_parse(args) -> int:
    domains = _load(args.corpus)
    if args.canonical:
        _emit(serialize_corpus(domains), args.out)
        return EXIT_OK
    summary = [
        {
            "name": d.name,
            "entities": len(d.entities),
            "expressions": len(d.expressions),
            "facts": len(d.facts),
            "roots": len(d.roots()),
            "max_level": max((e.level for e in d.elements), default=0),
        }
        for d in domains.values()
    ]
    _emit(_dump({"domains": summary}), args.out)
    return EXIT_OK


def _cmd_map(args) -> int:
    domains = _load(args.corpus)
    base = _domain(domains, args.base)
    target = base if args.target == args.base else _domain(domains, args.target)
    reference = _reference(args.reference, base, target)
    outcome = run_strategy(base, target, args.strategy, _rules(args, args.strategy),
                           args.fork_cap, args.pmap_cap, reference)
    _emit(_dump(outcome_json(outcome, args.timing)), args.out)
    return EXIT_OK


def _cmd_selfmap(args) -> int:
    domains = _load(args.corpus)
    names = args.domains or list(domains)
    rules = _rules(args, args.strategy)
    results = []
    for name in names:
        d = _domain(domains, name)
        outcome = run_strategy(d, d, args.strategy, rules, args.fork_cap, args.pmap_cap)
        results.append((name, outcome))
    if args.format == "json":
        _emit(_dump([dict(domain=n, **outcome_json(o, args.timing)) for n, o in results]), args.out)
    else:
        rows = []
        for n, o in results:
            row = o.report.as_dict(args.timing)
            row.update(row.pop("rules"))
            rows.append(dict(domain=n, **row))
        _emit(_csv(rows), args.out)
    return EXIT_OK


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: "" if v is None else v for k, v in r.items()})
    return buf.getvalue()


def _cmd_bench(args) -> int:
    if args.workers < 1 or args.seeds < 1 or args.repeats < 1:
        raise _CliError(EXIT_USAGE, "--workers, --seeds and --repeats must be positive")
    rules = None
    if args.pred_rule or args.entity_mode:
        rules = RuleSet(args.pred_rule or "identical", args.entity_mode or "sanctioned")
    specs = bench_specs(args.entities, args.facts, args.max_level, args.pool, args.ambiguity,
                        args.seed, args.seeds)
    jobs = [
        BenchJob(i, spec, tuple(args.strategy), rules, args.self, args.fork_cap, args.pmap_cap,
                 args.repeats, args.timing)
        for i, spec in enumerate(specs)
    ]
    rows = run_bench(jobs, args.workers)
    if args.format == "csv":
        _emit(rows_to_csv(rows), args.out)
    else:
        _emit(_dump(rows), args.out)
    return EXIT_OK


def _cmd_gen(args) -> int:
    spec = GeneratorSpec(args.entities, args.facts, args.max_level, args.pool, args.ambiguity, args.seed)
    try:
        domain = generate_domain(spec, args.name)
    except GeneratorError as err:
        raise _CliError(EXIT_USAGE, str(err))
    _emit(serialize(domain), args.out)
    return EXIT_OK


_COMMANDS = {
    "parse": _cmd_parse,
    "map": _cmd_map,
    "selfmap": _cmd_selfmap,
    "bench": _cmd_bench,
    "gen": _cmd_gen,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _CliError as err:
        print(f"structmap: {err}", file=sys.stderr)
        return err.code
    except PMapBudgetExceeded as err:
        print(f"structmap: {err}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as err:
        print(f"structmap: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
