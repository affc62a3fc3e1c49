"""Command line front end: ``immersion <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bench, selftest
from .certify import verify_strong_immersion
from .errors import (
    BadParams,
    DegreeTooLow,
    DigestMismatch,
    FormatError,
    ImmersionError,
    InvariantBreach,
    LiftViolation,
)
from .extract import run_extraction
from .formats import read_certificate, read_graph, write_certificate, write_graph
from .generators import gen
from .oracle import Exhausted, OracleBudget, Yes, decide_immersion

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_DEGREE = 2
EXIT_BREACH = 3
EXIT_EXHAUSTED = 4
EXIT_INPUT = 5


def default_seed() -> int:
    try:
        return int(os.environ.get("IMMERSION_SEED", "0"))
    except ValueError:
        return 0


def _param(text: str) -> tuple[str, object]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def cmd_extract(args) -> int:
    g = read_graph(args.inp)
    trace_file = open(args.trace, "w") if args.trace else None

    def trace(rec: dict) -> None:
        trace_file.write(json.dumps(rec) + "\n")

    try:
        run = run_extraction(
            g, args.t, tree_fallback=args.tree_fallback, seed=args.seed,
            trace=trace if trace_file else None,
        )
    except DegreeTooLow as exc:
        print(f"degree too low: {exc}", file=sys.stderr)
        return EXIT_DEGREE
    except (InvariantBreach, LiftViolation) as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return EXIT_BREACH
    finally:
        if trace_file:
            trace_file.close()
    write_certificate(args.out, run.certificate)
    print(f"K_{args.t} certificate written to {args.out} (route {run.route}, d={run.d})")
    return EXIT_OK


def cmd_verify(args) -> int:
    g = read_graph(args.inp)
    cert = read_certificate(args.cert)
    try:
        verdict = verify_strong_immersion(g, cert, strong=not args.weak)
    except DigestMismatch as exc:
        print(f"reject: {exc}")
        return EXIT_REJECT
    print(verdict.describe())
    return EXIT_OK if verdict else EXIT_REJECT


def cmd_oracle(args) -> int:
    g = read_graph(args.inp)
    budget = OracleBudget(args.budget, args.time_cap)
    out = decide_immersion(g, args.t, strong=args.strong, budget=budget, symmetry=args.symmetry, jobs=args.jobs)
    if isinstance(out, Yes):
        print(f"yes ({out.nodes} nodes)")
        if args.cert_out:
            write_certificate(args.cert_out, out.certificate)
        return EXIT_OK
    if isinstance(out, Exhausted):
        print(f"exhausted after {out.nodes} nodes ({out.reason})")
        return EXIT_EXHAUSTED
    print(f"no ({out.nodes} nodes, {out.branch_sets} branch sets)")
    return EXIT_REJECT


def cmd_gen(args) -> int:
    g = gen(args.family, dict(args.params), args.seed)
    comment = f"family {args.family} params {json.dumps(dict(args.params), sort_keys=True)} seed {args.seed}"
    write_graph(args.out, g, [comment])
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = selftest.run_selftest(args.level, seed=args.seed, only=args.suite or None)
    for r in results:
        status = "ok" if r.ok else "FAIL"
        print(f"{status:4} {r.name}: {r.cases} cases, {len(r.violations)} violations ({r.seconds:.1f}s)")
        for v in r.violations:
            print(f"     {v}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([{"name": r.name, "cases": r.cases, "violations": r.violations, "notes": r.notes}
                       for r in results], fh, indent=1)
    return EXIT_OK if all(r.ok for r in results) else EXIT_REJECT


def cmd_bench(args) -> int:
    report = bench.run_suite(args.suite, jobs=args.jobs)
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=1)
    for r in report["records"]:
        print(f"{r['name']:16} n={r['n']:4} t={r['t']} {r['seconds']:7.2f}s {r['route']}")
    return EXIT_OK if report["all_verified"] else EXIT_REJECT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="immersion", description="Strong clique immersions in dense graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("extract", help="find a K_t strong immersion certificate")
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--trace")
    s.add_argument("--seed", type=int, default=default_seed())
    s.add_argument("--tree-fallback", choices=["strict5", "allow6"], default="strict5")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("verify", help="check a certificate against a graph")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--cert", required=True)
    s.add_argument("--weak", action="store_true", help="allow paths through branch vertices")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("oracle", help="exact search on a small graph")
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--strong", action="store_true")
    s.add_argument("--budget", type=int, default=10**8, help="search node cap")
    s.add_argument("--time-cap", type=float, default=1800.0, help="seconds")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--symmetry", action="store_true", help="skip branch sets equivalent under automorphisms")
    s.add_argument("--cert-out")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("gen", help="write a generated instance")
    s.add_argument("--family", required=True)
    s.add_argument("--params", nargs="*", type=_param, default=[], metavar="KEY=VALUE")
    s.add_argument("--seed", type=int, default=default_seed())
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("selftest", help="run the randomized invariant suites")
    s.add_argument("--level", choices=sorted(selftest.LEVELS), default="quick")
    s.add_argument("--full", dest="level", action="store_const", const="full", help="same as --level full")
    s.add_argument("--seed", type=int, default=default_seed())
    s.add_argument("--suite", action="append", choices=sorted(selftest.SUITES))
    s.add_argument("--json")
    s.set_defaults(func=cmd_selftest)

    s = sub.add_parser("bench", help="benchmark the extraction")
    s.add_argument("--suite", choices=sorted(bench.SUITES), default="default")
    s.add_argument("--out", required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, BadParams, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ImmersionError as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BREACH


if __name__ == "__main__":
    sys.exit(main())
