"""Command line: cutquery gen|run|sweep|selftest."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .experiment import ALGORITHMS, FIELDS, ExperimentSpec, dumps, records_to_rows, run, sweep
from .generators import SpecError, generate
from .graph import exact_min_cut, write_graph


def _ints(text):
    return [int(x) for x in str(text).split(",") if x]


def build_parser():
    p = argparse.ArgumentParser(prog="cutquery", description=__doc__)
    p.add_argument("command", choices=["gen", "run", "sweep", "selftest"])
    p.add_argument("--algo", choices=ALGORITHMS, default="mincut2")
    p.add_argument("--n", default=None, help="vertex count (comma list for sweep)")
    p.add_argument("--r", default="2", help="round parameter (comma list for sweep)")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--gen", default=None, help="generator spec, e.g. gnp:64,0.2 or planted:8,8,3")
    p.add_argument("--graph", default=None, help="graph file")
    p.add_argument("--stream", default=None, help="edge-update stream file")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--all-pairs", action="store_true", help="evaluate every cross-path pair")
    p.add_argument("--no-timing", action="store_true", help="emit ms as null (byte-stable output)")
    return p


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _seed(args):
    env = os.environ.get("CUTQUERY_SEED")
    return int(env) if env not in (None, "") else args.seed


def main(argv=None):
    args = build_parser().parse_args(argv)
    seed = _seed(args)
    try:
        if args.command == "gen":
            return _gen(args, seed)
        if args.command == "selftest":
            return selftest()
        spec = ExperimentSpec(
            algo=args.algo, gen=args.gen, graph=args.graph, stream=args.stream,
            n=_ints(args.n)[0] if args.n else None, r=_ints(args.r)[0], eps=args.eps, k=args.k,
            seed=seed, trials=args.trials, verify=args.verify, all_pairs=args.all_pairs,
            timing=not args.no_timing)
        if args.command == "run":
            recs = run(spec)
            rows = records_to_rows(recs, args.verify)
            fields = FIELDS if args.verify else [f for f in FIELDS if f != "exact"]
            _emit(dumps(rows, args.format, fields), args.out)
            return 0
        ns = _ints(args.n) if args.n else []
        if spec.gen is None and not (spec.graph or spec.stream):
            spec.gen = "gnp:{n},0.3"
        rows = sweep(spec, ns, _ints(args.r), [args.algo] if ns else [])
        _emit(dumps(rows, args.format), args.out)
        return 0
    except SpecError as exc:
        print(f"cutquery: {exc}", file=sys.stderr)
        return 2


def _gen(args, seed):
    spec = args.gen or (f"file:{args.graph}" if args.graph else f"gnp:{args.n or 32},0.3")
    G, info = generate(spec, seed)
    if args.out:
        write_graph(G, args.out)
    else:
        from .graph import format_weight
        lines = [f"{G.n} {G.m} {G.W}"] + [f"{a} {b} {format_weight(c)}" for a, b, c in G.edges()]
        sys.stdout.write("\n".join(lines) + "\n")
    note = f" (connected after {info['attempts']} draws)" if info.get("attempts", 1) > 1 else ""
    print(f"n={G.n} m={G.m} W={G.W} lambda={exact_min_cut(G).value}{note}", file=sys.stderr)
    return 0


def selftest():
    """Quick end-to-end checks; prints one line per check."""
    checks = [
        ("mincut2 planted:8,8,2", ExperimentSpec("mincut2", "planted:8,8,2", trials=5, verify=True),
         lambda rec: rec.rounds == 2),
        ("mincutU cycle:16 r=2", ExperimentSpec("mincutU", "cycle:16", r=2, trials=3, verify=True),
         lambda rec: rec.rounds == 5),
        ("mincutW planted:4,4,1,8 r=1", ExperimentSpec("mincutW", "planted:4,4,1,8", r=1, verify=True),
         lambda rec: rec.rounds <= 9),
        ("monmat a=32 r=2", ExperimentSpec("monmat", n=32, r=2, trials=100, verify=True),
         lambda rec: rec.rounds <= 2),
        ("pack gnp:16,0.4 k=2", ExperimentSpec("pack", "gnp:16,0.4", k=2, r=2, trials=3, verify=True),
         lambda rec: rec.rounds == 4),
    ]
    ok_all = True
    for name, spec, rounds_ok in checks:
        recs = run(spec)
        ok = all(rec.success and rounds_ok(rec) for rec in recs)
        ok_all &= ok
        med = int(np.median([rec.queries for rec in recs]))
        print(f"{'PASS' if ok else 'FAIL'}  {name}  runs={len(recs)} median_queries={med}")
    return 0 if ok_all else 1


if __name__ == "__main__":
    sys.exit(main())
