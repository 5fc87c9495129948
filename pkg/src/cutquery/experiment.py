"""Experiment harness: run named algorithms on generated graphs."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .generators import generate
from .graph import (
    all_cut_values,
    exact_cut,
    exact_max_cut,
    exact_min_cut,
    exact_st_cut,
)
from .mincut import (
    approx_max_cut,
    min_cut_2round,
    min_cut_unweighted,
    min_cut_unweighted_sparsifier,
    min_cut_weighted,
    min_st_cut,
)
from .monmat import MonotoneMatrixView, random_monotone, solve_monotone
from .oracle import CutOracle, Rng, StreamOracle, read_stream, stream_source
from .packing import is_forest_family, is_maximal, pack_forests
from .sparsifier import sparsify

FIELDS = ["algorithm", "n", "m", "W", "r", "seed", "rounds", "queries",
          "value", "exact", "success", "ms"]
ALGORITHMS = ["mincut2", "mincutU", "mincutUS", "mincutW", "stcut", "maxcut",
              "monmat", "sparsify", "pack"]


@dataclass
class ExperimentSpec:
    algo: str
    gen: str | None = None
    graph: str | None = None
    stream: str | None = None
    n: int | None = None
    r: int = 2
    eps: float | None = None
    k: int | None = None
    seed: int = 0
    trials: int = 1
    verify: bool = False
    all_pairs: bool = False
    timing: bool = True
    params: dict = field(default_factory=dict)


@dataclass
class RunRecord:
    algorithm: str
    n: int
    m: int
    W: int
    r: int | None
    seed: int
    rounds: int
    queries: int
    value: object
    exact: object = None
    success: bool | None = None
    ms: float | None = None

    def as_dict(self, verify=True):
        d = asdict(self)
        if not verify:
            d.pop("exact")
        return d


def _graph_for(spec, seed):
    if spec.stream:
        events = read_stream(spec.stream)
        n = spec.n if spec.n else 1 + max(max(a, b) for a, b, _ in events)
        G = stream_source(n, events).graph()
        return G, StreamOracle(n, events)
    if spec.graph:
        G, _ = generate(f"file:{spec.graph}", seed)
    else:
        G, _ = generate(spec.gen or f"gnp:{spec.n or 32},0.3", seed)
    return G, CutOracle(G)


def _weight(G):
    return max(1, int(math.ceil(float(G.W)))) if G.m else 1


def _close(a, b):
    return a is not None and b is not None and abs(float(a) - float(b)) < 1e-9


def run_trial(spec, seed):
    """One RunRecord for ``spec`` at ``seed`` (graph and algorithm both seeded)."""
    rng = Rng(seed).child(spec.algo)
    t0 = time.perf_counter()
    if spec.algo == "monmat":
        return _monmat_trial(spec, seed, t0)
    G, O = _graph_for(spec, seed)
    W, r = _weight(G), spec.r
    exact = value = success = None
    if spec.algo in ("mincut2", "mincutU", "mincutUS", "mincutW"):
        if spec.algo == "mincut2":
            res = min_cut_2round(O, rng=rng, trials=spec.params.get("trials"))
        elif spec.algo == "mincutU":
            res = min_cut_unweighted(O, r=r, rng=rng)
        elif spec.algo == "mincutUS":
            res = min_cut_unweighted_sparsifier(O, r=r, rng=rng)
        else:
            res = min_cut_weighted(O, W=W, r=r, rng=rng, all_pairs=spec.all_pairs)
        value = res.value
        if spec.verify:
            exact = exact_min_cut(G).value
            success = bool(not res.failed and _close(exact_cut(G, res.side), value)
                           and _close(value, exact))
    elif spec.algo == "stcut":
        s, t = spec.params.get("s", 0), spec.params.get("t", G.n - 1)
        res = min_st_cut(O, s, t, r=r, rng=rng, W=W)
        value = res.value
        if spec.verify:
            exact = exact_st_cut(G, s, t).value
            success = bool(not res.failed and _close(exact_cut(G, res.side), value)
                           and _close(value, exact))
    elif spec.algo == "maxcut":
        eps = spec.eps if spec.eps is not None else 0.3
        res = approx_max_cut(O, eps, r, W, rng=rng)
        value = res.value
        if spec.verify:
            exact = exact_max_cut(G)[0].value
            success = bool(value >= (1 - eps) * exact - 1e-9)
    elif spec.algo == "sparsify":
        eps = spec.eps if spec.eps is not None else 0.25
        S = sparsify(O, eps, r, W, rng)
        value = S.graph.m
        if spec.verify:
            exact = sparsifier_error(G, S.graph)
            success = bool(exact <= eps + 1e-9)
    elif spec.algo == "pack":
        k = spec.k if spec.k else 2
        pk = pack_forests(O, k, r, rng)
        value = sum(len(f) for f in pk.forests)
        if spec.verify:
            exact = None
            success = bool(is_forest_family(pk) and is_maximal(G, pk))
    else:
        raise ValueError(f"unknown algorithm {spec.algo!r}")
    led = O.ledger
    rec = RunRecord(spec.algo, G.n, G.m, W, r, seed, led.rounds, led.queries,
                    value, exact, success, _ms(spec, t0))
    assert rec.rounds == O.ledger.rounds
    return rec


def _ms(spec, t0):
    return round(1000 * (time.perf_counter() - t0), 3) if spec.timing else None


def _monmat_trial(spec, seed, t0):
    a = spec.n or 32
    M = random_monotone(a, a, np.random.default_rng(seed))
    view = MonotoneMatrixView.from_matrix(M)
    value, _ = solve_monotone(view, spec.r)
    exact = float(M.min())
    return RunRecord("monmat", a, a * a, 0, spec.r, seed, view.rounds, view.reads,
                     value, exact if spec.verify else None,
                     bool(value == exact) if spec.verify else None, _ms(spec, t0))


def sparsifier_error(G, H):
    """Worst relative cut error of H against G over all nonempty cuts."""
    g = all_cut_values(G)[1:]
    h = all_cut_values(H)[1:]
    pos = g > 0
    err = float(np.max(np.abs(h[pos] - g[pos]) / g[pos])) if pos.any() else 0.0
    if np.any(h[~pos] > 1e-9):
        err = float("inf")
    return err


def run(spec):
    """``spec.trials`` records at seeds seed, seed+1, ...; failures are kept."""
    return [run_trial(spec, spec.seed + i) for i in range(spec.trials)]


def sweep(base, ns=(), rs=(), algos=()):
    """Median queries and rounds per (algorithm, n, r) cell."""
    rows = []
    for algo in algos:
        for n in ns:
            for r in rs:
                gen = base.gen.format(n=n) if base.gen else None
                spec = replace(base, algo=algo, n=n, r=r, gen=gen)
                recs = run(spec)
                ok = [x.success for x in recs if x.success is not None]
                rows.append({
                    "algorithm": algo, "n": n, "r": r, "runs": len(recs),
                    "median_queries": float(np.median([x.queries for x in recs])),
                    "median_rounds": float(np.median([x.rounds for x in recs])),
                    "success_rate": (sum(ok) / len(ok)) if ok else None,
                })
    return rows


def dumps(rows, fmt="json", fields=None):
    rows = list(rows)
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    buf = io.StringIO()
    fields = fields or (list(rows[0]) if rows else FIELDS)
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def records_to_rows(records, verify):
    return [rec.as_dict(verify) for rec in records]

