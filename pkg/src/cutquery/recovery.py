"""One-round reconstruction of a graph through cut queries.

Vertices are colored into B groups, several times independently.  For
every pair of groups (a, b) the plan asks the cross weight w(E(C_a, C_b))
and, for each bit j of a vertex's index inside its group, the cross
weight with one side restricted to members whose index has bit j set.
A pair bucket holding exactly one edge spells out both endpoints.  The
plan also asks all singleton cuts; the total weight they give is the
completeness check.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import WeightedGraph, exact_cut
from .oracle import CutSets, Family, run, single
from .sampling import log2c


class RecoveryFailure(Exception):
    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class Coloring:
    def __init__(self, colors, B):
        self.colors = colors
        self.B = B
        order = np.argsort(colors, kind="stable")
        sizes = np.bincount(colors, minlength=B)
        starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
        index = np.empty(len(colors), np.int64)
        index[order] = np.arange(len(colors)) - starts[colors[order]]
        self.index = index
        self.members = np.split(order, np.cumsum(sizes)[:-1])
        self.gbits = np.array([math.ceil(math.log2(s)) if s > 1 else 0 for s in sizes])
        nonempty = sizes > 0
        g = self.gbits[nonempty]
        k = int(nonempty.sum())
        # sum over unordered pairs of nonempty groups of (1 + g_a + g_b)
        self.queries = 3 * (k * (k - 1) // 2 + (k - 1) * int(g.sum()))


class RecoveryFamily(Family):
    def __init__(self, n, colorings, labels=None):
        self.n, self.colorings, self.labels = n, colorings, labels
        self.queries = n + sum(c.queries for c in colorings)

    def answer(self, source):
        deg = source.degrees()
        out = []
        for col in self.colorings:
            out.append(_pair_buckets(source, col))
        return deg, out


def _pair_buckets(source, col):
    """Oracle side: totals and bit sums of every nonzero pair bucket."""
    cu, cv = col.colors[source.u], col.colors[source.v]
    vis = cu != cv
    u, v, w = source.u[vis], source.v[vis], source.w[vis]
    cu, cv = cu[vis], cv[vis]
    swap = cu > cv
    p = np.where(swap, v, u)
    q = np.where(swap, u, v)
    a = np.minimum(cu, cv)
    b = np.maximum(cu, cv)
    key = a * col.B + b
    keys, inv = np.unique(key, return_inverse=True)
    tot = np.bincount(inv, weights=w, minlength=len(keys))
    gb = int(col.gbits.max()) if len(col.gbits) else 0
    ip, iq = col.index[p], col.index[q]
    pb = np.zeros((len(keys), gb))
    qb = np.zeros((len(keys), gb))
    for j in range(gb):
        pb[:, j] = np.bincount(inv, weights=w * ((ip >> j) & 1), minlength=len(keys))
        qb[:, j] = np.bincount(inv, weights=w * ((iq >> j) & 1), minlength=len(keys))
    return keys, tot, pb, qb


def _decode(col, keys, tot, pb, qb):
    """Algorithm side: singleton pair buckets -> edges."""
    found = {}
    a_all, b_all = keys // col.B, keys % col.B
    for i in range(len(keys)):
        t = tot[i]
        if t == 0:
            continue
        a, b = int(a_all[i]), int(b_all[i])
        ga, gbb = col.gbits[a], col.gbits[b]
        xp = pb[i, :ga]
        xq = qb[i, :gbb]
        if np.any((xp != 0) & (xp != t)) or np.any((xq != 0) & (xq != t)):
            continue
        ia = int(sum(1 << j for j in range(ga) if xp[j] == t))
        ib = int(sum(1 << j for j in range(gbb) if xq[j] == t))
        if ia >= len(col.members[a]) or ib >= len(col.members[b]):
            continue
        x, y = int(col.members[a][ia]), int(col.members[b][ib])
        found[(min(x, y), max(x, y))] = t
    return found


def recovery_plan(n, budget, rng, c_rec=4.0, colorings=None):
    B = max(2, math.ceil(math.sqrt(c_rec * max(1, budget))))
    k = colorings or log2c(n) + 4
    return [Coloring(rng.child("coloring", i).gen.integers(0, B, n), B) for i in range(k)]


def recover_stage(n, budget, rng, labels=None, c_rec=4.0, colorings=None):
    """One round.  Returns the recovered graph or raises RecoveryFailure."""
    plan = recovery_plan(n, budget, rng, c_rec, colorings)
    deg, parts = yield from single(RecoveryFamily(n, plan, labels))
    return decode_recovery(n, plan, deg, parts)


def decode_recovery(n, plan, deg, parts):
    edges = {}
    for col, part in zip(plan, parts):
        for e, w in _decode(col, *part).items():
            edges[e] = w
    total = float(np.sum(deg)) / 2
    got = float(sum(edges.values()))
    G = _graph(n, edges)
    if abs(got - total) > 1e-9 * max(1.0, total):
        raise RecoveryFailure(f"recovered weight {got} of {total}", G)
    return G


def _graph(n, edges):
    if not edges:
        return WeightedGraph(n)
    (u, v), w = zip(*edges.keys()), list(edges.values())
    w = np.asarray(w)
    if np.all(w == np.round(w)):
        w = np.round(w).astype(np.int64)
    return WeightedGraph(n, u, v, w)


def recover_graph(oracle, n, budget, rng, c_rec=4.0, colorings=None):
    return run(oracle, recover_stage(n, budget, rng, c_rec=c_rec, colorings=colorings))


def verify_stage(G_rec, trials, rng, labels=None):
    X = rng.gen.integers(0, 2, (trials, G_rec.n)).astype(bool)
    answers = yield from single(CutSets(X, G_rec.n, labels))
    return all(abs(a - exact_cut(G_rec, x)) < 1e-9 for a, x in zip(answers, X))


def verify_recovery(G_rec, oracle, trials, rng):
    """One round of random-set queries; true iff all match G_rec."""
    return run(oracle, verify_stage(G_rec, trials, rng))
