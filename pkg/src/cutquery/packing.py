"""Maximal k-packing of forests through the oracle in 2r rounds.

Forests live on the blocks of an initial partition P0 (the identity, or
the 2-out contraction in the unweighted min-cut pipeline).  Each of the
r iterations spends one round estimating, for every base vertex v, the
number of its edges leaving U(v) (the current all-forests-connected
class), and one round drawing edges of the contracted graph: a vertex
with probability proportional to its estimate, then a uniform edge from
it to the outside of U(v).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contraction import Partition, SamplingAbort
from .oracle import idle, run
from .sampling import degree_stage, uniform_stage


@dataclass
class ForestPacking:
    n_blocks: int
    forests: list                       # per forest: list of (a, b, base_u, base_v)
    U: np.ndarray                       # P0 block -> all-forest-connected class
    samples: list = field(default_factory=list)

    def forest_edges(self, i):
        return [(a, b) for a, b, _, _ in self.forests[i]]

    def base_edges(self):
        return [(x, y) for f in self.forests for _, _, x, y in f]


def tau_samples(k, n_blocks, r, A_pack=8.0):
    if n_blocks <= 1:
        return 0
    return math.ceil(A_pack * k * n_blocks ** (1 + 1 / r) * math.log(n_blocks))


def pack_stage(n, k, r, rng, P0_labels=None, A_pack=8.0):
    """2r rounds; returns a ForestPacking over the blocks of P0."""
    lab0 = np.arange(n) if P0_labels is None else np.asarray(P0_labels, dtype=np.int64)
    nb = int(lab0.max()) + 1 if n else 0
    forests = [Partition(nb) for _ in range(k)]
    edges = [[] for _ in range(k)]
    used = set()
    U = np.arange(nb)
    trace = []
    for it in range(r):
        ucls = U[lab0]
        ncls = int(ucls.max()) + 1
        if ncls <= 1:
            # one class: no edge leaves it, nothing to ask
            yield from idle()
            yield from idle()
            trace.append({"tau": 0, "added": 0, "classes": ncls})
            continue
        masks = np.ones((ncls, n), bool)
        masks[ucls, np.arange(n)] = False
        ids = ucls
        sub = rng.child("iter", it)
        est = yield from degree_stage(n, np.arange(n), masks, ids, sub.child("deg").seeds(n))
        est = np.asarray(est, dtype=np.float64)
        tau = tau_samples(k, int(ncls), r, A_pack) if est.sum() > 0 else 0
        if tau:
            counts = sub.child("alloc").gen.multinomial(tau, est / est.sum())
            centers = np.repeat(np.arange(n), counts)
        else:
            centers = np.zeros(0, np.int64)
        x, w, lv = yield from uniform_stage(n, n, centers, masks, ids[centers],
                                            sub.child("draw").seeds(len(centers)))
        if np.any(x == -2):
            raise SamplingAbort("uniform sampler failed during packing")
        order = sub.child("order").gen.permutation(len(centers))
        added = 0
        for j in order.tolist():
            c, y = int(centers[j]), int(x[j])
            if y < 0:
                continue
            key = (min(c, y), max(c, y))
            if key in used:
                continue
            a, b = int(lab0[c]), int(lab0[y])
            for i in range(k):
                if forests[i].union(a, b):
                    edges[i].append((a, b, key[0], key[1]))
                    used.add(key)
                    added += 1
                    break
        comp = np.stack([f.labels() for f in forests], axis=1) if nb else np.zeros((0, k), np.int64)
        _, U = np.unique(comp, axis=0, return_inverse=True)
        U = U.reshape(-1)
        trace.append({"tau": tau, "added": added, "classes": int(ncls)})
    return ForestPacking(nb, edges, U, trace)


def pack_forests(oracle, k, r, rng, A_pack=8.0, P0_labels=None):
    return run(oracle, pack_stage(oracle.n, k, r, rng, P0_labels, A_pack))


def is_maximal(G, packing, P0_labels=None):
    """Every unpacked edge between distinct blocks closes a cycle in every forest."""
    lab0 = np.arange(G.n) if P0_labels is None else np.asarray(P0_labels)
    packed = set(packing.base_edges())
    comps = []
    for f in packing.forests:
        P = Partition(packing.n_blocks)
        for a, b, _, _ in f:
            P.union(a, b)
        comps.append(P.labels())
    for x, y in zip(G.u.tolist(), G.v.tolist()):
        a, b = lab0[x], lab0[y]
        if a == b or (x, y) in packed:
            continue
        if any(c[a] != c[b] for c in comps):
            return False
    return True


def is_forest_family(packing):
    seen = set()
    for f in packing.forests:
        P = Partition(packing.n_blocks)
        for a, b, x, y in f:
            if (x, y) in seen or not P.union(a, b):
                return False
            seen.add((x, y))
    return True
