"""Randomized contractions driven by one round of edge samples."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oracle import Degrees, parallel, run, single
from .sampling import uniform_stage


class SamplingAbort(Exception):
    """A sampler reported failure; the trial is abandoned."""


class Partition:
    """Disjoint sets over 0..n-1.  Blocks only grow."""

    def __init__(self, n):
        self.parent = np.arange(n, dtype=np.int64)
        self.n = n

    @classmethod
    def from_labels(cls, labels):
        labels = np.asarray(labels, dtype=np.int64)
        P = cls(len(labels))
        first = {}
        for v, b in enumerate(labels.tolist()):
            if b in first:
                P.union(first[b], v)
            else:
                first[b] = v
        return P

    def find(self, x):
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return int(root)

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            ra, rb = rb, ra
        self.parent[ra] = rb
        return True

    def labels(self):
        roots = np.array([self.find(x) for x in range(self.n)], dtype=np.int64)
        _, lab = np.unique(roots, return_inverse=True)
        return lab.astype(np.int64)

    def blocks(self):
        lab = self.labels()
        return [np.flatnonzero(lab == b) for b in range(int(lab.max()) + 1)] if self.n else []

    def count(self):
        return len({self.find(x) for x in range(self.n)})

    def copy(self):
        P = Partition(self.n)
        P.parent = self.parent.copy()
        return P


def compose(labels, inner):
    """Base-vertex labels after merging view blocks by ``inner`` labels."""
    labels = np.asarray(labels, dtype=np.int64)
    return np.asarray(inner, dtype=np.int64)[labels]


# ---------------------------------------------------------------- tau-star

@dataclass(frozen=True)
class StarContractionConfig:
    tau: float | None = None      # None: max(n^(1/3), delta), read in-round
    A_star: float = 400.0

    def p(self, n, tau):
        return min(1.0, self.A_star * math.log(max(2, n)) / tau)


def tau_star_stage(n, rng, cfg=StarContractionConfig(), R=None):
    """One round: degrees plus a uniform sample from every v outside R.

    With a fixed tau the center set R is sampled with p = A log n / tau.
    When tau is left to be read from this round's degrees, the centers
    are drawn as nested sets R_j for a geometric grid tau_j = n^(1/3) 2^j
    (one uniform variate per vertex), samples are planned against each
    distinct R_j, and the grid point just below tau is used afterwards.

    Returns (Partition, info).
    """
    u = rng.child("centers").gen.random(n)
    if R is not None:
        grid = [None]
        Rs = [np.asarray(sorted(R), dtype=np.int64)]
    elif cfg.tau is not None:
        grid = [cfg.tau]
        Rs = [np.flatnonzero(u < cfg.p(n, cfg.tau))]
    else:
        base = n ** (1 / 3)
        grid = [base * 2 ** j for j in range(max(1, math.ceil(math.log2(max(2, n) / base))) + 1)]
        Rs = [np.flatnonzero(u < cfg.p(n, t)) for t in grid]
    stages, plans = [], {}
    for j, Rj in enumerate(Rs):
        key = Rj.tobytes()
        if key in plans:
            continue
        mask = np.zeros(n, bool)
        mask[Rj] = True
        outside = np.flatnonzero(~mask)
        plans[key] = (len(stages), outside)
        stages.append(uniform_stage(n, n, outside, mask[None], np.zeros(len(outside), np.int64),
                                    rng.child("sample", j).seeds(len(outside))))
    deg_stage = single(Degrees(n))
    results = yield from parallel(deg_stage, *stages)
    deg = results[0]
    delta = float(deg.min()) if n else 0.0
    tau = cfg.tau if cfg.tau is not None else max(n ** (1 / 3), delta)
    if R is not None:
        j = 0
    elif cfg.tau is not None:
        j = 0
    else:
        j = max(i for i, t in enumerate(grid) if t <= tau)
    Rj = Rs[j]
    idx, outside = plans[Rj.tobytes()]
    x, w, lv = results[1 + idx]
    P = Partition(n)
    merged = 0
    for v, xv in zip(outside.tolist(), x.tolist()):
        if deg[v] < tau:
            continue
        if xv == -2:
            raise SamplingAbort(f"uniform sampler failed at vertex {v}")
        if xv >= 0:
            P.union(v, xv)
            merged += 1
    return P, {"degrees": deg, "delta": delta, "tau": tau, "R": Rj, "merged": merged}


def tau_star_contract(oracle, rng, cfg=StarContractionConfig(), R=None):
    return run(oracle, tau_star_stage(oracle.n, rng, cfg, R))


# ---------------------------------------------------------------- 2-out

def two_out_stage(n, rng):
    """One round: two uniform incident-edge samples per vertex, contracted."""
    centers = np.repeat(np.arange(n), 2)
    masks = np.ones((1, n), bool)
    x, w, lv = yield from uniform_stage(n, n, centers, masks, np.zeros(len(centers), np.int64),
                                        rng.seeds(len(centers)))
    if np.any(x == -2):
        raise SamplingAbort("uniform sampler failed in 2-out")
    P = Partition(n)
    for c, xv in zip(centers.tolist(), x.tolist()):
        if xv >= 0:
            P.union(c, xv)
    return P


def two_out_contract(oracle, rng):
    return run(oracle, two_out_stage(oracle.n, rng))
