"""Edge-sampling primitives over the cut oracle.

Every primitive comes in two forms: a staged generator (``*_stage``)
that can be co-scheduled with others through ``oracle.parallel``, and a
plain function that runs it on an oracle.  Bulk forms take arrays of
centers so thousands of instances travel as one query family.

Sets T are given as boolean masks over the current view; a bulk call
passes a small table of masks plus one mask index per instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .graph import side_mask
from .oracle import Family, run, single

EMPTY = "empty"
FAIL = "fail"


@dataclass(frozen=True)
class SampledEdge:
    u: int
    v: int
    w: float
    level: int | None = None


def log2c(x):
    return max(1, math.ceil(math.log2(max(2, x))))


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class UniformParams:
    levels: int      # levels 0..levels
    s_max: int       # sparsity the recovery is sized for
    reps: int        # independent bucketings
    nbits: int       # id bits of the view

    @property
    def nbuckets(self):
        return 2 * self.s_max

    @property
    def queries(self):
        per_level = 1 + self.reps * self.nbuckets * (1 + self.nbits)
        return 3 * (self.levels + 1) * per_level

    @classmethod
    def for_graph(cls, n, n_view=None, s_max=None, reps=None):
        lg = log2c(n)
        return cls(levels=lg,
                   s_max=s_max or max(4, 4 * lg),
                   reps=reps or lg + 4,
                   nbits=log2c(n_view if n_view is not None else n))


@dataclass(frozen=True)
class DegreeParams:
    reps: int
    chain: int

    @property
    def queries(self):
        return 3 * self.reps * (self.chain + 1)

    @classmethod
    def for_graph(cls, n):
        lg = log2c(n)
        return cls(reps=2 * lg + 1, chain=2 * lg)


@dataclass(frozen=True)
class WeightedParams:
    levels: int
    alpha: float
    depth: int
    width: int
    shift: int

    @property
    def cap(self):
        return int(math.ceil(2 ** 8 * self.alpha))

    @property
    def round1_queries(self):
        return 3 * ((self.levels + 1) * self.depth * self.width + 1)

    @classmethod
    def for_graph(cls, n, W, c=4.0, shift=2):
        lnw = math.log2(max(2, n * W))
        alpha = c * lnw
        return cls(levels=math.ceil(lnw), alpha=alpha,
                   depth=max(1, math.ceil(10 * math.log(max(2, n)))),
                   width=math.ceil(math.e * alpha), shift=shift)


# ---------------------------------------------------------------- families

class StarFamily(Family):
    """Instances (center, mask) over one view; T is the mask minus the center."""

    def __init__(self, centers, masks, mask_ids, seeds, labels=None):
        self.centers = np.asarray(centers, dtype=np.int64)
        self.masks = np.ascontiguousarray(np.atleast_2d(masks).astype(np.bool_))
        self.mask_ids = np.asarray(mask_ids, dtype=np.int64)
        self.seeds = np.asarray(seeds, dtype=np.uint64)
        self.labels = labels


class UniformFamily(StarFamily):
    def __init__(self, params, *args, **kw):
        super().__init__(*args, **kw)
        self.params = params
        self.queries = params.queries * len(self.centers)

    def answer(self, source):
        p = self.params
        if not len(self.centers):
            return _empty3()
        indptr, nbr, wt = source.csr()
        return K.uniform_star(indptr, nbr, wt, self.centers, self.mask_ids, self.masks,
                              self.seeds, p.levels, p.reps, p.nbuckets, p.nbits)


class DegreeFamily(StarFamily):
    def __init__(self, params, *args, **kw):
        super().__init__(*args, **kw)
        self.params = params
        self.queries = params.queries * len(self.centers)

    def answer(self, source):
        if not len(self.centers):
            return np.zeros(0, np.int64)
        indptr, nbr, wt = source.csr()
        return K.degree_chain(indptr, nbr, wt, self.centers, self.mask_ids, self.masks,
                              self.seeds, self.params.reps, self.params.chain)


class WeightedRound1(StarFamily):
    def __init__(self, params, *args, **kw):
        super().__init__(*args, **kw)
        self.params = params
        self.queries = params.round1_queries * len(self.centers)

    def answer(self, source):
        p = self.params
        indptr, nbr, wt = source.csr()
        chunk = 50000
        parts = []
        for s in range(0, len(self.centers), chunk):
            sl = slice(s, s + chunk)
            parts.append(K.weighted_round1(indptr, nbr, wt, self.centers[sl], self.mask_ids[sl],
                                           self.masks, self.seeds[sl], p.levels, p.depth,
                                           p.width, p.cap))
        if not parts:
            z = np.zeros(0)
            return z, np.zeros(0, np.int64), np.zeros(1, np.int64), np.zeros(0, np.int64), np.zeros(0, np.uint64)
        Ws = np.concatenate([x[0] for x in parts])
        status = np.concatenate([x[1] for x in parts])
        ptrs, off = [np.zeros(1, np.int64)], 0
        for x in parts:
            ptrs.append(x[2][1:] + off)
            off += x[2][-1]
        return (Ws, status, np.concatenate(ptrs),
                np.concatenate([x[3] for x in parts]), np.concatenate([x[4] for x in parts]))


class CandidateWeights(Family):
    """Exact weights of candidate edges (center, x): one cross weight each."""

    def __init__(self, centers, ptr, cand, labels=None):
        self.centers, self.ptr, self.cand, self.labels = centers, ptr, cand, labels
        self.queries = 3 * len(cand)

    def answer(self, source):
        indptr, nbr, wt = source.csr()
        return K.candidate_weights(indptr, nbr, wt, self.centers, self.ptr, self.cand)


def _empty3():
    return np.zeros(0, np.int64), np.zeros(0), np.zeros(0, np.int64)


# ---------------------------------------------------------------- uniform

def uniform_stage(n_base, n_view, centers, masks, mask_ids, seeds, labels=None, params=None):
    """One round; returns arrays (x, w, level) with x=-1 Empty, x=-2 Fail."""
    params = params or UniformParams.for_graph(n_base, n_view)
    fam = UniformFamily(params, centers, masks, mask_ids, seeds, labels=labels)
    return (yield from single(fam))


def _outcome(c, x, w, lv):
    if x == -1:
        return EMPTY
    if x == -2:
        return FAIL
    return SampledEdge(int(c), int(x), _num(w), int(lv))


def _num(w):
    return int(w) if float(w).is_integer() else float(w)


def _outside(mask, s):
    if mask[s]:
        raise ValueError("star center must lie outside T")
    return mask


def sample_uniform_edge(oracle, s, T, rng, labels=None, n_view=None, params=None):
    n_view = n_view or oracle.n
    mask = _outside(side_mask(n_view, T), s)
    x, w, lv = run(oracle, uniform_stage(oracle.n, n_view, [s], mask[None], [0],
                                         rng.seeds(1), labels, params))
    return _outcome(s, x[0], w[0], lv[0])


def sparse_recover_star(oracle, s, T, s_max, rng, reps=None):
    """All edges of E(s,T) with exact weights, or FAIL if the check fails."""
    n = oracle.n
    mask = side_mask(n, T)
    reps = reps or log2c(n) + 4
    nbits = log2c(n)
    fam = _RecoverFamily(s, mask, rng.seeds(1)[0], reps, 2 * s_max, nbits)
    xs, ws, total, cut_total = oracle.submit([fam])[0]
    if abs(ws.sum() - total) > 1e-9 * max(1.0, total):
        return FAIL
    return sorted((SampledEdge(int(s), int(x), _num(w)) for x, w in zip(xs, ws)),
                  key=lambda e: e.v)


class _RecoverFamily(Family):
    def __init__(self, s, mask, seed, reps, nbuckets, nbits):
        if mask[s]:
            raise ValueError("star center must lie outside T")
        self.s, self.mask, self.seed = int(s), mask, np.uint64(seed)
        self.reps, self.nbuckets, self.nbits = reps, nbuckets, nbits
        self.queries = 3 * (1 + reps * nbuckets * (1 + nbits))

    def answer(self, source):
        indptr, nbr, wt = source.csr()
        xs, ws, total = K.sparse_recover(indptr, nbr, wt, self.s, self.mask, self.seed,
                                         self.reps, self.nbuckets, self.nbits)
        return xs, ws, total, total


# ---------------------------------------------------------------- degrees

def degree_stage(n_base, centers, masks, mask_ids, seeds, labels=None, params=None):
    params = params or DegreeParams.for_graph(n_base)
    fam = DegreeFamily(params, centers, masks, mask_ids, seeds, labels=labels)
    return (yield from single(fam))


def estimate_degree(oracle, v, S, rng, params=None):
    mask = _outside(side_mask(oracle.n, S), v)
    est = run(oracle, degree_stage(oracle.n, [v], mask[None], [0], rng.seeds(1), params=params))
    return int(est[0])


# ---------------------------------------------------------------- heavy hitters

class _HeavyFamily(Family):
    def __init__(self, s, mask, seed, depth, width):
        if mask[s]:
            raise ValueError("star center must lie outside T")
        self.s, self.mask, self.seed = int(s), mask, np.uint64(seed)
        self.depth, self.width = depth, width
        self.queries = 3 * depth * width

    def answer(self, source):
        indptr, nbr, wt = source.csr()
        ys, est, _ = K.countmin_star(indptr, nbr, wt, self.s, self.mask, self.seed, 0,
                                     self.depth, self.width, 0)
        return ys, est


def heavy_hitters(oracle, s, T, alpha, rng):
    """Count-min estimates w~(t) for t in T (positive estimates only)."""
    n = oracle.n
    depth = max(1, math.ceil(10 * math.log(max(2, n))))
    width = math.ceil(math.e * alpha)
    fam = _HeavyFamily(s, side_mask(n, T), rng.seeds(1)[0], depth, width)
    ys, est = oracle.submit([fam])[0]
    return {int(y): _num(e) for y, e in zip(ys, est)}


# ---------------------------------------------------------------- weighted

def weighted_stage(n_base, W, centers, masks, mask_ids, seeds, labels=None, params=None):
    """Two rounds of weight-proportional sampling, one result per instance.

    Returns arrays (x, w, level, star_weight) with x=-1 Empty, x=-2 Fail.
    """
    params = params or WeightedParams.for_graph(n_base, W)
    centers = np.asarray(centers, dtype=np.int64)
    seeds = np.asarray(seeds, dtype=np.uint64)
    r1 = WeightedRound1(params, centers, masks, mask_ids, seeds, labels=labels)
    Ws, status, ptr, cand, cmask = yield from single(r1)
    cw = yield from single(CandidateWeights(centers, ptr, cand, labels))
    x, w, lv = K.weighted_decode(seeds, Ws, status, ptr, cand, cmask, cw,
                                 params.levels, params.shift)
    return x, w, lv, Ws


def weighted_instances_stage(n_base, W, s, mask, seeds, labels=None, params=None):
    """k co-scheduled instances for one star; the first non-Fail wins."""
    k = len(seeds)
    x, w, lv, Ws = yield from weighted_stage(n_base, W, [s] * k, mask[None], [0] * k,
                                             seeds, labels, params)
    for i in range(k):
        if x[i] != -2:
            return _outcome(s, x[i], w[i], lv[i])
    return FAIL


def sample_weighted_edge(oracle, s, T, W, rng, instances=None, params=None):
    n = oracle.n
    k = instances or log2c(n)
    mask = _outside(side_mask(n, T), s)
    return run(oracle, weighted_instances_stage(n, W, s, mask, rng.seeds(k), params=params))
