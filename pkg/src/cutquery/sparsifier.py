"""Cut sparsifiers in 3r + 3 rounds.

Strength estimation runs r sample-and-contract steps of three rounds
each (supervertex degrees, then two rounds of weight-proportional
samples).  Every step emits the components it contracts, tagged with a
strength estimate beta.  The build then samples each stratum F(C_i), the
edges first covered by C_i, with a budget proportional to
w(F(C_i)) / beta_i, and reweights each sampled edge by its inclusion
probability.

Bulk weighted sampling is thinned: an instance succeeds with probability
about 2^-shift, so a target of t draws is planned as t * 2^shift
instances and only the successes are kept.  Successful draws are
independent and weight-proportional, which is all the contraction and
the reweighting rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .contraction import Partition, compose
from .graph import WeightedGraph, stoer_wagner
from .oracle import CrossWeights, CutSets, Degrees, idle, run, single
from .sampling import WeightedParams, weighted_stage


@dataclass(frozen=True)
class StrengthEntry:
    C: frozenset
    beta: float
    step: int = 0


@dataclass
class Sparsifier:
    graph: WeightedGraph
    entries: list
    strata: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def write(self, path):
        write_sparsifier(self.graph, path)


@dataclass(frozen=True)
class OneStepConfig:
    K: float
    A_sp: float = 8.0

    def rho(self, n):
        return self.A_sp * math.log(max(2, n))

    def tau(self, n, n_view):
        return self.rho(n) * n_view * self.K

    def threshold(self, n):
        return 0.8 * self.rho(n)


@dataclass(frozen=True)
class SparsifierConfig:
    A_sp: float = 8.0
    c1: float = 4.0
    shift: int = 2
    R_max: float = 8.0


# ---------------------------------------------------------------- one step

def _thinned(target, shift):
    return int(math.ceil(target * 2 ** shift)) if target > 0 else 0


def one_step_stage(n, W, labels, rng, K, A_sp=8.0, shift=2, final=False, step=0):
    """Three rounds of sample-and-contract on the view given by ``labels``.

    ``K`` is a number or a function (view degrees) -> K, evaluated after
    round one.  With ``final`` the pruning is skipped and every connected
    component of the sample is contracted.

    Returns (inner labels over the view, entries, info).
    """
    labels = np.asarray(labels, dtype=np.int64)
    nv = int(labels.max()) + 1 if len(labels) else 0
    deg = np.asarray((yield from single(Degrees(nv, labels))), dtype=np.float64)
    m_cur = float(deg.sum()) / 2
    info = {"n_view": nv, "m": m_cur}
    if nv <= 1 or m_cur <= 0:
        yield from idle()
        yield from idle()
        info.update(K=None, tau=0, draws=0)
        return np.arange(nv), [], info
    k = K(deg) if callable(K) else K
    cfg = OneStepConfig(k, A_sp)
    tau = cfg.tau(n, nv)
    beta = m_cur / (2 * nv * k)
    N = _thinned(tau, shift)
    counts = rng.child("alloc").gen.multinomial(N, deg / deg.sum())
    centers = np.repeat(np.arange(nv), counts)
    params = WeightedParams.for_graph(n, n * W, shift=shift)
    x, w, _, _ = yield from weighted_stage(n, n * W, centers, np.ones((1, nv), bool),
                                           np.zeros(len(centers), np.int64),
                                           rng.child("draw").seeds(len(centers)),
                                           labels, params)
    ok = x >= 0
    H = np.zeros((nv, nv))
    np.add.at(H, (centers[ok], x[ok]), 1.0)
    H = H + H.T
    draws = int(ok.sum())
    # the threshold follows the draws actually obtained
    thr = cfg.threshold(n) * draws / tau
    comps = _components(H) if final else _prune(H, thr)
    inner = np.empty(nv, np.int64)
    entries = []
    for i, comp in enumerate(comps):
        inner[comp] = i
        if len(comp) >= 2:
            C = frozenset(np.flatnonzero(np.isin(labels, comp)).tolist())
            entries.append(StrengthEntry(C, beta, step))
    info.update(K=k, tau=tau, beta=beta, draws=draws, fails=int((x == -2).sum()),
                threshold=thr)
    return inner, entries, info


def _components(H):
    n = len(H)
    P = Partition(n)
    a, b = np.nonzero(np.triu(H, 1))
    for x, y in zip(a.tolist(), b.tolist()):
        P.union(x, y)
    return [blk for blk in P.blocks()]


def _prune(H, thr):
    """Split along sampled cuts below thr until every part is above it."""
    stack = _components(H)
    done = []
    while stack:
        comp = stack.pop()
        if len(comp) == 1:
            done.append(comp)
            continue
        sub = H[np.ix_(comp, comp)]
        a, b = np.nonzero(np.triu(sub, 1))
        G = WeightedGraph(len(comp), a, b, sub[a, b])
        cut = stoer_wagner(G)
        if cut.value < thr:
            side = np.zeros(len(comp), bool)
            side[list(cut.side)] = True
            stack.append(comp[side])
            stack.append(comp[~side])
        else:
            done.append(comp)
    return sorted(done, key=lambda c: int(c.min()))


def one_step_contraction(oracle, K, rng, W=None, labels=None, A_sp=8.0, shift=2):
    n = oracle.n
    W = W if W is not None else _weight_bound(oracle)
    labels = np.arange(n) if labels is None else labels
    return run(oracle, one_step_stage(n, W, labels, rng, K, A_sp, shift))


def _weight_bound(oracle):
    g = getattr(oracle, "graph", None)
    return int(math.ceil(g.W)) if g is not None and g.m else 1


# ---------------------------------------------------------------- strengths

def strength_schedule(n, W, r, U, R_max=8.0):
    """Strength levels b_1 >= ... >= b_r = 1 for the r contraction steps.

    Step i contracts what its sample shows to be about 2 b_i strong and
    tags it with beta = b_i.  Consecutive levels differ by q, and
    q^(r-1) times the spread R between 'surely contracted' and 'surely
    kept' stays within 2 (nW)^(1/r) so the sandwich kappa / beta <= 2 n^(gamma/r)
    holds for every step.
    """
    if r <= 1:
        return [1.0]
    R = min(R_max, (2 ** r * n * W / max(U, 1e-12)) ** (1 / (r - 1)))
    q = max(1.0, (U / R) ** (1 / r))
    return [q ** (r - i) for i in range(1, r + 1)]


def gamma(n, W):
    return 1 + math.log(max(W, 1)) / math.log(max(n, 2))


def estimate_strengths_stage(n, W, r, rng, cfg=SparsifierConfig()):
    """3r rounds; returns (entries, info per step)."""
    labels = np.arange(n, dtype=np.int64)
    entries, infos = [], []
    levels = {}

    def scale(i):
        def K(deg):
            if i == 0:
                levels["b"] = strength_schedule(n, W, r, float(deg.max()), cfg.R_max)
            theta = 2 * levels["b"][i]
            return float(deg.sum()) / 2 / (len(deg) * theta)
        return K

    for i in range(r):
        inner, got, info = yield from one_step_stage(
            n, W, labels, rng.child("step", i), scale(i), cfg.A_sp, cfg.shift,
            final=(i == r - 1), step=i)
        entries += got
        infos.append(info)
        labels = compose(labels, inner)
    return entries, {"steps": infos, "levels": levels.get("b")}


def estimate_strengths(oracle, r, W, rng, cfg=SparsifierConfig()):
    entries, _ = run(oracle, estimate_strengths_stage(oracle.n, W, r, rng, cfg))
    return entries


def is_laminar(entries):
    sets = [e.C for e in entries]
    for i, A in enumerate(sets):
        for j in range(i + 1, len(sets)):
            B = sets[j]
            if A & B and not (A <= B or B <= A):
                return False
            if B < A:
                return False
    return True


# ---------------------------------------------------------------- build

def _children(n, entries):
    """For each entry, the block of C_i that contains each of its vertices.

    Blocks are the maximal earlier entries inside C_i, or singletons.
    Returns a list of dicts vertex -> frozenset.
    """
    out = []
    for i, e in enumerate(entries):
        block = {v: frozenset([v]) for v in e.C}
        for j in range(i - 1, -1, -1):
            D = entries[j].C
            if D < e.C:
                v0 = next(iter(D))
                if len(block[v0]) < len(D):
                    for v in D:
                        block[v] = D
        out.append(block)
    return out


def build_stage(n, W, entries, eps, rng, cfg=SparsifierConfig()):
    """Three rounds; returns a Sparsifier."""
    entries = list(entries)
    blocks = _children(n, entries)
    pairs, owner = [], []
    for i, (e, blk) in enumerate(zip(entries, blocks)):
        for u in sorted(e.C):
            pairs.append(([u], sorted(e.C - blk[u])))
            owner.append((i, u))
    fams = [Degrees(n), CutSets([sorted(e.C) for e in entries], n)]
    if pairs:
        fams.append(CrossWeights(pairs, n))
    ans = yield fams
    deg, cuts = np.asarray(ans[0], dtype=np.float64), ans[1]
    dcross = ans[2] if pairs else []
    Q = [(deg[sorted(e.C)].sum() - c) / 2 for e, c in zip(entries, cuts)]
    qof = {e.C: q for e, q in zip(entries, Q)}
    wF = []
    for e, blk, q in zip(entries, blocks, Q):
        kids = {b for b in blk.values() if len(b) > 1}
        wF.append(q - sum(qof[b] for b in kids))
    d_iu = {}
    for (i, u), d in zip(owner, dcross):
        d_iu[(i, u)] = float(d)

    lg2 = math.log(max(2, n)) ** 2
    # one mask row per (stratum, block); every center of that block uses it
    rows, row_stratum, strata = [], [], []
    parts_c, parts_m = [], []
    alloc_rng = rng.child("alloc")
    for i, (e, blk) in enumerate(zip(entries, blocks)):
        if wF[i] <= 0:
            strata.append({"wF": wF[i], "mu": 0, "instances": 0})
            continue
        mu = math.ceil(cfg.c1 * eps ** -2 * lg2 * wF[i] / e.beta)
        N = _thinned(mu, cfg.shift)
        us = sorted(e.C)
        dv = np.array([d_iu[(i, u)] for u in us])
        counts = alloc_rng.child(i).gen.multinomial(N, dv / dv.sum())
        row_of = {}
        ids = np.empty(len(us), np.int64)
        for t, u in enumerate(us):
            b = blk[u]
            if b not in row_of:
                row = np.zeros(n, bool)
                row[sorted(e.C - b)] = True
                row_of[b] = len(rows)
                rows.append(row)
                row_stratum.append(i)
            ids[t] = row_of[b]
        parts_c.append(np.repeat(np.asarray(us, np.int64), counts))
        parts_m.append(np.repeat(ids, counts))
        strata.append({"wF": wF[i], "mu": mu, "instances": N})
    centers = np.concatenate(parts_c) if parts_c else np.zeros(0, np.int64)
    mask_ids = np.concatenate(parts_m) if parts_m else np.zeros(0, np.int64)
    masks = np.stack(rows) if rows else np.zeros((1, n), bool)
    params = WeightedParams.for_graph(n, W, shift=cfg.shift)
    x, w, _, _ = yield from weighted_stage(n, W, centers, masks, mask_ids,
                                           rng.child("draw").seeds(len(centers)), None, params)
    H = _reweight(n, centers, x, w, np.asarray(row_stratum, np.int64)[mask_ids], d_iu)
    return Sparsifier(H, entries, strata, {"degrees": deg})


def _reweight(n, centers, x, w, stratum, d_iu):
    """Distinct sampled edges weighted by w / p_e.

    Given s_u successful draws at center u in the edge's stratum, each
    returning e with probability w(e) / d_i(u), the edge is missed with
    probability prod over both endpoints of (1 - w(e) / d_i(u))^s_u.
    """
    ok = x >= 0
    c, y, w, st = centers[ok], x[ok], w[ok], stratum[ok]
    if not len(c):
        return WeightedGraph(n)
    ckey, s_cnt = np.unique(st * n + c, return_counts=True)
    succ = dict(zip(ckey.tolist(), s_cnt.tolist()))
    a, b = np.minimum(c, y), np.maximum(c, y)
    ekey, first = np.unique(a * n + b, return_index=True)
    us, vs, ws = [], [], []
    for j in first.tolist():
        i, wv = int(st[j]), float(w[j])
        miss = 1.0
        for z in (int(a[j]), int(b[j])):
            s = succ.get(i * n + z, 0)
            if s:
                miss *= (1 - wv / d_iu[(i, z)]) ** s
        us.append(int(a[j]))
        vs.append(int(b[j]))
        ws.append(wv / (1.0 - miss))
    return WeightedGraph(n, us, vs, np.asarray(ws, dtype=np.float64))


def build_sparsifier(oracle, entries, eps, W, rng, cfg=SparsifierConfig()):
    return run(oracle, build_stage(oracle.n, W, entries, eps, rng, cfg))


# ---------------------------------------------------------------- composition

def sparsify_stage(n, W, eps, r, rng, cfg=SparsifierConfig()):
    """3r + 3 rounds."""
    entries, info = yield from estimate_strengths_stage(n, W, r, rng.child("strength"), cfg)
    S = yield from build_stage(n, W, entries, eps, rng.child("build"), cfg)
    S.info.update(info)
    return S


def sparsify(oracle, eps, r, W, rng, cfg=SparsifierConfig()):
    return run(oracle, sparsify_stage(oracle.n, W, eps, r, rng, cfg))


def write_sparsifier(H, path):
    """Graph file with exact rational weights (num/den)."""
    lines = [f"{H.n} {H.m} {int(math.ceil(H.w.max())) if H.m else 1}"]
    for a, b, c in H.edges():
        f = Fraction(float(c))
        lines.append(f"{a} {b} {f.numerator}" if f.denominator == 1 else
                     f"{a} {b} {f.numerator}/{f.denominator}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
