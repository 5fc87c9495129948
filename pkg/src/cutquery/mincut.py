"""Minimum cut pipelines over the cut-query oracle.

Every pipeline is a staged generator (one yield per oracle round) plus a
thin wrapper that drives it against an oracle and snapshots the ledger.
Witness sides are over the original vertices; values are what the
algorithm believes, and tests compare them with the hidden graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contraction import Partition, SamplingAbort, StarContractionConfig, tau_star_stage, two_out_stage
from .graph import (
    WeightedGraph,
    canonical,
    enumerate_cuts_at_most,
    exact_cut,
    exact_max_cut,
    exact_min_cut,
    exact_st_cut,
    stoer_wagner,
)
from .monmat import monotone_cut_stage
from .oracle import CutSets, Degrees, Rng, idle, parallel, run, single
from .packing import pack_stage
from .recovery import RecoveryFailure, recover_stage
from .sparsifier import SparsifierConfig, sparsify_stage


@dataclass
class MinCutResult:
    value: object
    side: frozenset | None
    ledger: dict = field(default_factory=dict)
    success: bool | None = None
    info: dict = field(default_factory=dict)

    @property
    def failed(self):
        return self.side is None

    def check(self, G, target=None):
        """Compare with the hidden graph; sets and returns ``success``."""
        if self.failed:
            self.success = False
            return False
        if target is None:
            target = exact_min_cut(G).value
        self.success = bool(abs(exact_cut(G, self.side) - self.value) < 1e-9
                            and abs(self.value - target) < 1e-9)
        return self.success


def _num(x):
    x = float(x)
    return int(round(x)) if abs(x - round(x)) < 1e-9 else x


def trial_count(n):
    return max(1, math.ceil(4 * math.log2(max(2, n))))


def _guard(gen, rounds):
    """Run ``gen``; on a sampler or recovery failure idle out the rounds.

    Returns the generator's value, or None when it failed.
    """
    done = 0
    try:
        batch = next(gen)
        while True:
            ans = yield batch
            done += 1
            batch = gen.send(ans)
    except StopIteration as stop:
        out = stop.value
    except (SamplingAbort, RecoveryFailure):
        out = None
    while done < rounds:
        yield from idle()
        done += 1
    return out


def _trivial(deg):
    deg = np.asarray(deg, dtype=np.float64)
    v = int(np.argmin(deg))
    return _num(deg[v]), frozenset({v})


def _lift(labels, side):
    labels = np.asarray(labels)
    return frozenset(np.flatnonzero(np.isin(labels, sorted(side))).tolist())


def _best(cands):
    cands = [c for c in cands if c is not None]
    if not cands:
        return None
    return min(cands, key=lambda c: c[0])


def _finish(oracle, out, info=None):
    led = oracle.ledger.snapshot()
    if out is None:
        return MinCutResult(None, None, led, False, info or {})
    value, side = out
    return MinCutResult(value, canonical(oracle.n, side), led, None, info or {})


def _rng(rng, seed):
    if rng is None:
        return Rng(0 if seed is None else seed)
    return rng


# ---------------------------------------------------------------- 2 rounds

def _two_round_trial(n, rng, cfg, budget, c_rec):
    P, info = yield from tau_star_stage(n, rng.child("star"), cfg)
    triv = _trivial(info["degrees"])
    labels = P.labels()
    k = int(labels.max()) + 1
    try:
        Gc = yield from recover_stage(k, budget, rng.child("recover"), labels=labels, c_rec=c_rec)
    except RecoveryFailure:
        return triv
    if k < 2:
        return triv
    cut = exact_min_cut(Gc)
    return _best([triv, (_num(cut.value), _lift(labels, cut.side))])


def two_round_stage(n, rng, trials=None, cfg=StarContractionConfig(), C_rec=8.0, c_rec=4.0):
    budget = C_rec * n ** (4 / 3)
    trials = trials or trial_count(n)
    gens = [_guard(_two_round_trial(n, rng.child("trial", t), cfg, budget, c_rec), 2)
            for t in range(trials)]
    return _best((yield from parallel(*gens)))


def min_cut_2round(oracle, n=None, rng=None, trials=None, seed=None, **kw):
    """Global min cut of an unweighted graph in 2 rounds."""
    n = oracle.n if n is None else n
    out = run(oracle, two_round_stage(n, _rng(rng, seed), trials, **kw))
    return _finish(oracle, out)


# ---------------------------------------------------------------- 2r + 1 rounds

def _union_cut(pk, lab0, k):
    """Min cut of the union of forests, or None when it cannot be trusted."""
    if pk.n_blocks < 2:
        return None
    ab = [(a, b) for f in pk.forests for a, b, _, _ in f]
    if ab:
        a, b = zip(*ab)
        Gu = WeightedGraph(pk.n_blocks, a, b, np.ones(len(ab), np.int64))
    else:
        Gu = WeightedGraph(pk.n_blocks)
    cut = exact_min_cut(Gu)
    # below k every crossing edge of G is in some forest, so the union's
    # value is the cut's true value
    if cut.value >= k:
        return None
    return _num(cut.value), _lift(lab0, cut.side)


def unweighted_stage(n, r, rng, trials=None, A_pack=8.0):
    trials = trials or trial_count(n)
    first = yield from parallel(single(Degrees(n)),
                                *[_guard(two_out_stage(n, rng.child("trial", t, "2out")), 1)
                                  for t in range(trials)])
    deg, P0s = np.asarray(first[0], dtype=np.float64), first[1:]
    triv = _trivial(deg)
    k = max(1, int(round(deg.min())))

    def trial(t, P0):
        if P0 is None:
            yield from _guard(iter(()), 2 * r)
            return None
        lab0 = P0.labels()
        pk = yield from _guard(pack_stage(n, k, r, rng.child("trial", t, "pack"), lab0, A_pack), 2 * r)
        return None if pk is None else _union_cut(pk, lab0, k)

    rest = yield from parallel(*[trial(t, P0) for t, P0 in enumerate(P0s)])
    return _best([triv] + rest)


def min_cut_unweighted(oracle, n=None, r=2, rng=None, trials=None, seed=None, **kw):
    """Global min cut of an unweighted graph in 2r + 1 rounds."""
    n = oracle.n if n is None else n
    out = run(oracle, unweighted_stage(n, r, _rng(rng, seed), trials, **kw))
    return _finish(oracle, out)


# ---------------------------------------------------------------- 3r + 4 rounds

def atoms(n, sides):
    """Labels grouping vertices that no side in ``sides`` separates."""
    sig = np.zeros((n, len(sides)), dtype=bool)
    for j, S in enumerate(sides):
        sig[sorted(S), j] = True
    _, lab = np.unique(sig, axis=0, return_inverse=True)
    return lab.reshape(-1).astype(np.int64)


def unweighted_sparsifier_stage(n, r, rng, eps=1 / 50, C_rec=8.0, cfg=SparsifierConfig()):
    S = yield from sparsify_stage(n, 1, eps, r, rng.child("sparsify"), cfg)
    H, deg = S.graph, np.asarray(S.info["degrees"], dtype=np.float64)
    triv = _trivial(deg)
    bound = (1 + eps) * deg.min()
    low = [c for c in enumerate_cuts_at_most(H, bound)
           if c.value < bound - 1e-9 and 2 <= len(c.side) <= n - 2]
    if not low:
        yield from idle()
        return triv
    lam = stoer_wagner(H).value
    near = [c.side for c in enumerate_cuts_at_most(H, (53 / 50) * lam)]
    labels = atoms(n, near)
    k = int(labels.max()) + 1
    try:
        Gc = yield from recover_stage(k, C_rec * n, rng.child("recover"), labels=labels)
    except RecoveryFailure:
        return triv
    if k < 2:
        return triv
    cut = exact_min_cut(Gc)
    return _best([triv, (_num(cut.value), _lift(labels, cut.side))])


def min_cut_unweighted_sparsifier(oracle, n=None, r=2, rng=None, seed=None, **kw):
    """Global min cut of an unweighted graph in 3r + 4 rounds."""
    n = oracle.n if n is None else n
    out = run(oracle, unweighted_sparsifier_stage(n, r, _rng(rng, seed), **kw))
    return _finish(oracle, out)


# ---------------------------------------------------------------- weighted

@dataclass
class TreeDecomposition:
    """Spanning tree rooted at 0; tree edge (parent[v], v) is named v."""

    n: int
    parent: np.ndarray
    paths: list                 # heavy paths, each a top-down list of edges
    sub: np.ndarray             # sub[v] = vertex mask of the subtree below edge v

    @classmethod
    def build(cls, n, edges, root=0):
        adj = [[] for _ in range(n)]
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        parent = -np.ones(n, dtype=np.int64)
        order, seen = [root], np.zeros(n, bool)
        seen[root] = True
        for x in order:
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    parent[y] = x
                    order.append(y)
        if len(order) != n:
            raise ValueError("edges do not span the vertex set")
        size = np.ones(n, dtype=np.int64)
        for x in reversed(order[1:]):
            size[parent[x]] += size[x]
        heavy = -np.ones(n, dtype=np.int64)
        for x in order[1:]:
            p = parent[x]
            if heavy[p] < 0 or size[x] > size[heavy[p]]:
                heavy[p] = x
        paths = []
        for x in order[1:]:
            if heavy[parent[x]] == x and parent[x] != root:
                continue
            path = [x]
            while heavy[path[-1]] >= 0:
                path.append(int(heavy[path[-1]]))
            paths.append([int(v) for v in path])
        sub = np.zeros((n, n), dtype=bool)
        for x in reversed(order):
            sub[x, x] = True
            if parent[x] >= 0:
                sub[parent[x]] |= sub[x]
        return cls(n, parent, paths, sub)

    @property
    def tree_edges(self):
        return [v for v in range(self.n) if self.parent[v] >= 0]

    def is_ancestor(self, e, f):
        """Edge e lies on the root path of edge f (or e == f)."""
        return bool(self.sub[e, f])


def pack_trees(H, rng, eps_p=1.0, count=None):
    """Greedy load-balanced spanning tree packing; returns edge lists.

    Each iteration takes a minimum spanning tree under load / weight and
    bumps the loads of its edges.  A forest of a disconnected H is joined
    arbitrarily.  ``count`` trees are then drawn from the pool.
    """
    n = H.n
    lg = math.log(max(2, n))
    iters = max(1, math.ceil(3 * eps_p ** -2 * lg * lg))
    count = count or max(1, math.ceil(3 * lg))
    w = np.asarray(H.w, dtype=np.float64)
    load = np.zeros(H.m)
    pool = []
    for _ in range(iters):
        order = np.argsort(load / w, kind="stable") if H.m else []
        P = Partition(n)
        tree = []
        for e in order:
            a, b = int(H.u[e]), int(H.v[e])
            if P.union(a, b):
                tree.append(int(e))
        load[tree] += 1
        edges = [(int(H.u[e]), int(H.v[e])) for e in tree]
        for x in range(1, n):
            if P.union(0, x):
                edges.append((0, x))
        pool.append(tuple(sorted(edges)))
    picks = rng.gen.integers(0, len(pool), count)
    return [list(t) for t in dict.fromkeys(pool[i] for i in picks.tolist())]


def _halving_instances(path):
    """Nested pairs inside one heavy path as (rows, cols) instances."""
    out = []
    stack = [path]
    while stack:
        p = stack.pop()
        if len(p) < 2:
            continue
        h = len(p) // 2
        out.append((p[:h], p[h:][::-1]))
        stack.append(p[:h])
        stack.append(p[h:])
    return out


def _pair_instances(T, p1, p2):
    """Cross-path instances: the nested part and the independent part."""
    h2 = p2[0]
    if not any(T.is_ancestor(e, h2) for e in p1):
        if any(T.is_ancestor(e, p1[0]) for e in p2):
            p1, p2 = p2, p1
            h2 = p2[0]
    a = sum(1 for e in p1 if T.is_ancestor(e, h2))
    out = []
    if a:
        out.append((p1[:a], p2[::-1]))
    if a < len(p1):
        out.append((p1[a:], list(p2)))
    return out


def _sparsifier_values(H, T):
    """H-value of every 1- and 2-respecting cut of T, as a matrix over edges."""
    L = np.diag(H.degrees().astype(np.float64)) - H.matrix()
    D = T.sub.T.astype(np.float64)          # column v = indicator of sub(v)
    P = D.T @ L @ D
    nested = T.sub | T.sub.T
    diag = np.diag(P)
    return np.where(nested, diag[:, None] + diag[None, :] - 2 * P,
                    diag[:, None] + diag[None, :] + 2 * P)


def _sym(T, e, f):
    return T.sub[e] ^ T.sub[f]


def weighted_stage(n, W, r, rng, eps0=1 / 20, all_pairs=False, trees=None, cfg=SparsifierConfig()):
    S = yield from sparsify_stage(n, W, eps0, r, rng.child("sparsify"), cfg)
    H, deg = S.graph, np.asarray(S.info["degrees"], dtype=np.float64)
    cands = [_trivial(deg)]
    if n < 2:
        return cands[0]
    edge_lists = pack_trees(H, rng.child("trees"), count=trees)
    decomps = [TreeDecomposition.build(n, el) for el in edge_lists]
    lam_H = stoer_wagner(H).value if H.m else 0.0
    thr = (1 + eps0) / (1 - eps0) * lam_H + 1e-9

    one = {}
    for T in decomps:
        for v in T.tree_edges:
            one.setdefault(T.sub[v].tobytes(), T.sub[v])
    one_sets = list(one.values())

    instances, pairs_total = [], 0
    for T in decomps:
        vals = None if all_pairs else _sparsifier_values(H, T)
        for p in T.paths:
            instances.extend((T, rows, cols) for rows, cols in _halving_instances(p))
        for i, p1 in enumerate(T.paths):
            for p2 in T.paths[i + 1:]:
                for rows, cols in _pair_instances(T, p1, p2):
                    pairs_total += 1
                    if vals is not None and vals[np.ix_(rows, cols)].min() > thr:
                        continue
                    instances.append((T, rows, cols))

    def entry(T, rows, cols):
        return lambda i, j: _sym(T, rows[i], cols[j])

    stages = [single(CutSets(np.stack(one_sets), n))] if one_sets else []
    stages += [monotone_cut_stage(len(rows), len(cols), r, entry(T, rows, cols), n)
               for T, rows, cols in instances]
    res = yield from parallel(*stages)
    if one_sets:
        for X, val in zip(one_sets, res[0]):
            cands.append((_num(val), frozenset(np.flatnonzero(X).tolist())))
        res = res[1:]
    for (T, rows, cols), (val, where) in zip(instances, res):
        if where is not None:
            i, j = where
            cands.append((_num(val), frozenset(np.flatnonzero(_sym(T, rows[i], cols[j])).tolist())))
    best = _best(cands)
    best_info = {"trees": len(decomps), "tree_edges": edge_lists, "instances": len(instances), "pair_instances": pairs_total,
                 "one_respecting": len(one_sets), "lambda_H": lam_H}
    return best, best_info


def min_cut_weighted(oracle, n=None, W=None, r=2, rng=None, seed=None, **kw):
    """Global min cut of a weighted graph in 4r + 3 rounds."""
    n = oracle.n if n is None else n
    W = W if W is not None else _weight_of(oracle)
    out, info = run(oracle, weighted_stage(n, W, r, _rng(rng, seed), **kw))
    return _finish(oracle, out, info)


def _weight_of(oracle):
    G = getattr(oracle, "graph", None)
    if G is None:
        raise ValueError("W must be given for this oracle")
    return max(1, int(math.ceil(float(G.W))))


# ---------------------------------------------------------------- s-t cut

def residual_labels(H, s, t, tol=1e-9):
    """Components of H after deleting the edges a max s-t flow saturates."""
    import networkx as nx

    Hm = H.merged()
    D = nx.DiGraph()
    D.add_nodes_from(range(H.n))
    for a, b, c in Hm.edges():
        D.add_edge(a, b, capacity=c)
        D.add_edge(b, a, capacity=c)
    _, flow = nx.maximum_flow(D, s, t)
    keep = []
    for a, b, c in Hm.edges():
        net = flow[a][b] - flow[b][a]
        if c - abs(net) > tol:
            keep.append((a, b, c))
    labels = WeightedGraph.from_edges(H.n, keep).components() if keep else np.arange(H.n)
    labels = np.asarray(labels, dtype=np.int64)
    if labels[s] == labels[t]:
        # cannot happen for an exact max flow; split rather than merge
        labels = np.where(labels == labels[t], labels.max() + 1, labels)
        labels[s] = labels.max() + 1
        _, labels = np.unique(labels, return_inverse=True)
    return labels


def st_stage(n, s, t, r, rng, W=1, C_rec=8.0, cfg=SparsifierConfig()):
    eps = min(0.5, n ** (-1 / 3))
    S = yield from sparsify_stage(n, W, eps, r, rng.child("sparsify"), cfg)
    labels = residual_labels(S.graph, s, t)
    k = int(labels.max()) + 1
    try:
        Gc = yield from recover_stage(k, C_rec * n ** (5 / 3), rng.child("recover"), labels=labels)
    except RecoveryFailure:
        return None
    cut = exact_st_cut(Gc, int(labels[s]), int(labels[t]))
    return _num(cut.value), _lift(labels, cut.side)


def min_st_cut(oracle, s, t, n=None, r=2, rng=None, seed=None, W=1, **kw):
    """Minimum s-t cut in 3r + 4 rounds.  The witness side contains s."""
    n = oracle.n if n is None else n
    out = run(oracle, st_stage(n, s, t, r, _rng(rng, seed), W, **kw))
    led = oracle.ledger.snapshot()
    if out is None:
        return MinCutResult(None, None, led, False)
    return MinCutResult(out[0], frozenset(out[1]), led)


# ---------------------------------------------------------------- max cut

def max_cut_stage(n, W, eps, r, rng, cfg=SparsifierConfig()):
    S = yield from sparsify_stage(n, W, eps / 3, r, rng.child("sparsify"), cfg)
    cut, exact = exact_max_cut(S.graph)
    side = sorted(cut.side)
    val = yield from single(CutSets([side], n))
    return (_num(val[0]), frozenset(side)), {"exact_local": exact, "sparsifier_value": cut.value}


def approx_max_cut(oracle, eps=0.3, r=2, W=None, n=None, rng=None, seed=None, **kw):
    """(1 - eps)-approximate max cut in 3r + 4 rounds; value is cut_G(S)."""
    n = oracle.n if n is None else n
    W = W if W is not None else _weight_of(oracle)
    out, info = run(oracle, max_cut_stage(n, W, eps, r, _rng(rng, seed), **kw))
    return MinCutResult(out[0], out[1], oracle.ledger.snapshot(), None, info)
