"""Ground-truth weighted graphs and exact reference algorithms.

Everything here is local computation: no oracle, no ledger.  These
routines are used to verify the query algorithms and to finish the
local steps on recovered or sparsified graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Cut:
    side: frozenset
    value: float

    def __iter__(self):
        yield self.value
        yield self.side


class WeightedGraph:
    """Undirected graph on vertices 0..n-1 stored as parallel edge arrays.

    Weights are positive.  Integer weights are the norm for hidden graphs;
    sparsifiers carry float weights.  Parallel edges are allowed
    (multigraph role) unless ``simple=True`` was requested at build time.
    """

    def __init__(self, n, u=(), v=(), w=(), W=None, simple=False):
        self.n = int(n)
        u = np.asarray(u, dtype=np.int64).reshape(-1)
        v = np.asarray(v, dtype=np.int64).reshape(-1)
        w = np.asarray(w).reshape(-1)
        if w.dtype.kind not in "iuf":
            w = w.astype(np.float64)
        if w.dtype.kind in "iu":
            w = w.astype(np.int64)
        if not (len(u) == len(v) == len(w)):
            raise ValueError("edge arrays differ in length")
        if len(u):
            if u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= self.n:
                raise ValueError("vertex id out of range")
            if np.any(u == v):
                raise ValueError("self-loop")
            if np.any(w <= 0):
                raise ValueError("non-positive weight")
        a, b = np.minimum(u, v), np.maximum(u, v)
        if simple and len(a):
            key = a * self.n + b
            if len(np.unique(key)) != len(key):
                raise ValueError("duplicate edge in simple graph")
        self.u, self.v, self.w = a, b, w
        self.W = W if W is not None else (w.max().item() if len(w) else 1)
        self._adj = None

    @classmethod
    def from_edges(cls, n, edges, **kw):
        edges = list(edges)
        if not edges:
            return cls(n, **kw)
        u, v, w = zip(*edges)
        return cls(n, u, v, w, **kw)

    @property
    def m(self):
        return len(self.u)

    @property
    def is_integral(self):
        return self.w.dtype.kind in "iu"

    def edges(self):
        return [(int(a), int(b), _py(c)) for a, b, c in zip(self.u, self.v, self.w)]

    def total_weight(self):
        return _py(self.w.sum()) if self.m else 0

    def degrees(self):
        d = np.zeros(self.n, dtype=self.w.dtype if self.m else np.int64)
        np.add.at(d, self.u, self.w)
        np.add.at(d, self.v, self.w)
        return d

    def min_degree(self):
        return _py(self.degrees().min()) if self.n else 0

    def matrix(self):
        a = np.zeros((self.n, self.n), dtype=np.float64)
        np.add.at(a, (self.u, self.v), self.w)
        np.add.at(a, (self.v, self.u), self.w)
        return a

    def adjacency(self):
        if self._adj is None:
            adj = [dict() for _ in range(self.n)]
            for a, b, c in self.edges():
                adj[a][b] = adj[a].get(b, 0) + c
                adj[b][a] = adj[b].get(a, 0) + c
            self._adj = adj
        return self._adj

    def merged(self):
        """Sum parallel edges into single edges."""
        if not self.m:
            return self
        key = self.u * self.n + self.v
        uniq, inv = np.unique(key, return_inverse=True)
        w = np.zeros(len(uniq), dtype=self.w.dtype)
        np.add.at(w, inv, self.w)
        return WeightedGraph(self.n, uniq // self.n, uniq % self.n, w, W=self.W)

    def contract(self, labels):
        """Multigraph on blocks ``labels`` (values 0..k-1); self-loops vanish."""
        labels = np.asarray(labels, dtype=np.int64)
        k = int(labels.max()) + 1 if len(labels) else 0
        a, b = labels[self.u], labels[self.v]
        keep = a != b
        return WeightedGraph(k, a[keep], b[keep], self.w[keep], W=self.W)

    def induced(self, vertices):
        vertices = np.asarray(sorted(vertices), dtype=np.int64)
        index = -np.ones(self.n, dtype=np.int64)
        index[vertices] = np.arange(len(vertices))
        keep = (index[self.u] >= 0) & (index[self.v] >= 0)
        return WeightedGraph(len(vertices), index[self.u[keep]], index[self.v[keep]],
                             self.w[keep], W=self.W), vertices

    def components(self):
        labels = np.arange(self.n)
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in zip(self.u.tolist(), self.v.tolist()):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        roots = [find(x) for x in range(self.n)]
        _, labels = np.unique(roots, return_inverse=True)
        return labels

    def is_connected(self):
        return self.n <= 1 or int(self.components().max()) == 0

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, m={self.m}, W={self.W})"


def _py(x):
    return x.item() if hasattr(x, "item") else x


def side_mask(n, S):
    if isinstance(S, np.ndarray) and S.dtype == bool:
        return S
    mask = np.zeros(n, dtype=bool)
    idx = list(S)
    if idx:
        mask[np.asarray(idx, dtype=np.int64)] = True
    return mask


def exact_cut(G, S):
    mask = side_mask(G.n, S)
    if not G.m:
        return 0
    return _py(G.w[mask[G.u] != mask[G.v]].sum())


def canonical(n, S):
    """The side not containing vertex 0."""
    S = frozenset(int(x) for x in S)
    return frozenset(range(n)) - S if 0 in S else S


# ---------------------------------------------------------------- min cut

def stoer_wagner(G):
    """Deterministic global min cut.  Returns a Cut (canonical side)."""
    n = G.n
    if n < 2:
        raise ValueError("min cut needs at least two vertices")
    labels = G.components()
    if labels.max() > 0:
        side = np.flatnonzero(labels == labels[0])
        return Cut(canonical(n, side), 0)
    A = G.matrix()
    groups = [[i] for i in range(n)]
    alive = list(range(n))
    best, best_side = np.inf, None
    while len(alive) > 1:
        idx = np.array(alive)
        sub = A[np.ix_(idx, idx)]
        k = len(idx)
        used = np.zeros(k, dtype=bool)
        conn = np.zeros(k)
        prev = last = 0
        used[0] = True
        conn += sub[0]
        for _ in range(k - 1):
            c = np.where(used, -np.inf, conn)
            nxt = int(np.argmax(c))
            prev, last = last, nxt
            used[nxt] = True
            conn += sub[nxt]
        phase = sub[last].sum()
        if phase < best:
            best, best_side = phase, list(groups[idx[last]])
        s, t = idx[prev], idx[last]
        A[s] += A[t]
        A[:, s] += A[:, t]
        A[s, s] = 0
        groups[s].extend(groups[t])
        alive.remove(t)
    value = best if not G.is_integral else int(round(best))
    return Cut(canonical(n, best_side), value)


def all_cut_values(G):
    """Values of all 2^(n-1) cuts whose side excludes vertex n-1.

    Bit i of the mask index is vertex i.  Index 0 is the empty side.
    """
    n = G.n
    if n > 24:
        raise ValueError("exhaustive enumeration limited to n <= 24")
    masks = np.arange(1 << (n - 1), dtype=np.int64)
    vals = np.zeros(len(masks), dtype=np.float64)
    for a, b, c in zip(G.u.tolist(), G.v.tolist(), G.w.tolist()):
        vals += c * (((masks >> a) ^ (masks >> b)) & 1)
    return vals


def exhaustive_min_cut(G):
    n = G.n
    vals = all_cut_values(G)
    vals[0] = np.inf
    i = int(np.argmin(vals))
    side = [x for x in range(n - 1) if (i >> x) & 1]
    value = vals[i] if not G.is_integral else int(round(vals[i]))
    return Cut(canonical(n, side), value)


def exact_min_cut(G):
    if G.n <= 12:
        return exhaustive_min_cut(G)
    return stoer_wagner(G)


def enumerate_cuts_at_most(G, bound, cap=100000, tol=1e-9):
    """All distinct cuts of value at most ``bound``.

    Branch and bound over vertex assignments (vertex 0 fixed outside the
    side).  A partial assignment is pruned when the weight already cut
    plus, for every unassigned vertex, the cheaper of its weight to either
    side exceeds the bound.
    """
    n = G.n
    if n < 2:
        return []
    A = G.matrix()
    order = _bfs_order(G)
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    out = []
    assign = np.zeros(n, dtype=np.int8)  # 0 unassigned, 1 outside, 2 inside
    to_out = np.zeros(n)
    to_in = np.zeros(n)
    limit = bound + tol

    def place(x, side, sign):
        assign[x] = side if sign > 0 else 0
        if side == 1:
            to_out[:] += sign * A[x]
        else:
            to_in[:] += sign * A[x]

    def rec(k, cut, n_in):
        free = assign == 0
        lb = cut + np.minimum(to_out[free], to_in[free]).sum()
        if lb > limit:
            return
        if k == n:
            if 0 < n_in < n:
                out.append(Cut(frozenset(np.flatnonzero(assign == 2).tolist()), _round(G, cut)))
                if len(out) > cap:
                    raise ResourceWarning(f"more than {cap} cuts below bound")
            return
        x = int(order[k])
        for side in (1, 2):
            extra = to_in[x] if side == 1 else to_out[x]
            place(x, side, 1)
            rec(k + 1, cut + extra, n_in + (side == 2))
            place(x, side, -1)

    place(int(order[0]), 1, 1)
    rec(1, 0.0, 0)
    return out


def _round(G, x):
    return int(round(x)) if G.is_integral else float(x)


def _bfs_order(G):
    adj = G.adjacency()
    seen = [False] * G.n
    order = []
    for s in range(G.n):
        if seen[s]:
            continue
        seen[s] = True
        queue = [s]
        while queue:
            x = queue.pop(0)
            order.append(x)
            for y in sorted(adj[x], key=lambda y: -adj[x][y]):
                if not seen[y]:
                    seen[y] = True
                    queue.append(y)
    return np.asarray(order, dtype=np.int64)


def exact_st_cut(G, s, t):
    """Minimum s-t cut via max flow.  Returns a Cut whose side holds s."""
    import networkx as nx

    if s == t:
        raise ValueError("s and t must differ")
    D = nx.DiGraph()
    D.add_nodes_from(range(G.n))
    for a, b, c in G.merged().edges():
        D.add_edge(a, b, capacity=c)
        D.add_edge(b, a, capacity=c)
    _, (S, _) = nx.minimum_cut(D, s, t)
    S = frozenset(int(x) for x in S)
    return Cut(S, exact_cut(G, S))


# ---------------------------------------------------------------- strength

def exact_strengths(G):
    """Strength of every edge, via recursive min-cut decomposition.

    An edge crossing a min cut of the current vertex set gets that cut's
    value as a candidate; the maximum over the chain of sets containing it
    is its strength.
    """
    kappa = np.zeros(G.m)
    stack = [np.arange(G.n)]
    while stack:
        verts = stack.pop()
        if len(verts) < 2:
            continue
        H, _ = G.induced(verts)
        if H.m == 0:
            continue
        local = np.asarray(verts)
        cut = stoer_wagner(H)
        inside = side_mask(H.n, cut.side)
        here = np.zeros(G.n, dtype=bool)
        here[local] = True
        emask = here[G.u] & here[G.v]
        kappa[emask] = np.maximum(kappa[emask], cut.value)
        stack.append(local[inside])
        stack.append(local[~inside])
    return kappa


def exact_strength(G, e):
    """Strength of the edge with endpoints ``e = (a, b)``."""
    a, b = min(e), max(e)
    hits = np.flatnonzero((G.u == a) & (G.v == b))
    if not len(hits):
        raise KeyError(f"edge {e} not in graph")
    return _round(G, exact_strengths(G)[hits[0]])


# ---------------------------------------------------------------- max cut

def exact_max_cut(G, exact_limit=20, restarts=20, seed=0):
    """Maximum cut; exhaustive for n <= exact_limit, else local search.

    Returns (Cut, exact_flag).
    """
    n = G.n
    if n <= exact_limit:
        vals = all_cut_values(G)
        i = int(np.argmax(vals))
        side = [x for x in range(n - 1) if (i >> x) & 1]
        return Cut(canonical(n, side), _round(G, vals[i])), True
    rng = np.random.default_rng(seed)
    A = G.matrix()
    best = (-1.0, None)
    for _ in range(restarts):
        x = rng.integers(0, 2, n).astype(bool)
        improved = True
        while improved:
            improved = False
            same = np.where(x[None, :] == x[:, None], A, 0).sum(1)
            diff = A.sum(1) - same
            gain = same - diff
            i = int(np.argmax(gain))
            if gain[i] > 1e-12:
                x[i] = ~x[i]
                improved = True
        val = exact_cut(G, x)
        if val > best[0]:
            best = (val, np.flatnonzero(x))
    return Cut(canonical(n, best[1]), _round(G, best[0])), False


# ---------------------------------------------------------------- file IO

def read_graph(path, simple=True):
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    n, m, W = (int(x) for x in lines[0][:3])
    rows = lines[1:1 + m]
    if len(rows) != m:
        raise ValueError(f"expected {m} edge lines, found {len(rows)}")
    u = [int(r[0]) for r in rows]
    v = [int(r[1]) for r in rows]
    ws = [_parse_weight(r[2]) for r in rows]
    if all(isinstance(x, int) for x in ws):
        w = np.asarray(ws, dtype=np.int64)
    else:
        w = np.asarray([float(x) for x in ws])
    G = WeightedGraph(n, u, v, w, W=W, simple=simple)
    if G.m and G.w.max() > W:
        raise ValueError("weight above declared bound W")
    return G


def _parse_weight(tok):
    if "/" in tok:
        f = Fraction(tok)
        return f if f.denominator != 1 else int(f)
    return int(tok) if tok.lstrip("-").isdigit() else float(tok)


def format_weight(x, max_den=10**6):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    f = Fraction(float(x)).limit_denominator(max_den)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def write_graph(G, path):
    W = G.W if G.is_integral else int(np.ceil(G.w.max())) if G.m else 1
    out = [f"{G.n} {G.m} {W}"]
    out += [f"{a} {b} {format_weight(c)}" for a, b, c in G.edges()]
    Path(path).write_text("\n".join(out) + "\n")
