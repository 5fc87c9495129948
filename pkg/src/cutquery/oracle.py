"""The instrumented cut-query oracle and the round runner.

The oracle has one entry point, ``submit``: a list of query families
forms one round.  A family is a structured, fully planned set of cut
queries (explicit vertex sets, or seeded star sketches).  Each family
knows exactly how many cut queries it stands for; the ledger charges
that number.  Answers are produced by the family's kernel from the
hidden edge index, so large sketch families stay cheap to simulate.

Algorithms are written as generators: ``answers = yield batch``.  The
runner sends one batch per round; ``parallel`` runs several generators
in lockstep so their same-stage batches share a round.
"""

from __future__ import annotations

import hashlib
import zlib
from dataclasses import dataclass, field

import numpy as np

from .graph import WeightedGraph, side_mask


@dataclass
class QueryLedger:
    rounds: int = 0
    queries: int = 0
    per_round: list = field(default_factory=list)

    def record(self, count):
        self.rounds += 1
        self.queries += int(count)
        self.per_round.append(int(count))

    def snapshot(self):
        return {"rounds": self.rounds, "queries": self.queries, "per_round": list(self.per_round)}


# ---------------------------------------------------------------- edge index

class EdgeSource:
    """Aggregated adjacency of the hidden graph (or of a contracted view).

    Parallel contributions to the same vertex pair are summed; by
    linearity of the cut function this changes no answer.
    """

    def __init__(self, n, u, v, w, signed=False):
        self.n = int(n)
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        keep = u != v
        u, v, w = u[keep], v[keep], w[keep]
        a, b = np.minimum(u, v), np.maximum(u, v)
        key = a * self.n + b
        uniq, inv = np.unique(key, return_inverse=True)
        tot = np.zeros(len(uniq))
        np.add.at(tot, inv, w)
        if signed and np.any(tot < 0):
            raise ValueError("stream leaves a negative edge weight")
        nz = tot != 0
        self.u = (uniq // self.n)[nz] if self.n else uniq
        self.v = (uniq % self.n)[nz] if self.n else uniq
        self.w = tot[nz]
        self._csr = None
        self._views = {}

    @classmethod
    def from_graph(cls, G):
        return cls(G.n, G.u, G.v, G.w)

    def csr(self):
        if self._csr is None:
            src = np.concatenate([self.u, self.v])
            dst = np.concatenate([self.v, self.u])
            ww = np.concatenate([self.w, self.w])
            order = np.lexsort((dst, src))
            src, dst, ww = src[order], dst[order], ww[order]
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.add.at(indptr, src + 1, 1)
            self._csr = (np.cumsum(indptr), dst.astype(np.int64), ww)
        return self._csr

    def view(self, labels):
        if labels is None:
            return self
        labels = np.asarray(labels, dtype=np.int64)
        key = hashlib.blake2b(labels.tobytes(), digest_size=16).digest()
        got = self._views.get(key)
        if got is None:
            k = int(labels.max()) + 1 if len(labels) else 0
            got = EdgeSource(k, labels[self.u], labels[self.v], self.w)
            if len(self._views) > 64:
                self._views.clear()
            self._views[key] = got
        return got

    def cut_values(self, X):
        """Cut value of each row of the boolean matrix X (q x n)."""
        X = np.asarray(X, dtype=bool)
        if X.ndim == 1:
            X = X[None, :]
        out = np.zeros(len(X))
        if not len(self.w):
            return out
        step = max(1, int(4_000_000 // max(1, len(self.w))))
        for s in range(0, len(X), step):
            blk = X[s:s + step]
            out[s:s + step] = (blk[:, self.u] != blk[:, self.v]) @ self.w
        return out

    def degrees(self):
        d = np.zeros(self.n)
        np.add.at(d, self.u, self.w)
        np.add.at(d, self.v, self.w)
        return d

    def graph(self):
        w = self.w
        if np.all(w == np.round(w)):
            w = np.round(w).astype(np.int64)
        return WeightedGraph(self.n, self.u, self.v, w)


def _num(x):
    r = round(float(x))
    return int(r) if abs(r - x) < 1e-9 else float(x)


# ---------------------------------------------------------------- families

class Family:
    """A planned group of cut queries answered together.

    ``queries`` is the exact number of cut queries the family stands for.
    ``labels`` maps base vertices to the supervertices of a contracted view
    (None for the base graph).
    """

    queries = 0
    labels = None

    def answer(self, source):
        raise NotImplementedError


class CutSets(Family):
    """Explicit vertex sets over the view; answer i is cut(set i)."""

    def __init__(self, sets, n, labels=None):
        self.labels = labels
        if isinstance(sets, np.ndarray) and sets.dtype == bool and sets.ndim == 2:
            self.X = sets
        else:
            sets = list(sets)
            self.X = np.zeros((len(sets), n), dtype=bool)
            for i, S in enumerate(sets):
                self.X[i] = side_mask(n, S)
        self.queries = len(self.X)

    def answer(self, source):
        return [_num(x) for x in source.cut_values(self.X)]


class Degrees(Family):
    """All singleton cuts of the view."""

    def __init__(self, n, labels=None):
        self.n, self.labels, self.queries = n, labels, n

    def answer(self, source):
        return source.degrees()


class CrossWeights(Family):
    """w(E(S_i, T_i)) for disjoint pairs, three cut queries each."""

    def __init__(self, pairs, n, labels=None):
        self.labels = labels
        S = np.stack([side_mask(n, a) for a, _ in pairs]) if pairs else np.zeros((0, n), bool)
        T = np.stack([side_mask(n, b) for _, b in pairs]) if pairs else np.zeros((0, n), bool)
        if np.any(S & T):
            raise ValueError("cross_weight needs disjoint sets")
        self.S, self.T = S, T
        self.queries = 3 * len(S)

    def answer(self, source):
        a = source.cut_values(self.S)
        b = source.cut_values(self.T)
        c = source.cut_values(self.S | self.T)
        return [_num(x) for x in (a + b - c) / 2]


def cross_weight_sets(S, T, n):
    """The three sets whose cut values give w(E(S,T)), and the decoder."""
    S, T = side_mask(n, S), side_mask(n, T)
    return [S, T, S | T], lambda a, b, c: (a + b - c) / 2


def additive_from_cuts(S, singleton_cuts, cut_S):
    """Q(S) = (sum of degrees in S - cut(S)) / 2."""
    return (sum(singleton_cuts[v] for v in S) - cut_S) / 2


# ---------------------------------------------------------------- oracles

class CutOracle:
    """Answers batches of query families against a hidden graph."""

    def __init__(self, graph):
        self.graph = graph
        self.n = graph.n
        self.ledger = QueryLedger()
        self._source = EdgeSource.from_graph(graph)
        self.log = None

    def source(self):
        return self._source

    def submit(self, batch):
        batch = list(batch)
        self.ledger.record(sum(f.queries for f in batch))
        base = self.source()
        answers = [f.answer(base.view(f.labels)) for f in batch]
        if self.log is not None:
            self.log.append((batch, answers))
        return answers

    def submit_round(self, sets, labels=None, n=None):
        """Plain batch of vertex sets; returns their cut values."""
        fam = CutSets(sets, n if n is not None else self.n, labels)
        return self.submit([fam])[0]


class StreamOracle(CutOracle):
    """Oracle over a stream of signed edge updates; one pass per round."""

    def __init__(self, n, events):
        self.n = int(n)
        self.events = list(events)
        self.ledger = QueryLedger()
        self.passes = 0
        self.log = None
        self.graph = None

    def source(self):
        self.passes += 1
        return stream_source(self.n, self.events)


def stream_source(n, events):
    if events:
        u, v, dw = (np.asarray(x) for x in zip(*events))
    else:
        u = v = dw = np.zeros(0, dtype=np.int64)
    return EdgeSource(n, u, v, dw, signed=True)


def stream_answer_pass(n, events, batch):
    """Answer one round from a single scan of the stream."""
    source = stream_source(n, events)
    return [f.answer(source.view(f.labels)) for f in batch]


def read_stream(path):
    events = []
    for ln in open(path):
        parts = ln.split()
        if len(parts) >= 3:
            events.append((int(parts[0]), int(parts[1]), int(parts[2])))
    return events


def graph_to_stream(G, rng, noise=0.5):
    """Events whose final state is G: split insertions plus cancelled extras."""
    events = []
    for a, b, c in G.edges():
        if c > 1 and rng.random() < noise:
            k = int(rng.integers(1, c))
            events += [(a, b, k), (a, b, c - k)]
        else:
            events.append((a, b, c))
    for _ in range(int(noise * G.m)):
        a, b = rng.choice(G.n, 2, replace=False)
        c = int(rng.integers(1, 5))
        events += [(int(a), int(b), c)]
        events.append((int(a), int(b), -c))
    order = rng.permutation(len(events))
    # a deletion must not precede its insertion
    out = [events[i] for i in order]
    bal = {}
    fixed = []
    pending = []
    for e in out:
        key = (min(e[0], e[1]), max(e[0], e[1]))
        if e[2] < 0 and bal.get(key, 0) + e[2] < 0:
            pending.append(e)
            continue
        bal[key] = bal.get(key, 0) + e[2]
        fixed.append(e)
    return fixed + pending


# ---------------------------------------------------------------- running

def run(oracle, gen):
    """Drive a staged generator to completion; one oracle round per yield."""
    try:
        batch = next(gen)
        while True:
            batch = gen.send(oracle.submit(batch))
    except StopIteration as stop:
        return stop.value


def parallel(*gens):
    """Run generators in lockstep, merging same-stage batches into one round."""
    gens = list(gens)
    results = [None] * len(gens)
    batches = {}
    for i, g in enumerate(gens):
        try:
            batches[i] = list(next(g))
        except StopIteration as stop:
            results[i] = stop.value
    while batches:
        order = sorted(batches)
        merged = []
        for i in order:
            merged.extend(batches[i])
        answers = yield merged
        off = 0
        for i in order:
            k = len(batches[i])
            part = answers[off:off + k]
            off += k
            try:
                batches[i] = list(gens[i].send(part))
            except StopIteration as stop:
                results[i] = stop.value
                del batches[i]
    return results


def single(family):
    """One-round stage asking a single family; returns its answer."""
    ans = yield [family]
    return ans[0]


def idle():
    """A round with no queries (keeps declared round counts exact)."""
    yield []


# ---------------------------------------------------------------- randomness

class Rng:
    """Seedable, splittable randomness keyed by (master seed, path)."""

    def __init__(self, seed, path=()):
        self.seed = int(seed)
        self.path = tuple(path)
        self._gen = None

    def child(self, *names):
        return Rng(self.seed, self.path + tuple(names))

    def _key(self):
        return [zlib.crc32(str(p).encode()) for p in self.path]

    @property
    def gen(self):
        if self._gen is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=self._key())
            self._gen = np.random.default_rng(ss)
        return self._gen

    def seeds(self, k):
        return self.gen.integers(0, 2**63 - 1, size=k, dtype=np.int64).astype(np.uint64)
