"""Deterministic test graphs from a short text spec and a seed."""

from __future__ import annotations

import itertools

import numpy as np

from .graph import WeightedGraph, read_graph


class SpecError(ValueError):
    pass


def _weights(rng, m, Wmax):
    if Wmax <= 1:
        return np.ones(m, dtype=np.int64)
    return rng.integers(1, Wmax + 1, m)


def gnp(n, p, Wmax=1, seed=0, max_tries=1000):
    """G(n, p), redrawn until connected.  Returns (graph, attempts)."""
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, 1)
    for attempt in range(1, max_tries + 1):
        keep = rng.random(len(iu)) < p
        G = WeightedGraph(n, iu[keep], iv[keep], _weights(rng, int(keep.sum()), Wmax), W=Wmax)
        if G.is_connected():
            return G, attempt
    raise SpecError(f"gnp:{n},{p} stayed disconnected after {max_tries} draws")


def clique_edges(vertices):
    return list(itertools.combinations(vertices, 2))


def planted(n1, n2, k, Wmax=1, seed=0):
    """Two cliques joined by k distinct bridges."""
    rng = np.random.default_rng(seed)
    if k > n1 * n2:
        raise SpecError("more bridges than vertex pairs")
    edges = clique_edges(range(n1)) + clique_edges(range(n1, n1 + n2))
    pick = rng.choice(n1 * n2, k, replace=False)
    edges += [(int(x // n2), n1 + int(x % n2)) for x in pick]
    u, v = zip(*edges)
    return WeightedGraph(n1 + n2, u, v, _weights(rng, len(edges), Wmax), W=Wmax)


def cycle(n):
    return WeightedGraph(n, range(n), [(i + 1) % n for i in range(n)], np.ones(n, np.int64))


def clique(n):
    u, v = zip(*clique_edges(range(n)))
    return WeightedGraph(n, u, v, np.ones(len(u), np.int64))


def dumbbell(n, k):
    """Two K_n joined by a path of k edges (k - 1 inner vertices)."""
    edges = clique_edges(range(n)) + clique_edges(range(n, 2 * n))
    chain = [0] + list(range(2 * n, 2 * n + k - 1)) + [n]
    edges += list(zip(chain[:-1], chain[1:]))
    u, v = zip(*edges)
    return WeightedGraph(2 * n + k - 1, u, v, np.ones(len(u), np.int64))


def parse(spec):
    kind, _, rest = spec.partition(":")
    if not rest:
        raise SpecError(f"malformed generator spec {spec!r}")
    if kind == "file":
        return kind, [rest]
    try:
        args = [float(x) if "." in x else int(x) for x in rest.split(",")]
    except ValueError as exc:
        raise SpecError(f"malformed generator spec {spec!r}") from exc
    arity = {"gnp": (2, 3), "planted": (3, 4), "cycle": (1, 1), "clique": (1, 1), "dumbbell": (2, 2)}
    if kind not in arity:
        raise SpecError(f"unknown generator {kind!r}")
    lo, hi = arity[kind]
    if not lo <= len(args) <= hi:
        raise SpecError(f"{kind} takes {lo}..{hi} arguments")
    return kind, args


def generate(spec, seed=0):
    """(graph, info) for ``spec``; info records regeneration attempts."""
    kind, args = parse(spec)
    if kind == "gnp":
        n, p = int(args[0]), float(args[1])
        G, tries = gnp(n, p, int(args[2]) if len(args) > 2 else 1, seed)
        return G, {"attempts": tries}
    if kind == "planted":
        return planted(*(int(a) for a in args[:3]), Wmax=int(args[3]) if len(args) > 3 else 1,
                       seed=seed), {}
    if kind == "cycle":
        return cycle(int(args[0])), {}
    if kind == "clique":
        return clique(int(args[0])), {}
    if kind == "dumbbell":
        return dumbbell(int(args[0]), int(args[1])), {}
    return read_graph(args[0]), {}


def gen(spec, seed=0):
    return generate(spec, seed)[0]
