import numpy as np
from hypothesis import given, strategies as st

from cutquery.graph import WeightedGraph, exact_min_cut
from cutquery.oracle import CutOracle, Rng
from cutquery.packing import is_forest_family, is_maximal, pack_forests, tau_samples

from conftest import clique, graph, random_graph


def union_graph(n, pk):
    edges = pk.base_edges()
    if not edges:
        return WeightedGraph(n)
    u, v = zip(*edges)
    return WeightedGraph(n, u, v, np.ones(len(edges), np.int64))


def test_single_edge():
    G = graph(2, [(0, 1, 1)])
    pk = pack_forests(CutOracle(G), 2, 1, Rng(0))
    assert [len(f) for f in pk.forests] == [1, 0] and is_maximal(G, pk)


def test_k4_two_spanning_trees():
    G = graph(4, clique(4))
    O = CutOracle(G)
    pk = pack_forests(O, 2, 1, Rng(0))
    assert [len(f) for f in pk.forests] == [3, 3]
    assert is_forest_family(pk) and is_maximal(G, pk) and O.ledger.rounds == 2


def test_c4_three_forests():
    C4 = graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
    pk = pack_forests(CutOracle(C4), 3, 2, Rng(1))
    assert [len(f) for f in pk.forests] == [3, 1, 0] and is_maximal(C4, pk)


def test_rounds_are_2r():
    G = graph(8, clique(8))
    for r in (1, 2, 3):
        O = CutOracle(G)
        pack_forests(O, 2, r, Rng(r))
        assert O.ledger.rounds == 2 * r


def test_tau_samples():
    assert tau_samples(2, 1, 2) == 0
    assert tau_samples(1, 16, 2) == int(np.ceil(8 * 16 ** 1.5 * np.log(16)))


def test_edge_count_decay():
    ok = total = 0
    for s in range(20):
        G = random_graph(48, 0.3, 1, np.random.default_rng(s))
        pk = pack_forests(CutOracle(G), 2, 2, Rng(s))
        if not pk.samples:
            continue
        # inter-class edges after the first iteration
        U = pk.U
        total += 1
        cross = sum(1 for a, b, _ in G.edges() if U[a] != U[b])
        ok += cross <= G.m / 48 ** 0.25
    assert ok >= 0.95 * total


@given(st.integers(2, 14), st.floats(0.2, 0.9), st.integers(1, 3), st.integers(1, 3),
       st.integers(0, 10**6))
def test_packing_invariants(n, p, k, r, seed):
    G = random_graph(n, p, 1, np.random.default_rng(seed))
    pk = pack_forests(CutOracle(G), k, r, Rng(seed))
    assert is_forest_family(pk)
    assert is_maximal(G, pk)
    lam = exact_min_cut(G).value
    if k >= lam:
        assert exact_min_cut(union_graph(n, pk)).value == lam
