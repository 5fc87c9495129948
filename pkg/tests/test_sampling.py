import numpy as np
from hypothesis import given, strategies as st

from cutquery.oracle import CutOracle, Rng
from cutquery.sampling import (
    EMPTY,
    FAIL,
    DegreeParams,
    UniformParams,
    WeightedParams,
    estimate_degree,
    heavy_hitters,
    sample_uniform_edge,
    sample_weighted_edge,
    sparse_recover_star,
    uniform_stage,
    weighted_stage,
)
from cutquery.oracle import run

from conftest import graph, random_graph


def star(weights, extra=0):
    n = len(weights) + 1 + extra
    return graph(n, [(0, i + 1, w) for i, w in enumerate(weights)])


def test_sparse_recover_examples():
    G = star([1, 1, 1], extra=3)
    got = sparse_recover_star(CutOracle(G), 0, range(1, 7), 8, Rng(1))
    assert [(e.v, e.w) for e in got] == [(1, 1), (2, 1), (3, 1)]
    assert sparse_recover_star(CutOracle(G), 0, [4, 5], 8, Rng(1)) == []
    one = sparse_recover_star(CutOracle(star([9])), 0, [1], 8, Rng(1))
    assert [(e.u, e.v, e.w) for e in one] == [(0, 1, 9)]


def test_uniform_examples():
    G = star([1, 1, 1, 1], extra=2)
    assert sample_uniform_edge(CutOracle(G), 0, [5], Rng(0)) == EMPTY
    e = sample_uniform_edge(CutOracle(G), 0, [2, 5], Rng(0))
    assert (e.u, e.v, e.w) == (0, 2, 1)
    O = CutOracle(G)
    sample_uniform_edge(O, 0, range(1, 7), Rng(3))
    assert O.ledger.rounds == 1
    assert O.ledger.queries == UniformParams.for_graph(7).queries


def test_uniform_four_way_frequencies():
    G = star([1, 1, 1, 1])
    k = 20000
    mask = np.zeros((1, 5), bool)
    mask[0, 1:] = True
    x, _, _ = run(CutOracle(G), uniform_stage(5, 5, np.zeros(k, np.int64), mask,
                                              np.zeros(k, np.int64), Rng(11).seeds(k)))
    freq = np.bincount(x[x > 0], minlength=5)[1:] / k
    assert np.all(np.abs(freq - 0.25) <= 0.02)


def test_degree_examples():
    G = star([1], extra=70)
    assert estimate_degree(CutOracle(G), 0, [5, 6], Rng(0)) == 0
    est = estimate_degree(CutOracle(G), 0, [1], Rng(0))
    assert 2 ** -5 <= est <= 2 ** 5
    H = star([1] * 64)
    for s in range(50):
        assert 2 <= estimate_degree(CutOracle(H), 0, range(1, 65), Rng(s)) <= 2048


def test_degree_round_and_queries():
    O = CutOracle(star([1] * 8))
    estimate_degree(O, 0, range(1, 9), Rng(0))
    assert O.ledger.rounds == 1 and O.ledger.queries == DegreeParams.for_graph(9).queries


def test_heavy_hitter_examples():
    assert heavy_hitters(CutOracle(star([5])), 0, [1], 8, Rng(0)) == {1: 5}
    est = heavy_hitters(CutOracle(star([5, 1, 1, 1])), 0, [1, 2, 3, 4], 8, Rng(0))
    for v, w in zip([1, 2, 3, 4], [5, 1, 1, 1]):
        assert w <= est.get(v, 0) <= w + 1
    assert heavy_hitters(CutOracle(star([5], extra=2)), 0, [2, 3], 8, Rng(0)) == {}


def test_weighted_examples():
    G = star([1, 3])
    O = CutOracle(G)
    e = sample_weighted_edge(O, 0, [2], 3, Rng(0))
    assert (e.v, e.w) == (2, 3)
    assert O.ledger.rounds == 2
    assert sample_weighted_edge(CutOracle(star([1, 3], extra=1)), 0, [3], 3, Rng(0)) == EMPTY


def test_weighted_two_edge_frequencies():
    G = star([1, 3])
    k = 100000
    mask = np.zeros((1, 3), bool)
    mask[0, 1:] = True
    x, _, _, _ = run(CutOracle(G), weighted_stage(3, 3, np.zeros(k, np.int64), mask,
                                                  np.zeros(k, np.int64), Rng(2).seeds(k)))
    ok = x[x >= 0][:20000]
    assert len(ok) == 20000
    freq = np.bincount(ok, minlength=3)[1:] / len(ok)
    assert abs(freq[0] - 0.25) <= 0.02 and abs(freq[1] - 0.75) <= 0.02


def test_weighted_params_shape():
    p = WeightedParams.for_graph(64, 8)
    assert p.levels == 9 and p.cap == int(np.ceil(256 * p.alpha))


@given(st.integers(3, 14), st.integers(0, 10**6))
def test_recovered_star_is_sound(n, seed):
    rng = np.random.default_rng(seed)
    G = random_graph(n, 0.6, 9, rng, connected=False)
    T = [v for v in range(1, n) if rng.random() < 0.7]
    got = sparse_recover_star(CutOracle(G), 0, T, 2, Rng(seed))
    if got == FAIL:
        return
    adj = G.adjacency()[0]
    for e in got:
        assert e.v in T and adj[e.v] == e.w


@given(st.integers(2, 10), st.integers(0, 10**6))
def test_count_min_never_underestimates(k, seed):
    rng = np.random.default_rng(seed)
    w = rng.integers(1, 50, k)
    est = heavy_hitters(CutOracle(star(w)), 0, range(1, k + 1), 4, Rng(seed))
    for v in range(1, k + 1):
        assert est[v] >= w[v - 1]


@given(st.integers(2, 12), st.integers(0, 10**6))
def test_sampled_edges_exist(n, seed):
    rng = np.random.default_rng(seed)
    G = random_graph(n, 0.6, 9, rng, connected=False)
    T = list(range(1, n))
    e = sample_uniform_edge(CutOracle(G), 0, T, Rng(seed))
    adj = G.adjacency()[0]
    if e == EMPTY:
        assert not adj
    elif e != FAIL:
        assert adj[e.v] == e.w
    f = sample_weighted_edge(CutOracle(G), 0, T, 9, Rng(seed))
    if f not in (EMPTY, FAIL):
        assert adj[f.v] == f.w
