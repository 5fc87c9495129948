import numpy as np
import pytest
from hypothesis import given, strategies as st

from cutquery.graph import enumerate_cuts_at_most, exact_cut, exact_max_cut, exact_min_cut, exact_st_cut
from cutquery.mincut import (
    TreeDecomposition,
    _halving_instances,
    _pair_instances,
    _sparsifier_values,
    approx_max_cut,
    atoms,
    min_cut_2round,
    min_cut_unweighted,
    min_cut_unweighted_sparsifier,
    min_cut_weighted,
    min_st_cut,
    pack_trees,
    residual_labels,
)
from cutquery.monmat import check_monotone
from cutquery.oracle import CutOracle, Rng

from conftest import clique, graph, lobes, random_graph


def consistent(G, res):
    return not res.failed and exact_cut(G, res.side) == res.value


def star(k):
    return graph(k + 1, [(0, i, 1) for i in range(1, k + 1)])


def test_2round_examples():
    res = min_cut_2round(CutOracle(star(8)), seed=0)
    assert res.value == 1 and res.ledger["rounds"] == 2
    G = lobes(8, 8, [(0, 0, 1), (1, 1, 1), (2, 2, 1)])
    hits = 0
    for s in range(20):
        res = min_cut_2round(CutOracle(G), seed=s)
        assert consistent(G, res) and res.ledger["rounds"] == 2 and res.value >= 3
        hits += res.value == 3
    assert hits >= 19


def test_unweighted_examples():
    C16 = graph(16, [(i, (i + 1) % 16, 1) for i in range(16)])
    res = min_cut_unweighted(CutOracle(C16), r=2, seed=1)
    assert res.value == 2 and res.ledger["rounds"] == 5 and consistent(C16, res)
    K8 = graph(8, clique(8))
    res = min_cut_unweighted(CutOracle(K8), r=1, seed=1)
    assert res.value == 7 and res.ledger["rounds"] == 3


@pytest.mark.parametrize("r", [1, 2, 3])
def test_unweighted_rounds(r):
    G = lobes(6, 6, [(0, 0, 1), (1, 2, 1)])
    res = min_cut_unweighted(CutOracle(G), r=r, seed=r)
    assert res.ledger["rounds"] == 2 * r + 1 and res.value == 2 and consistent(G, res)


def test_unweighted_sparsifier_star():
    res = min_cut_unweighted_sparsifier(CutOracle(star(6)), r=1, seed=0)
    assert res.value == 1 and res.ledger["rounds"] == 7


@pytest.mark.slow
def test_unweighted_sparsifier_lobes():
    G = lobes(6, 6, [(0, 0, 1), (1, 1, 1)])
    hits = 0
    for s in range(5):
        res = min_cut_unweighted_sparsifier(CutOracle(G), r=2, seed=s)
        assert res.ledger["rounds"] == 10 and consistent(G, res)
        hits += res.value == 2
    assert hits >= 4


def test_weighted_examples():
    P = graph(4, [(0, 1, 3), (1, 2, 1), (2, 3, 5)])
    res = min_cut_weighted(CutOracle(P), W=5, r=2, seed=0)
    assert res.value == 1 and consistent(P, res) and res.ledger["rounds"] <= 4 * 2 + 5
    G = lobes(5, 5, [(0, 0, 4)], w=3)
    for s in range(3):
        res = min_cut_weighted(CutOracle(G), W=8, r=2, seed=s)
        assert res.value == 4 and consistent(G, res)
        assert res.ledger["rounds"] <= 4 * 2 + 3


def test_st_examples():
    res = min_st_cut(CutOracle(graph(2, [(0, 1, 1)])), 0, 1, r=1, seed=0)
    assert res.value == 1 and res.ledger["rounds"] == 7
    G = lobes(6, 6, [(0, 0, 1), (1, 1, 1), (2, 2, 1)])
    res = min_st_cut(CutOracle(G), 0, 6, r=2, seed=0)
    assert res.value == 3 and 0 in res.side and 6 not in res.side
    assert exact_cut(G, res.side) == 3
    res = min_st_cut(CutOracle(G), 4, 5, r=2, seed=0)
    assert res.value == 5 and 4 in res.side and 5 not in res.side


def test_max_cut_examples():
    res = approx_max_cut(CutOracle(graph(2, [(0, 1, 3)])), 0.3, 1)
    assert res.value == 3 and res.ledger["rounds"] == 7
    C4 = graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
    res = approx_max_cut(CutOracle(C4), 0.3, 2)
    assert res.value == 4 and exact_cut(C4, res.side) == 4


def test_atoms():
    lab = atoms(4, [{0, 1}, {1, 2}])
    assert lab[0] != lab[1] != lab[2] and lab[3] == lab[0] or lab[3] != lab[1]
    assert len(set(atoms(5, []).tolist())) == 1


def test_residual_keeps_s_t_apart():
    G = lobes(4, 4, [(0, 0, 1)])
    lab = residual_labels(G, 1, 5)
    assert lab[1] != lab[5]
    H = G.contract(lab)
    assert exact_st_cut(H, lab[1], lab[5]).value == exact_st_cut(G, 1, 5).value


def test_tree_decomposition_paths():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(2, 30))
        edges = [(int(rng.integers(0, v)), v) for v in range(1, n)]
        T = TreeDecomposition.build(n, edges)
        flat = sorted(e for p in T.paths for e in p)
        assert flat == list(range(1, n))
        for p in T.paths:
            for a, b in zip(p, p[1:]):
                assert T.parent[b] == a
        # a root-to-leaf walk meets few paths
        head = {p[0] for p in T.paths}
        for v in range(1, n):
            hops, x = 0, v
            while x > 0:
                hops += x in head
                x = int(T.parent[x])
            assert hops <= 1 + np.log2(n)


@given(st.integers(4, 11), st.integers(1, 6), st.integers(0, 10**6))
def test_instances_are_monotone(n, W, seed):
    rng = np.random.default_rng(seed)
    G = random_graph(n, 0.5, W, rng)
    edges = pack_trees(G, Rng(seed), count=1)[0]
    T = TreeDecomposition.build(n, edges)
    V = _sparsifier_values(G, T)
    inst = [x for p in T.paths for x in _halving_instances(p)]
    for i, p1 in enumerate(T.paths):
        for p2 in T.paths[i + 1:]:
            inst += _pair_instances(T, p1, p2)
    for rows, cols in inst:
        M = V[np.ix_(rows, cols)]
        for e, f in [(rows[0], cols[0])]:
            assert np.isclose(M[0, 0], exact_cut(G, T.sub[e] ^ T.sub[f]))
        assert check_monotone(M) or check_monotone(M.T[::-1, ::-1]) or _monge(M)


def _monge(M):
    a, b = M.shape
    for i in range(a - 1):
        for j in range(b - 1):
            if M[i, j] + M[i + 1, j + 1] > M[i, j + 1] + M[i + 1, j] + 1e-9:
                return False
    return True


@given(st.integers(4, 10), st.integers(1, 8), st.integers(0, 10**6))
def test_two_respecting_completeness(n, W, seed):
    G = random_graph(n, 0.6, W, np.random.default_rng(seed))
    res = min_cut_weighted(CutOracle(G), W=W, r=2, seed=seed, all_pairs=True)
    assert consistent(G, res)
    lam = exact_min_cut(G).value
    assert res.value >= lam
    mins = [c.side for c in enumerate_cuts_at_most(G, lam)]
    for edges in res.info["tree_edges"]:
        crossing = [sum((a in S) != (b in S) for a, b in edges) for S in mins]
        if min(crossing) <= 2:
            assert res.value == lam
            break


@given(st.integers(3, 10), st.integers(0, 10**6))
def test_witness_consistency(n, seed):
    G = random_graph(n, 0.6, 1, np.random.default_rng(seed))
    lam = exact_min_cut(G).value
    for res in (min_cut_2round(CutOracle(G), seed=seed, trials=2),
                min_cut_unweighted(CutOracle(G), r=2, seed=seed, trials=2)):
        if not res.failed:
            assert consistent(G, res) and res.value >= lam
    s, t = 0, n - 1
    res = min_st_cut(CutOracle(G), s, t, r=1, seed=seed)
    if not res.failed:
        assert exact_cut(G, res.side) == res.value and (s in res.side) != (t in res.side)
        assert res.value >= exact_st_cut(G, s, t).value
    res = approx_max_cut(CutOracle(G), 0.3, 1, seed=seed)
    assert exact_cut(G, res.side) == res.value <= exact_max_cut(G)[0].value
