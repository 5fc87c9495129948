import numpy as np
from hypothesis import given, strategies as st

from cutquery.graph import WeightedGraph
from cutquery.oracle import CutOracle, Rng, run
from cutquery.recovery import RecoveryFailure, recover_graph, recover_stage, recovery_plan, verify_recovery

from conftest import clique, graph, random_graph


def same(G, H):
    return sorted(G.merged().edges()) == sorted(H.merged().edges())


def test_empty_graph():
    H = recover_graph(CutOracle(graph(5, [])), 5, 16, Rng(0))
    assert H.m == 0


def test_k4():
    G = graph(4, clique(4))
    O = CutOracle(G)
    H = recover_graph(O, 4, 32, Rng(0))
    assert same(G, H) and O.ledger.rounds == 1


def test_gnp_weighted_budget_4m():
    ok = 0
    for s in range(100):
        rng = np.random.default_rng(s)
        G = random_graph(64, 0.1, 10, rng)
        try:
            ok += same(G, recover_graph(CutOracle(G), 64, 4 * G.m, Rng(s)))
        except RecoveryFailure:
            pass
    assert ok >= 99


def test_plan_is_non_adaptive():
    a = recovery_plan(20, 50, Rng(3))
    b = recovery_plan(20, 50, Rng(3))
    assert all(np.array_equal(x.colors, y.colors) for x, y in zip(a, b))


def test_overflow_is_reported():
    G = graph(24, clique(24))
    try:
        H = recover_graph(CutOracle(G), 24, 2, Rng(0), colorings=1)
    except RecoveryFailure as exc:
        assert set(exc.partial.edges()) <= set(G.edges())
    else:
        assert same(G, H)


def test_verify_examples():
    G = graph(6, clique(6))
    O = CutOracle(G)
    assert verify_recovery(G, O, 64, Rng(0)) and O.ledger.rounds == 1
    missing = WeightedGraph.from_edges(6, clique(6)[1:])
    assert not verify_recovery(missing, CutOracle(G), 64, Rng(0))
    assert verify_recovery(missing, CutOracle(G), 0, Rng(0))


def test_contracted_recovery():
    G = graph(6, clique(3) + clique(3, offset=3) + [(0, 3, 2)])
    labels = np.array([0, 0, 0, 1, 1, 1])
    H = run(CutOracle(G), recover_stage(2, 8, Rng(0), labels=labels))
    assert H.edges() == [(0, 1, 2)]


@given(st.integers(2, 20), st.floats(0.1, 0.9), st.integers(0, 10**6))
def test_recovery_is_sound(n, p, seed):
    rng = np.random.default_rng(seed)
    G = random_graph(n, p, 7, rng, connected=False)
    truth = dict(((a, b), c) for a, b, c in G.edges())
    try:
        H = recover_graph(CutOracle(G), n, max(1, G.m // 4), Rng(seed), colorings=2)
    except RecoveryFailure as exc:
        H = exc.partial
    for a, b, c in H.edges():
        assert truth[(a, b)] == c
