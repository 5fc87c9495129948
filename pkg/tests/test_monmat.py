import numpy as np
from hypothesis import given, strategies as st

from cutquery.graph import exact_cut
from cutquery.monmat import (
    MonotoneMatrixView,
    branching,
    check_monotone,
    monotone_cut_stage,
    random_monotone,
    solve_monotone,
)
from cutquery.oracle import CutOracle, run

from conftest import graph


def test_examples():
    v = MonotoneMatrixView.from_matrix([[5]])
    assert solve_monotone(v, 1) == (5, (0, 0)) and v.rounds == 1 and v.reads == 1
    M = [[1, 5, 7], [2, 3, 6], [4, 4, 2]]
    assert solve_monotone(MonotoneMatrixView.from_matrix(M), 2) == (1, (0, 0))
    value, where = solve_monotone(MonotoneMatrixView.from_matrix(np.full((6, 6), 3)), 2)
    assert value == 3


def test_check_monotone_examples():
    assert check_monotone([[0, 1], [1, 0]])
    assert check_monotone([[0, 1], [2, 0], [1, 3]])
    assert not check_monotone([[1, 0], [0, 1]])


def test_branching():
    assert branching(64, 2) == 8 and branching(64, 3) == 4 and branching(1, 1) == 2


def test_cut_backed_view():
    G = graph(4, [(0, 1, 3), (1, 2, 1), (2, 3, 5)])
    sets = [np.array([1, 0, 0, 0], bool), np.array([1, 1, 0, 0], bool)]
    O = CutOracle(G)
    value, where = run(O, monotone_cut_stage(2, 1, 1, lambda i, j: sets[i], 4))
    assert value == 1 and where == (1, 0) and O.ledger.rounds == 1
    assert exact_cut(G, sets[where[0]]) == value


@given(st.integers(1, 64), st.integers(1, 64), st.integers(1, 3), st.integers(0, 10**6))
def test_random_monotone(a, b, r, seed):
    M = random_monotone(a, b, np.random.default_rng(seed))
    assert check_monotone(M)
    view = MonotoneMatrixView.from_matrix(M)
    value, (i, j) = solve_monotone(view, r)
    assert value == M.min() and M[i, j] == value
    assert view.rounds <= r
    N = max(a, b)
    assert view.reads <= 8 * r * N ** (1 + 1 / r)


@given(st.integers(2, 24), st.integers(1, 3), st.integers(0, 10**6))
def test_monge_with_ties(a, r, seed):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.integers(0, 4, a))
    y = np.sort(rng.integers(0, 4, a))
    M = np.abs(x[:, None] - y[None, :]).astype(float)
    value, _ = solve_monotone(MonotoneMatrixView.from_matrix(M), r)
    assert value == M.min()
