"""Minimum of a monotone matrix in r rounds of entry reads.

A matrix is monotone when, for columns j < i, the last row attaining
column j's minimum is at most the first row attaining column i's.  The
solver reads g - 1 evenly spaced boundary columns in full, which pins
the row range of every column between two boundaries, and recurses on
those blocks.  Monge matrices (topmost and bottommost argmins both
non-decreasing) are handled too.  All blocks of one recursion depth are read in the same
round; g is the smallest integer with g^r >= max(a, b).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .oracle import CutSets


@dataclass
class ColumnMin:
    j: int
    value: float
    first: int
    last: int


def branching(N, r):
    g = 1
    while g ** r < N:
        g += 1
    return max(2, g)


def monotone_stage(a, b, r):
    """Generator yielding lists of cells (i, j); returns (min, (i, j)).

    Each yield is one round.
    """
    if a == 0 or b == 0:
        return float("inf"), None
    g = branching(max(a, b), r)
    tasks = [(0, a - 1, 0, b - 1)]
    best, where = float("inf"), None
    while tasks:
        cells, plan = [], []
        for rl, rh, cl, ch in tasks:
            if rl > rh or cl > ch:
                continue
            w = ch - cl + 1
            if w <= g:
                cols, bounds = list(range(cl, ch + 1)), None
            else:
                cols = [cl + -(-k * w // g) - 1 for k in range(1, g)]
                bounds = cols
            plan.append((rl, rh, cl, ch, cols, bounds))
            for c in cols:
                cells.extend((i, c) for i in range(rl, rh + 1))
        if not plan:
            break
        values = yield cells
        pos = 0
        tasks = []
        for rl, rh, cl, ch, cols, bounds in plan:
            mins = {}
            h = rh - rl + 1
            for c in cols:
                col = np.asarray(values[pos:pos + h], dtype=np.float64)
                pos += h
                m = col.min()
                hit = np.flatnonzero(col == m)
                mins[c] = ColumnMin(c, m, rl + int(hit[0]), rl + int(hit[-1]))
                if m < best:
                    best, where = m, (rl + int(hit[0]), c)
            if bounds is None:
                continue
            edges = [None] + bounds + [None]
            for left, right in zip(edges[:-1], edges[1:]):
                lo_c = cl if left is None else left + 1
                hi_c = ch if right is None else right - 1
                # widest consistent range: also safe when tied argmin
                # ranges of neighbouring columns overlap (Monge matrices)
                lo_r = rl if left is None else mins[left].first
                hi_r = rh if right is None else mins[right].last
                if lo_c <= hi_c and lo_r <= hi_r:
                    tasks.append((lo_r, hi_r, lo_c, hi_c))
    return _num(best), where


def _num(x):
    return int(x) if float(x).is_integer() else float(x)


@dataclass
class MonotoneMatrixView:
    """Metered entry access: reads are counted per round."""

    a: int
    b: int
    entry: object
    per_round: list = field(default_factory=list)

    @classmethod
    def from_matrix(cls, M):
        M = np.asarray(M)
        return cls(M.shape[0], M.shape[1], lambda i, j: M[i, j])

    @property
    def rounds(self):
        return len(self.per_round)

    @property
    def reads(self):
        return sum(self.per_round)

    def read_batch(self, cells):
        self.per_round.append(len(cells))
        return [self.entry(i, j) for i, j in cells]


def solve_monotone(view, r):
    gen = monotone_stage(view.a, view.b, r)
    try:
        cells = next(gen)
        while True:
            cells = gen.send(view.read_batch(cells))
    except StopIteration as stop:
        return stop.value


def monotone_cut_stage(a, b, r, entry_set, n, labels=None):
    """Monotone search whose entries are cut queries on entry_set(i, j)."""
    gen = monotone_stage(a, b, r)
    try:
        cells = next(gen)
        while True:
            X = np.zeros((len(cells), n), dtype=bool)
            for k, (i, j) in enumerate(cells):
                X[k] = entry_set(i, j)
            ans = yield [CutSets(X, n, labels)]
            cells = gen.send(ans[0])
    except StopIteration as stop:
        return stop.value


def column_minima(M):
    M = np.asarray(M, dtype=np.float64)
    out = []
    for j in range(M.shape[1]):
        m = M[:, j].min()
        hit = np.flatnonzero(M[:, j] == m)
        out.append(ColumnMin(j, m, int(hit[0]), int(hit[-1])))
    return out


def check_monotone(M):
    top = -1
    for c in column_minima(M):
        if top > c.first:
            return False
        top = max(top, c.last)
    return True


def random_monotone(a, b, rng, vmax=100):
    """A random monotone a x b matrix built on a planted argmin staircase."""
    cuts = np.sort(rng.integers(0, a, b))
    M = rng.integers(1, vmax, (a, b)).astype(np.float64)
    prev_last = 0
    for j in range(b):
        first = max(prev_last, int(cuts[j]))
        last = first if rng.random() < 0.7 else int(rng.integers(first, min(a, first + 3)))
        last = min(last, a - 1)
        if j + 1 < b:
            last = min(last, max(first, int(cuts[j + 1])))
        m = rng.integers(0, vmax // 2)
        col = M[:, j]
        col[col <= m] = m + 1 + rng.integers(0, 5, int((col <= m).sum()))
        col[first:last + 1] = m
        prev_last = last
    return M
