import itertools

import numpy as np
import pytest

from domprod.geometry import PointSet


def triple_loop(a, b):
    """Reference A . B by explicit loops over Python ints."""
    a = [[int(v) for v in row] for row in np.asarray(a)]
    b = [[int(v) for v in row] for row in np.asarray(b)]
    p, k, q = len(a), len(b), len(b[0])
    return np.array([[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(q)]
                     for i in range(p)], dtype=object)


def recount_dominance(coords, mode):
    """D[i][j] recomputed pair by pair in plain Python."""
    rows = [list(r) for r in np.asarray(coords).tolist()]
    cmp = {"LE": lambda x, y: x <= y, "LT": lambda x, y: x < y, "EQ": lambda x, y: x == y}[mode]
    return np.array([[sum(cmp(x, y) for x, y in zip(pi, pj)) for pj in rows] for pi in rows])


def brute_pairs(coords, delta, strict):
    rows = np.asarray(coords)
    out = set()
    for i, j in itertools.combinations(range(len(rows)), 2):
        dist = max(abs(x - y) for x, y in zip(rows[i].tolist(), rows[j].tolist()))
        if (dist < delta) if strict else (dist <= delta):
            out.add((i, j))
    return out


def with_duplicates(rng, coords, frac=0.3):
    """Copy random values within each column and one whole row onto another."""
    coords = np.array(coords)
    n, d = coords.shape
    if n >= 2:
        for k in range(d):
            m = max(1, int(frac * n))
            src = rng.integers(0, n, size=m)
            dst = rng.integers(0, n, size=m)
            coords[dst, k] = coords[src, k]
        a, b = rng.choice(n, size=2, replace=False)
        coords[b] = coords[a]
    return coords


@pytest.fixture
def three_points():
    return PointSet(np.array([[0, 0], [3, 1], [10, 10]]), "int", 10)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
