from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from digitsumlab.symbolic.lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    fm_feasible,
    fm_range,
    lp_feasible,
    lp_max,
    lp_range,
)


def random_system(rng, n, m, lo=-3, hi=3, blo=-4, bhi=6):
    return [(tuple(rng.randint(lo, hi) for _ in range(n)), rng.randint(blo, bhi)) for _ in range(m)]


def grid_range(rows, c, n, box=8):
    """Range over integer points of a small box; only an inner bound for the LP."""
    vals = [sum(ci * xi for ci, xi in zip(c, x))
            for x in itertools.product(range(box + 1), repeat=n)
            if all(sum(ai * xi for ai, xi in zip(a, x)) <= b for a, b in rows)]
    return (min(vals), max(vals)) if vals else None


def test_simple_optimum():
    # max x + y, x + 2y <= 4, 3x + y <= 6
    rows = [((1, 2), 4), ((3, 1), 6)]
    st, val, x = lp_max(rows, (1, 1), 2)
    assert st == OPTIMAL
    assert val == Fraction(14, 5)
    assert (Fraction(x[0]), Fraction(x[1])) == (Fraction(8, 5), Fraction(6, 5))


def test_infeasible_and_unbounded():
    assert lp_max([((1,), -1)], (1,), 1)[0] == INFEASIBLE
    assert lp_max([((-1,), -1)], (1,), 1)[0] == UNBOUNDED
    assert not lp_feasible([((1, 1), -1)], 2)
    assert lp_range([((1,), 3)], (1,), 1) == (0, 3)
    assert lp_range([((-1,), -2)], (1,), 1) == (2, None)
    assert lp_range([((1,), -1)], (1,), 1) is None


def test_zero_variables():
    assert lp_feasible([((), 0)], 0)
    assert not lp_feasible([((), -1)], 0)
    assert lp_max([], (), 0)[0] == OPTIMAL


def test_equality_via_two_rows():
    # x - y = 0, x + y = 3 -> x = y = 3/2
    rows = [((1, -1), 0), ((-1, 1), 0), ((1, 1), 3), ((-1, -1), -3)]
    assert lp_range(rows, (1, 0), 2) == (Fraction(3, 2), Fraction(3, 2))


@pytest.mark.parametrize("seed", range(6))
def test_simplex_agrees_with_fourier_motzkin(seed):
    rng = random.Random(seed)
    for _ in range(60):
        n, m = rng.randint(1, 4), rng.randint(1, 5)
        rows = random_system(rng, n, m)
        c = tuple(rng.randint(-2, 2) for _ in range(n))
        assert lp_feasible(rows, n) == fm_feasible(rows, n)
        a, b = lp_range(rows, c, n), fm_range(rows, c, n)
        if a is None or b is None:
            assert a is None and b is None
        else:
            assert tuple(None if v is None else Fraction(v) for v in a) == b


@pytest.mark.parametrize("seed", range(3))
def test_lp_bounds_contain_integer_points(seed):
    rng = random.Random(100 + seed)
    for _ in range(40):
        n, m = rng.randint(1, 3), rng.randint(1, 4)
        rows = random_system(rng, n, m) + [((1,) * n, 8)]  # keep it bounded
        c = tuple(rng.randint(-2, 2) for _ in range(n))
        g = grid_range(rows, c, n)
        r = lp_range(rows, c, n)
        if g is None:
            continue
        assert r is not None
        lo, hi = r
        assert lo <= g[0] and g[1] <= hi
