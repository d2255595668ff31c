"""Exact LP solver sanity checks against enumerated vertex oracles."""

import itertools
import random
from fractions import Fraction

import pytest

from orbitlab import linalg
from orbitlab.simplex import Infeasible, Unbounded, solve_lp


def F(n, d=1):
    return Fraction(n, d)


def vertex_oracle(c, a, b):
    """Enumerate all basic solutions of A x = b, x >= 0 and take the best.

    Independent of the pivoting path; only valid for small full-rank systems.
    """
    nrows, nvars = len(a), len(c)
    best = None
    for cols in itertools.combinations(range(nvars), min(nrows, nvars)):
        sub = [[a[i][j] for j in cols] for i in range(nrows)]
        if len(cols) != nrows or linalg.determinant(sub) == 0:
            continue
        x_basic = linalg.solve(sub, b)
        if any(v < 0 for v in x_basic):
            continue
        x = [Fraction(0)] * nvars
        for col, val in zip(cols, x_basic):
            x[col] = val
        value = sum(c[j] * x[j] for j in range(nvars))
        if best is None or value < best:
            best = value
    return best


def test_simple_assignment():
    # min x1 + x2  s.t.  x1 + x2 = 1
    res = solve_lp([F(1), F(1)], [[F(1), F(1)]], [F(1)])
    assert res.value == 1


def test_prefers_cheaper_route():
    # two ways to reach b, one twice as expensive
    res = solve_lp([F(1), F(2)], [[F(1), F(1)]], [F(1)])
    assert res.value == 1
    assert res.x == [F(1), F(0)]


def test_negative_rhs_is_normalized():
    res = solve_lp([F(1), F(1)], [[F(1), F(-1)]], [F(-2)])
    assert res.value == 2
    assert res.x == [F(0), F(2)]


def test_infeasible_detected():
    with pytest.raises(Infeasible):
        solve_lp([F(1)], [[F(1)], [F(1)]], [F(1), F(2)])


def test_unbounded_detected():
    # min -x1 with x1 - x2 = 0 lets both grow without bound
    with pytest.raises(Unbounded):
        solve_lp([F(-1), F(0)], [[F(1), F(-1)]], [F(0)])


def test_degenerate_ties_terminate():
    # many columns producing the same point; Bland must not cycle
    a = [[F(1), F(1), F(1), F(1)], [F(1), F(1), F(1), F(0)]]
    res = solve_lp([F(1), F(1), F(1), F(1)], a, [F(1), F(1)])
    assert res.value == 1


def test_matches_vertex_oracle_on_random_instances():
    rng = random.Random(29)
    checked = 0
    while checked < 40:
        nrows = rng.randint(1, 3)
        nvars = rng.randint(nrows, 5)
        a = [[F(rng.randint(-3, 3)) for _ in range(nvars)] for _ in range(nrows)]
        x_feas = [F(rng.randint(0, 3)) for _ in range(nvars)]
        b = [sum(a[i][j] * x_feas[j] for j in range(nvars)) for i in range(nrows)]
        c = [F(rng.randint(0, 4)) for _ in range(nvars)]
        expected = vertex_oracle(c, a, b)
        if expected is None:
            continue
        result = solve_lp(c, a, b)
        assert result.value == expected
        # returned point is feasible
        assert all(v >= 0 for v in result.x)
        for i in range(nrows):
            assert sum(a[i][j] * result.x[j] for j in range(nvars)) == b[i]
        checked += 1
