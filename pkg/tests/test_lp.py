import itertools
import random

import numpy as np
import pytest

from fstsp.lp import BoundedSimplex, LpStatus

FEAS = 1e-7


def enumerate_vertices(c, rows, lo, hi):
    """Independent oracle: evaluate the objective on every basic feasible
    point, formed by intersecting n active hyperplanes drawn from the rows
    (at equality) and the finite bounds."""
    n = len(c)
    planes = []
    for coeffs, _sense, rhs in rows:
        planes.append((np.array(coeffs, dtype=float), float(rhs)))
    for j in range(n):
        if np.isfinite(lo[j]):
            e = np.zeros(n)
            e[j] = 1.0
            planes.append((e, float(lo[j])))
        if np.isfinite(hi[j]):
            e = np.zeros(n)
            e[j] = 1.0
            planes.append((e, float(hi[j])))
    best = None
    for combo in itertools.combinations(range(len(planes)), n):
        A = np.array([planes[i][0] for i in combo])
        b = np.array([planes[i][1] for i in combo])
        if abs(np.linalg.det(A)) < 1e-9:
            continue
        x = np.linalg.solve(A, b)
        ok = True
        for coeffs, sense, rhs in rows:
            act = float(np.dot(coeffs, x))
            if sense == "<=" and act > rhs + 1e-7:
                ok = False
            elif sense == ">=" and act < rhs - 1e-7:
                ok = False
            elif sense == "=" and abs(act - rhs) > 1e-7:
                ok = False
        if ok and np.all(x >= lo - 1e-7) and np.all(x <= hi + 1e-7):
            val = float(np.dot(c, x))
            if best is None or val < best:
                best = val
    return best


def build_lp(c, rows, lo, hi):
    lp = BoundedSimplex(c, lo, hi)
    for coeffs, sense, rhs in rows:
        lp.add_row({i: v for i, v in enumerate(coeffs) if v != 0.0}, sense, rhs)
    return lp


def test_min_x_at_least_three():
    lp = build_lp([1.0], [([1.0], ">=", 3.0)], [0.0], [10.0])
    res = lp.solve()
    assert res.status is LpStatus.OPTIMAL
    assert res.objective == pytest.approx(3.0)
    assert res.x[0] == pytest.approx(3.0)


def test_two_var_vertex():
    # min -x - 2y st x + y <= 4, x <= 3, y <= 3, x,y >= 0
    c = [-1.0, -2.0]
    rows = [([1.0, 1.0], "<=", 4.0)]
    lo, hi = [0.0, 0.0], [3.0, 3.0]
    res = build_lp(c, rows, lo, hi).solve()
    oracle = enumerate_vertices(c, rows, np.array(lo), np.array(hi))
    assert res.status is LpStatus.OPTIMAL
    assert res.objective == pytest.approx(oracle)
    assert res.objective == pytest.approx(-7.0)  # x=1, y=3


def test_infeasible_detected():
    lp = build_lp([1.0], [([1.0], ">=", 5.0), ([1.0], "<=", 2.0)], [0.0], [10.0])
    assert lp.solve().status is LpStatus.INFEASIBLE


def test_equality_rows():
    c = [2.0, 1.0, 0.0]
    rows = [([1.0, 1.0, 1.0], "=", 5.0), ([1.0, -1.0, 0.0], "<=", 1.0)]
    lo, hi = [0.0, 0.0, 0.0], [4.0, 4.0, 4.0]
    res = build_lp(c, rows, lo, hi).solve()
    oracle = enumerate_vertices(c, rows, np.array(lo), np.array(hi))
    assert res.status is LpStatus.OPTIMAL and res.objective == pytest.approx(oracle)


def _random_lp(rng):
    n = rng.randint(2, 4)
    m = rng.randint(1, 4)
    c = [float(rng.randint(-5, 5)) for _ in range(n)]
    lo = np.array([float(rng.randint(-2, 0)) for _ in range(n)])
    hi = lo + np.array([float(rng.randint(1, 4)) for _ in range(n)])
    rows = []
    for _ in range(m):
        coeffs = [float(rng.randint(-4, 4)) for _ in range(n)]
        if all(v == 0 for v in coeffs):
            coeffs[rng.randrange(n)] = 1.0
        sense = rng.choice(["<=", ">=", "="])
        # anchor the rhs near an interior point so most LPs stay feasible
        mid = [(a + b) / 2 for a, b in zip(lo, hi)]
        rhs = float(np.dot(coeffs, mid) + rng.randint(-2, 2))
        rows.append((coeffs, sense, rhs))
    return c, rows, lo, hi


def test_random_lps_match_vertex_enumeration():
    rng = random.Random(2024)
    solved = 0
    for _trial in range(100):
        c, rows, lo, hi = _random_lp(rng)
        res = build_lp(c, rows, lo, hi).solve()
        oracle = enumerate_vertices(c, rows, lo, hi)
        if oracle is None:
            assert res.status is LpStatus.INFEASIBLE
        else:
            assert res.status is LpStatus.OPTIMAL
            assert res.objective == pytest.approx(oracle, abs=1e-7)
            solved += 1
    assert solved >= 60  # the generator must mostly produce feasible LPs


def test_primal_fallback_with_negative_cost_unbounded_above():
    # dual-infeasible start: negative cost on a var with no upper bound;
    # boundedness comes from the rows
    c = [-1.0, 1.0]
    rows = [([1.0, 1.0], "<=", 6.0), ([1.0, -1.0], "<=", 2.0)]
    lo = [0.0, 0.0]
    hi = [float("inf"), float("inf")]
    res = build_lp(c, rows, lo, hi).solve()
    assert res.status is LpStatus.OPTIMAL
    assert res.objective == pytest.approx(-2.0)  # the whole edge x - y = 2


def test_unbounded_detected():
    c = [-1.0]
    res = build_lp(c, [([1.0], ">=", 0.0)], [0.0], [float("inf")]).solve()
    assert res.status is LpStatus.UNBOUNDED


def test_free_variable_rejected():
    with pytest.raises(ValueError, match="free"):
        BoundedSimplex([1.0], [float("-inf")], [float("inf")])


def test_add_rows_never_decreases_minimum():
    rng = random.Random(5)
    for _trial in range(20):
        c, rows, lo, hi = _random_lp(rng)
        lp = build_lp(c, rows, lo, hi)
        res = lp.solve()
        if res.status is not LpStatus.OPTIMAL:
            continue
        before = res.objective
        coeffs = [float(rng.randint(-3, 3)) for _ in c]
        lp.add_row({i: v for i, v in enumerate(coeffs) if v}, "<=",
                   float(np.dot(coeffs, res.x) - 0.5))
        res2 = lp.solve()
        if res2.status is LpStatus.OPTIMAL:
            assert res2.objective >= before - 1e-7


def test_change_bounds_reversible():
    c = [-1.0, -2.0]
    rows = [([1.0, 1.0], "<=", 4.0)]
    lp = build_lp(c, rows, [0.0, 0.0], [3.0, 3.0])
    base = lp.solve().objective
    lp.set_bounds(1, 0.0, 0.0)
    fixed = lp.solve().objective
    assert fixed > base
    lp.set_bounds(1, 0.0, 3.0)
    assert lp.solve().objective == pytest.approx(base)
