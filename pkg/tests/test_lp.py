"""Exact simplex kernel tests, including certificate re-verification."""

from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from sepcert.lp import (
    LPStatus,
    feasible_point,
    feasible_point_strict,
    solve,
)


def r(*vals):
    return tuple(F(v) for v in vals)


def test_simple_minimum_on_box():
    # min x + y on [0,1]^2 shifted: x >= 1/2, y >= -1/3
    le = [
        (r(-1, 0), F(-1, 2)),
        (r(0, -1), F(1, 3)),
        (r(1, 0), F(5)),
        (r(0, 1), F(5)),
    ]
    res = solve(r(1, 1), le)
    assert res.status is LPStatus.OPTIMAL
    assert res.x == (F(1, 2), F(-1, 3))
    assert res.value == F(1, 6)


def test_maximize_and_equality_rows():
    # max x subject to x + y = 1, x - y <= 1/3, -x <= 0
    res = solve(r(1, 0), [(r(1, -1), F(1, 3)), (r(-1, 0), F(0))],
                eq=[(r(1, 1), F(1))], maximize=True)
    assert res.status is LPStatus.OPTIMAL
    assert res.x == (F(2, 3), F(1, 3))
    assert res.value == F(2, 3)


def test_unbounded_with_ray():
    res = solve(r(-1,), [(r(-1,), F(0))])  # min -x, x >= 0
    assert res.status is LPStatus.UNBOUNDED
    assert res.ray is not None
    # Ray improves the objective: here the objective is min -x.
    assert res.ray[0] > 0


def test_infeasible_with_farkas():
    le = [(r(0, 1), F(0)), (r(0, -1), F(-1))]  # y <= 0 and y >= 1
    res = feasible_point(le)
    assert res.status is LPStatus.INFEASIBLE
    assert res.farkas.verify(tuple(le))
    assert res.farkas.le_multipliers == (F(1), F(1))


def test_infeasible_mixed_eq():
    le = [(r(1, 0), F(0))]
    eq = [(r(1, 0), F(2))]
    res = feasible_point(le, eq)
    assert res.status is LPStatus.INFEASIBLE
    assert res.farkas.verify(tuple(le), tuple(eq))


def test_degenerate_cycling_guard():
    # Classic degenerate instance; Bland's rule must terminate.
    le = [
        (r(F(1, 4), -8, -1, 9), F(0)),
        (r(F(1, 2), -12, F(-1, 2), 3), F(0)),
        (r(0, 0, 1, 0), F(1)),
    ]
    res = solve(r(F(-3, 4), 20, F(-1, 2), 6), le + [(r(-1, 0, 0, 0), F(0)),
                                                    (r(0, -1, 0, 0), F(0)),
                                                    (r(0, 0, -1, 0), F(0)),
                                                    (r(0, 0, 0, -1), F(0))])
    assert res.status is LPStatus.OPTIMAL
    assert res.value == F(-5, 4)


def test_strict_feasible_point():
    got = feasible_point_strict([(r(1, 0), F(1))], strict=[(r(0, 1), F(0))])
    assert got.feasible
    assert got.x[0] <= 1 and got.x[1] < 0


def test_strict_infeasible_boundary_only():
    # x <= 0, -x <= 0 pins x = 0, so x < 0 strictly is impossible.
    got = feasible_point_strict([(r(1,), F(0)), (r(-1,), F(0))], strict=[(r(1,), F(0))])
    assert not got.feasible
    assert got.certificate.verify([(r(1,), F(0)), (r(-1,), F(0))], (), [(r(1,), F(0))])


def test_strict_infeasible_closed_part():
    got = feasible_point_strict([(r(0, 1), F(0)), (r(0, -1), F(-1))],
                                strict=[(r(1, 0), F(5))])
    assert not got.feasible
    assert got.certificate.verify([(r(0, 1), F(0)), (r(0, -1), F(-1))], (),
                                  [(r(1, 0), F(5))])


@pytest.mark.parametrize("seed", range(8))
def test_random_against_scipy(seed):
    scipy = pytest.importorskip("scipy.optimize")
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    m = rng.randint(2, 6)
    le = []
    for _ in range(m):
        coeffs = tuple(F(rng.randint(-4, 4)) for _ in range(n))
        le.append((coeffs, F(rng.randint(-3, 6))))
    # Bounded box keeps scipy and the exact solver comparable.
    for k in range(n):
        e = [F(0)] * n
        e[k] = F(1)
        le.append((tuple(e), F(10)))
        e2 = [F(0)] * n
        e2[k] = F(-1)
        le.append((tuple(e2), F(10)))
    c = tuple(F(rng.randint(-3, 3)) for _ in range(n))
    res = solve(c, le)
    sp = scipy.linprog(
        [float(v) for v in c],
        A_ub=[[float(a) for a in row] for row, _ in le],
        b_ub=[float(b) for _, b in le],
        bounds=[(None, None)] * n,
        method="highs",
    )
    if res.status is LPStatus.OPTIMAL:
        assert sp.status == 0
        assert abs(float(res.value) - sp.fun) < 1e-7
        for coeffs, b in le:
            assert sum(a * x for a, x in zip(coeffs, res.x)) <= b
    else:
        assert res.status is LPStatus.INFEASIBLE
        assert sp.status == 2
        assert res.farkas.verify(tuple(le))
