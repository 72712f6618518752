"""Exact simplex unit tests, cross-checked against scipy on random LPs."""

import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from fisolve import lp


def test_known_maximum():
    # max 3x + 2y s.t. x + y <= 4, x + 3y <= 6
    res = lp.solve(2, [3, 2], [([1, 1], lp.LE, 4), ([1, 3], lp.LE, 6)])
    assert res.status == "optimal"
    assert res.value == 12
    assert res.x == [Fraction(4), Fraction(0)]


def test_equality_and_ge_mix():
    # max x + y s.t. x + y == 1, x >= 1/3  ->  value 1
    res = lp.solve(
        2, [1, 1], [([1, 1], lp.EQ, 1), ([1, 0], lp.GE, Fraction(1, 3))]
    )
    assert res.status == "optimal"
    assert res.value == 1
    assert res.x[0] >= Fraction(1, 3)
    assert res.x[0] + res.x[1] == 1


def test_infeasible():
    res = lp.solve(1, [1], [([1], lp.LE, 1), ([1], lp.GE, 2)])
    assert res.status == "infeasible"
    assert lp.feasible(1, [([1], lp.LE, 1), ([1], lp.GE, 2)]) is None


def test_unbounded():
    res = lp.solve(2, [1, 0], [([0, 1], lp.LE, 5)])
    assert res.status == "unbounded"


def test_negative_rhs_normalization():
    # -x <= -2 means x >= 2
    res = lp.solve(1, [-1], [([-1], lp.LE, -2)])
    assert res.status == "optimal"
    assert res.value == -2


def test_degenerate_vertex_terminates():
    """Multiple constraints through one vertex; Bland's rule must not cycle."""
    rows = [
        ([1, 1], lp.LE, 1),
        ([1, 0], lp.LE, 1),
        ([0, 1], lp.LE, 1),
        ([1, 1], lp.GE, 1),
    ]
    res = lp.solve(2, [1, 2], rows)
    assert res.status == "optimal"
    assert res.value == 2


def test_dict_coefficients():
    res = lp.solve(3, {1: 1}, [({0: 1, 1: 1, 2: 1}, lp.EQ, 1)])
    assert res.status == "optimal"
    assert res.value == 1


def test_exactness_no_rounding():
    # Optimum at x = 1/7, detectable only with exact arithmetic.
    res = lp.solve(1, [1], [([7], lp.LE, 1)])
    assert res.value == Fraction(1, 7)


def test_zero_objective_feasible_point():
    x = lp.feasible(2, [([1, 1], lp.EQ, 1), ([1, -1], lp.EQ, 0)])
    assert x == [Fraction(1, 2), Fraction(1, 2)]


@pytest.mark.parametrize("seed", range(30))
def test_random_cross_check_scipy(seed):
    """Random small LPs: status and optimal value must match scipy.linprog."""
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    m = rng.randint(1, 5)
    obj = [Fraction(rng.randint(-5, 5)) for _ in range(n)]
    rows = []
    for _ in range(m):
        coefs = [Fraction(rng.randint(-4, 4)) for _ in range(n)]
        op = rng.choice([lp.LE, lp.GE, lp.EQ])
        rhs = Fraction(rng.randint(-3, 6))
        rows.append((coefs, op, rhs))
    # Keep scipy away from unbounded warnings by boxing the variables.
    rows.append(([1] * n, lp.LE, 50))

    res = lp.solve(n, obj, rows)

    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for coefs, op, rhs in rows:
        cf = [float(c) for c in coefs]
        if op == lp.LE:
            a_ub.append(cf)
            b_ub.append(float(rhs))
        elif op == lp.GE:
            a_ub.append([-c for c in cf])
            b_ub.append(-float(rhs))
        else:
            a_eq.append(cf)
            b_eq.append(float(rhs))
    ref = linprog(
        [-float(c) for c in obj],
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=[(0, None)] * n,
        method="highs",
    )
    if res.status == "infeasible":
        assert not ref.success and ref.status == 2
    else:
        assert res.status == "optimal"
        assert ref.success
        assert abs(float(res.value) - (-ref.fun)) < 1e-7
