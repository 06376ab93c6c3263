import random
from fractions import Fraction as Q

import pytest
from scipy.optimize import linprog

from doubling._lp import linprog_max


def test_textbook_example():
    # max 3x + 2y  s.t.  x + y <= 4, x + 3y <= 6
    res = linprog_max([3, 2], [[1, 1], [1, 3]], [4, 6])
    assert res.status == "optimal"
    assert res.value == 12 and res.x == (4, 0)


def test_equality_and_infeasible():
    res = linprog_max([1, 1], A_eq=[[1, 2]], b_eq=[Q(1, 3)])
    assert res.value == Q(1, 3)
    assert linprog_max([1], [[1]], [-1]).status == "infeasible"


def test_unbounded():
    assert linprog_max([1, 0], [[-1, 1]], [1]).status == "unbounded"


def test_negative_rhs_rows():
    # x >= 2 written as -x <= -2
    res = linprog_max([-1], [[-1]], [-2])
    assert res.status == "optimal" and res.x == (2,)


@pytest.mark.parametrize("seed", range(40))
def test_matches_scipy(seed):
    rng = random.Random(seed)
    n, m = rng.randint(2, 5), rng.randint(1, 5)
    A = [[rng.randint(-3, 5) for _ in range(n)] for _ in range(m)]
    b = [rng.randint(0, 8) for _ in range(m)]
    # a box keeps the problem bounded
    A += [[1 if j == i else 0 for j in range(n)] for i in range(n)]
    b += [rng.randint(1, 6) for _ in range(n)]
    c = [rng.randint(-4, 6) for _ in range(n)]
    eq = rng.random() < 0.4
    A_eq, b_eq = ([[rng.randint(0, 2) for _ in range(n)]], [rng.randint(0, 4)]) if eq else ([], [])
    ours = linprog_max(c, A, b, A_eq, b_eq)
    ref = linprog([-v for v in c], A_ub=A, b_ub=b, A_eq=A_eq or None, b_eq=b_eq or None,
                  bounds=[(0, None)] * n, method="highs")
    if ref.status == 2:
        assert ours.status == "infeasible"
        return
    assert ours.status == "optimal"
    assert float(ours.value) == pytest.approx(-ref.fun, abs=1e-7)
    # the returned point is feasible, exactly
    for row, rhs in zip(A, b):
        assert sum(a * x for a, x in zip(row, ours.x)) <= rhs
    for row, rhs in zip(A_eq, b_eq):
        assert sum(a * x for a, x in zip(row, ours.x)) == rhs
    assert all(x >= 0 for x in ours.x)
