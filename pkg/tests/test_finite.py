import itertools
import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from conftest import random_space
from doubling.core import DomainError, ResourceError, directed_distance
from doubling.finite import (
    FiniteSpace,
    brute_predecessor,
    discrete_space,
    doubling_constant,
    f3_concentric_check,
    game_solve,
    line,
    mass,
    predecessor,
    sup_product,
    x_space,
    y_space,
)

L3 = line([0, 1, 2])


def dense_radii(space: FiniteSpace, step=Q(1, 16)):
    top = 2 * space.diameter + 1
    r, out = step, []
    while r <= top:
        out.append(r)
        r += step
    return out


def test_validation():
    with pytest.raises(DomainError):
        FiniteSpace([[0, 1], [2, 0]])
    with pytest.raises(DomainError):
        FiniteSpace([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(DomainError):
        FiniteSpace([[0, 0], [0, 0]])
    with pytest.raises(DomainError):
        L3.open_ball(0, 0)
    with pytest.raises(DomainError):
        FiniteSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]], ultrametric=True)
    assert FiniteSpace([[0, 1, 2], [1, 0, 2], [2, 2, 0]], ultrametric=True).is_ultrametric()


def test_open_ball_examples():
    assert set(L3.open_ball(0, 1)) == {0}
    assert set(L3.open_ball(0, Q(3, 2))) == {0, 1}
    assert L3.open_ball(1, 10) == L3.whole()


def test_predecessor_examples():
    assert set(predecessor(L3.subset([0]))) == {0, 1}
    assert predecessor(L3.whole()) == L3.whole()
    two = discrete_space(2)
    assert predecessor(two.subset([0])) == two.whole()
    with pytest.raises(DomainError):
        predecessor(L3.empty())


@pytest.mark.parametrize("seed", range(6))
def test_predecessor_matches_dense_radius_scan(seed):
    rng = random.Random(seed)
    sp = random_space(rng, 5, menu=(1, 2, 3, 4))
    radii = dense_radii(sp, Q(1, 8))
    for U in sp.all_subsets():
        P = predecessor(U)
        assert P == brute_predecessor(U, radii)
        assert P.issuperset(U)


def test_predecessor_monotone():
    sp = random_space(random.Random(7), 5)
    subsets = list(sp.all_subsets())
    for A, B in itertools.product(subsets, repeat=2):
        if B.issuperset(A):
            assert predecessor(B).issuperset(predecessor(A))


def test_game_examples():
    U = L3.subset([0])
    assert game_solve(U, 0, 0)
    assert not game_solve(U, 1, 0)
    assert game_solve(U, 1, 1)
    assert not game_solve(U, 2, 1)
    assert game_solve(U, 2, 2)
    with pytest.raises(DomainError):
        game_solve(U, 0, -1)
    with pytest.raises(ResourceError):
        game_solve(U, 0, 13)


@pytest.mark.parametrize("seed", range(4))
def test_game_matches_iterated_predecessor(seed):
    sp = random_space(random.Random(seed), 4, menu=(1, 2, 5))
    for U in sp.all_subsets():
        P = U
        for n in range(4):
            for y in range(sp.n):
                assert game_solve(U, y, n) == (y in P)
            P = predecessor(P)


def test_doubling_constant_examples():
    two = discrete_space(2)
    assert doubling_constant(two, [1, 1]) == 2
    assert doubling_constant(two, [1, 3]) == 4
    assert doubling_constant(discrete_space(1), [5]) == 1
    with pytest.raises(DomainError):
        doubling_constant(two, [1, 0])


@given(st.lists(st.integers(1, 9), min_size=4, max_size=4), st.integers(1, 7))
def test_doubling_constant_scale_invariant(ws, c):
    sp = line([0, 1, 3, 7])
    assert doubling_constant(sp, ws) == doubling_constant(sp, [c * w for w in ws])


@pytest.mark.parametrize("seed", range(3))
def test_doubling_constant_matches_radius_scan(seed):
    rng = random.Random(seed)
    sp = random_space(rng, 5, menu=(1, 2, 3))
    w = [Q(rng.randint(1, 9)) for _ in range(sp.n)]
    scan = max(
        mass(w, sp.open_ball(x, 2 * r)) / mass(w, sp.open_ball(x, r))
        for x in range(sp.n)
        for r in dense_radii(sp)
    )
    assert doubling_constant(sp, w) == scan


@pytest.mark.parametrize("seed", range(3))
def test_comparison_inequality_exhaustive(seed):
    rng = random.Random(100 + seed)
    sp = random_space(rng, 5, menu=(1, 2, 3))
    w = [Q(rng.randint(1, 6)) for _ in range(sp.n)]
    C = doubling_constant(sp, w)
    for U, V in itertools.product(list(sp.all_subsets()), repeat=2):
        d = directed_distance(U, V, keep_chain=False).value
        assert mass(w, U) >= C ** (-3 * d) * mass(w, V)


def test_f3_identity_and_projection():
    sp = line([0, 1, 3])
    assert f3_concentric_check(list(range(sp.n)), sp, sp, 1).holds
    P, proj = sup_product(line([0, 1, 3]), line([0, 2, 3]))
    rep = f3_concentric_check(proj, P, line([0, 2, 3]), 1)
    assert rep.holds and rep.observed <= 1
    with pytest.raises(DomainError):
        f3_concentric_check([0, 0, 0], sp, sp, 1)


def test_fixture_spaces():
    Y = y_space(8)
    X = x_space(8)
    for p in range(Y.n):
        s = Y.subset([p])
        assert directed_distance(s, Y.whole()).value == 2
    for p in range(X.n):
        assert directed_distance(X.subset([p]), X.whole()).value == 1
    rng = random.Random(3)
    for _ in range(40):
        A = X.subset(rng.sample(range(X.n), rng.randint(1, 5)))
        B = X.subset(rng.sample(range(X.n), rng.randint(1, 5)))
        assert directed_distance(A, B).value <= 1
        A = Y.subset(rng.sample(range(Y.n), rng.randint(1, 5)))
        B = Y.subset(rng.sample(range(Y.n), rng.randint(1, 5)))
        assert directed_distance(A, B).value <= 2
