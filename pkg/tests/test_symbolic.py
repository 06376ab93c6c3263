import itertools
from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from conftest import cylinder_sets
from doubling.core import DomainError, directed_distance
from doubling.measures import BernoulliWeights
from doubling.symbolic import (
    CylinderSet,
    PermutationSpec,
    ball,
    permutation_f3_check,
    permutation_preimage,
    predecessor,
    shift_preimage,
    strip_depth_distance,
)

C2 = lambda *ws: CylinderSet(2, ws)


def brute_predecessor(U: CylinderSet, depth: int) -> CylinderSet:
    """Union of doubled balls ``O(x, 2r)`` over all balls ``O(x, r) ⊆ U`` with ``|x| = depth``.

    Distances are ``2**-n``, so ``O(x, r)`` for ``r`` in ``(2**-(n+1), 2**-n]`` is
    the length-``n+1`` cylinder of ``x`` and ``O(x, 2r)`` the length-``n`` one.
    """
    out = []
    for x in itertools.product(range(U.k), repeat=depth):
        for n in range(depth):
            if U.issuperset(CylinderSet(U.k, [x[: n + 1]])):
                out.append(x[:n])
                break
    return CylinderSet(U.k, out)


def test_canonical_form():
    assert C2("00", "01") == C2("0")
    assert C2("0", "01") == C2("0")
    assert C2("0", "1").is_whole
    with pytest.raises(DomainError):
        C2("2")


def test_predecessor_examples():
    assert predecessor(C2("01")) == C2("0")
    assert predecessor(C2("0")).is_whole
    assert predecessor(C2("00", "01")).is_whole


@pytest.mark.parametrize("k", [2, 3])
def test_predecessor_matches_ball_enumeration(k):
    depth = 4 if k == 2 else 3
    words = [w for n in range(1, depth + 1) for w in itertools.product(range(k), repeat=n)]
    for combo in itertools.islice(itertools.combinations(words, 2), 400):
        U = CylinderSet(k, combo)
        assert predecessor(U) == brute_predecessor(U, depth + 1)


def test_ball_dictionary():
    # {y : δ(x, y) < r} for r in (2^-(n+1), 2^-n] is the length-(n+1) cylinder
    x = (0, 1, 1, 0, 1, 0)
    for n in range(4):
        expected = {
            y for y in itertools.product(range(2), repeat=6)
            if next((i for i in range(6) if y[i] != x[i]), 6) > n
        }
        assert ball(x, n, 2).expand(6) == frozenset(expected)


def test_strip_depth_examples():
    assert strip_depth_distance(C2("01"), CylinderSet.whole(2)) == 2
    assert strip_depth_distance(C2("01"), C2("01")) == 0
    assert strip_depth_distance(C2("0"), C2("1")) == 1


@given(cylinder_sets(), cylinder_sets())
def test_strip_depth_equals_engine(U, V):
    assert strip_depth_distance(U, V) == directed_distance(U, V).value


@given(cylinder_sets(k=3, max_depth=3), cylinder_sets(k=3, max_depth=3))
def test_strip_depth_equals_engine_ternary(U, V):
    assert strip_depth_distance(U, V) == directed_distance(U, V).value


def test_shift_preimage():
    assert shift_preimage(C2("0")) == C2("00", "10")
    assert shift_preimage(CylinderSet.whole(2)).is_whole


@given(st.lists(st.integers(0, 2), min_size=1, max_size=5))
def test_shift_preserves_bernoulli_mass(w):
    mu = BernoulliWeights((Q(1, 6), Q(1, 3), Q(1, 2)))
    U = CylinderSet(3, [tuple(w)])
    assert mu.measure(shift_preimage(U)) == mu.measure(U)


def test_permutation_preimage_examples():
    s = PermutationSpec.swap(1, 2)
    assert permutation_preimage(s, C2("01")) == C2("10")
    assert permutation_preimage(s, C2("0")) == C2("00", "10")
    ident = PermutationSpec()
    assert permutation_preimage(ident, C2("011", "10")) == C2("011", "10")


def test_permutation_preimage_by_enumeration():
    r = PermutationSpec.blocks([2, 3])
    for w in itertools.product(range(2), repeat=3):
        got = permutation_preimage(r, C2(w)).expand(5)
        want = {
            y for y in itertools.product(range(2), repeat=5)
            if all(y[r(n) - 1] == c for n, c in enumerate(w, start=1))
        }
        assert got == frozenset(want)


def test_permutation_spec_validation():
    with pytest.raises(DomainError):
        PermutationSpec(((1, 2),))
    with pytest.raises(DomainError):
        PermutationSpec(((0, 0),))
    r = PermutationSpec.blocks([3])
    assert [r(n) for n in range(1, 5)] == [3, 1, 2, 4]
    assert r.displacement() == 1
    assert r.inverse().displacement() == 2


def test_f3_identity_and_swap():
    assert permutation_f3_check(PermutationSpec(), 5).observed <= 1
    res = permutation_f3_check(PermutationSpec.swap(1, 2), 6)
    assert res.holds and res.K == 2


def test_f3_blocks_forward_passes_inverse_fails():
    r = PermutationSpec.blocks([2, 3, 4, 5])
    assert permutation_f3_check(r, 12, K=2).holds
    inv = permutation_f3_check(r.inverse(), 12, K=2)
    assert not inv.holds
    small, big, d = inv.witness
    assert d > 2 and big == small[:-1]
    # the failure peaks at block ends and grows with the block length
    peaks = [inv.per_depth[n] for n in (2, 5, 9)]
    assert peaks == sorted(peaks) and peaks[0] < peaks[-1]


@given(cylinder_sets(), cylinder_sets())
def test_sharp_bernoulli_inequality(U, V):
    mu = BernoulliWeights((Q(1, 3), Q(2, 3)))
    d = directed_distance(U, V).value
    assert mu.measure(U) >= Q(1, 3) ** d * mu.measure(V)
