from fractions import Fraction as Q

import pytest
from hypothesis import given

from conftest import cylinder_sets, interval_sets
from doubling.core import (
    INFINITE,
    DomainError,
    RepresentationError,
    SimilarityMap,
    ceil_log2,
    cutoff_bound,
    directed_distance,
    doubling_distance,
    iterate_predecessor,
)
from doubling.realline import IntervalSet, minus
from doubling.symbolic import CylinderSet

I = IntervalSet.interval


def test_iterate_predecessor_examples():
    assert iterate_predecessor(I(0, 2), 1) == I(-1, 3)
    assert iterate_predecessor(I(0, 2), 0) == I(0, 2)
    assert iterate_predecessor(IntervalSet([(0, 1), (1, 2)]), 1) == I(Q(-1, 2), Q(5, 2))


def test_iterate_predecessor_rejects_bad_input():
    with pytest.raises(DomainError):
        iterate_predecessor(I(0, 1), -1)
    with pytest.raises(RepresentationError):
        iterate_predecessor(frozenset({1}), 1)


def test_directed_distance_examples():
    r = directed_distance(I(0, 1), I(0, 2))
    assert r.value == 2
    # chain certificate: the last snapshot contains V, the one before does not
    assert r.witness_chain[-1].issuperset(I(0, 2))
    assert not r.witness_chain[-2].issuperset(I(0, 2))
    assert directed_distance(I(0, 1), I(0, 1)).value == 0


def test_directed_distance_punctured_interval():
    U = IntervalSet.punctured(-1, 1, [Q(k, 8) for k in range(-7, 8)])
    assert directed_distance(U, I(-2, 2)).value == 2


def test_directed_distance_empty_source():
    with pytest.raises(DomainError):
        directed_distance(IntervalSet(), I(0, 1))


def test_empty_target_is_distance_zero():
    assert directed_distance(I(0, 1), IntervalSet()).value == 0


def test_doubling_distance_examples():
    assert doubling_distance(I(0, 1), I(0, 2)).value == 2
    assert doubling_distance(I(0, 1), I(0, 1)).value == 0
    tower = I(0, 4)
    for _ in range(3):
        tower = minus(tower, 3)
    # truncation collapses the distance from below; the symbolic tower gives 3
    assert doubling_distance(tower, I(0, 4)).value <= 3


def test_cutoff_bound_examples():
    assert cutoff_bound(I(0, 1), I(0, 2)) == 3
    assert cutoff_bound(I(0, 1), I(0, 1)) == 1
    U, V = CylinderSet(2, ["01"]), CylinderSet.whole(2)
    assert directed_distance(U, V).value == 2 <= cutoff_bound(U, V)


def test_ceil_log2():
    assert [ceil_log2(Q(v)) for v in (1, 2, 3, 4, 5)] == [0, 1, 2, 2, 3]
    assert ceil_log2(Q(1, 2)) == 0


@given(interval_sets(), interval_sets())
def test_cutoff_is_never_reached_on_bounded_sets(U, V):
    r = directed_distance(U, V)
    assert r.value != INFINITE
    assert r.value <= r.cutoff_used


@given(interval_sets(), interval_sets(), interval_sets())
def test_triangle_inequality_realline(U, V, W):
    d = lambda A, B: directed_distance(A, B, keep_chain=False).value
    assert d(U, W) <= d(U, V) + d(V, W)


@given(cylinder_sets(), cylinder_sets(), cylinder_sets())
def test_triangle_inequality_symbolic(U, V, W):
    d = lambda A, B: directed_distance(A, B, keep_chain=False).value
    assert d(U, W) <= d(U, V) + d(V, W)


@given(interval_sets(), interval_sets())
def test_monotonicity(U, W):
    big = U | W
    assert big.predecessor().issuperset(U.predecessor())


@given(interval_sets(max_components=2), interval_sets(max_components=2),
       interval_sets(max_components=2), interval_sets(max_components=2))
def test_union_bound(U1, V1, U2, V2):
    d = lambda A, B: directed_distance(A, B, keep_chain=False).value
    assert d(U1 | U2, V1 | V2) <= max(d(U1, V1), d(U2, V2))


def test_similarity_distortion_constant():
    assert SimilarityMap(Q(3)).distortion_constant() == 1
    assert SimilarityMap(Q(1), K1=Q(1), K2=Q(2)).distortion_constant() == 2
    assert SimilarityMap(Q(1), K1=Q(1), K2=Q(5)).distortion_constant() == 4
    with pytest.raises(DomainError):
        SimilarityMap(Q(0))
    with pytest.raises(DomainError):
        SimilarityMap(Q(1), K1=Q(2), K2=Q(1))


def test_similarity_map_applies_to_sets():
    f = SimilarityMap(Q(2), Q(3))
    assert f(I(0, 1)) == I(3, 5)
