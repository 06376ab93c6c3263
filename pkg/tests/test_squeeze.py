from fractions import Fraction as Q

import pytest

from doubling.core import DomainError, RepresentationError, directed_distance, iterate_predecessor
from doubling.finite import discrete_space, line
from doubling.measures import PiecewiseDensity, PointWeights, doubling_constant
from doubling.realline import IntervalSet, minus
from doubling.squeeze import (
    K_constant,
    admissibility_threshold,
    build_measure,
    build_schedule,
    certify,
    mass_preservation,
    simple_approx_bound,
    squeeze,
)

I = IntervalSet.interval
LEB = PiecewiseDensity.lebesgue()
GEO = line([0, 1, 8, 64, 512, 4096])


def uniform(sp):
    return PointWeights(sp, (1,) * sp.n)


def test_realline_schedule_example():
    s = build_schedule(IntervalSet([(0, 1), (2, 3)]), 1)
    assert s.W(1) == IntervalSet([(Q(-1, 2), Q(3, 2)), (Q(3, 2), Q(7, 2))])
    assert s.levels[1].n == 2
    assert s.provenance == "realline-trivial"


def test_realline_schedule_is_iterated_predecessor():
    U = IntervalSet([(0, 1), (5, 6)])
    s = build_schedule(U, 4)
    for m in range(5):
        assert s.W(m) == iterate_predecessor(U, m)
    assert [lv.n for lv in s.levels] == [2, 2, 2, 1, 1]


@pytest.mark.parametrize("points", [[0, 1, 8, 64], [0, 1, 9, 81, 729], GEO.labels, [0, 1, 3, 4, 20]])
def test_finite_schedule_certificates(points):
    sp = line(points)
    for p in range(sp.n):
        s = build_schedule(sp.subset([p]), 6)  # extend() certifies P1-P4 at each step
        ns = [lv.n for lv in s.levels]
        assert all(a >= b for a, b in zip(ns, ns[1:]))
        assert s.provenance == "finite-constructed"


def test_K_constant_single_interval():
    s = build_schedule(I(0, 1), 1)
    # W_1 = (-1/2, 3/2) is one piece; the part outside W_0 has length 1
    assert K_constant(LEB, s, 1) == 2
    assert K_constant(LEB, s, 0) == 1
    with pytest.raises(DomainError):
        K_constant(LEB, s, 5)


def test_measure_identities_realline():
    s = build_schedule(I(0, 1), 4)
    thr = admissibility_threshold(LEB, s, 3)
    for f in (Q(1, 2), Q(1, 4)):
        msr = build_measure(LEB, s, thr * f, 3)
        assert msr.measure.measure(I(0, 1)) == (thr * f) ** 3
        assert mass_preservation(msr)
        assert msr.K == K_constant(LEB, s, 3)


def test_measure_identities_finite():
    lam = PointWeights(GEO, (1, 2, 1, 3, 1, 1))
    s = build_schedule(GEO.subset([0]), 2)
    thr = admissibility_threshold(lam, s, 1)
    msr = build_measure(lam, s, thr / 2, 1)
    assert msr.measure.measure(GEO.subset([0])) == thr / 2 * 1
    assert mass_preservation(msr)
    assert doubling_constant(msr.measure).value <= (thr / 2) ** -6


def test_M_zero_leaves_base_measure():
    s = build_schedule(I(0, 1), 1)
    assert build_measure(LEB, s, Q(1, 2), 0).measure == LEB
    sp = discrete_space(3)
    lam = PointWeights(sp, (1, 2, 3))
    assert build_measure(lam, build_schedule(sp.subset([0]), 1), Q(1, 3), 0).measure == lam


def test_inadmissible_eps_is_rejected():
    s = build_schedule(I(0, 1), 3)
    thr = admissibility_threshold(LEB, s, 2)
    with pytest.raises(DomainError, match="threshold"):
        build_measure(LEB, s, thr, 2)
    with pytest.raises(DomainError):
        build_measure(LEB, s, Q(3, 2), 0)


def test_K_is_eps_independent():
    s = build_schedule(IntervalSet([(0, 1), (3, 4)]), 3)
    thr = admissibility_threshold(LEB, s, 2)
    Ks = {build_measure(LEB, s, thr * f, 2).K for f in (Q(1, 2), Q(1, 4), Q(1, 8))}
    assert len(Ks) == 1


def test_certify_schedule_depth_error():
    s = build_schedule(I(0, 1), 2)
    msr = build_measure(LEB, s, Q(1, 2), 0)
    # W_1 = (-1/2, 3/2) already holds V, so M = 0 is not minimal
    with pytest.raises(DomainError, match="schedule-depth"):
        certify(msr, I(Q(-1, 4), Q(5, 4)))
    assert certify(msr, I(0, 2)).ok


@pytest.mark.parametrize("U,V", [
    (I(0, 1), I(0, 64)),
    (IntervalSet([(0, 1), (2, 3)]), I(-20, 20)),
    (I(0, 1), I(0, 16)),
])
def test_realline_pipeline(U, V):
    _s, M, reps = squeeze(U, V, LEB)
    assert M >= 1
    ts = [r.t_eps for r in reps]
    for r in reps:
        assert r.ok and r.ratio <= r.ratio_bound and r.d_bound_ok
    gaps = [abs(t - M / 6) for t in ts]
    assert gaps == sorted(gaps, reverse=True)
    assert ts[-1] >= M / 6 - 0.25


def test_finite_pipeline_geometric_line():
    lam = uniform(GEO)
    _s, M, reps = squeeze(GEO.subset([0]), GEO.whole(), lam)
    assert M == 1
    for r in reps:
        assert r.ok and r.doubling_ok and r.C_mu <= r.eps**-6
        d = directed_distance(GEO.subset([0]), GEO.whole()).value
        assert d <= 4 * (M + 2)


def test_finite_pipeline_two_points_is_trivial():
    two = discrete_space(2)
    _s, M, reps = squeeze(two.subset([0]), two.whole(), uniform(two))
    assert M is None and reps[0].trivial and reps[0].ok


def test_schedule_rejects_other_backends():
    from doubling.symbolic import CylinderSet
    with pytest.raises(RepresentationError):
        build_schedule(CylinderSet(2, ["0"]), 1)


def test_simple_approx_bound():
    assert simple_approx_bound(IntervalSet([(0, 1), (2, 3)]), 2) == 0
    tower = minus(minus(I(0, 4), 2), 2)
    bounds = [simple_approx_bound(tower, N) for N in range(1, 8)]
    assert bounds == sorted(bounds, reverse=True)
    assert bounds[0] <= 4
    with pytest.raises(DomainError):
        simple_approx_bound(tower, 0)
