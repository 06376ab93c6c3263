"""Squeeze schedules and squeeze measures.

A schedule is a sequence ``U = W_0 ⊆ W_1 ⊆ ...`` of simple open sets with
finite partitions ``S_m`` such that

* P1: every piece sits in a ball inside ``W_m``;
* P2: ``(W_m)_* ⊆ W_{m+1} ⊆ (W_m)_*^4``;
* P3: every old piece lies in a new piece and every new piece contains an old one;
* P4: every new piece has interior outside ``W_m``.

On the line ``W_m = U_*^m`` with components as pieces already works. On
finite spaces the general construction runs step by step (largest enclosing
balls, escape points, tripled-plus-one balls of radius ``7 r``).

A squeeze measure multiplies a base measure ``λ`` by ``ε`` on ``W_m`` at
step ``m+1`` while keeping the mass of every piece of ``S_{m+1}``. After
``M`` steps ``μ(U) = ε^M λ(U)`` while ``μ`` stays ``ε^{-6}``-doubling.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    CertificateError,
    DomainError,
    RepresentationError,
    ResourceError,
    directed_distance,
    doubling_distance,
    iterate_predecessor,
)
from .finite import FiniteSpace, PointSet
from .measures import (
    PiecewiseDensity,
    PointWeights,
    doubling_constant,
    sharp_exponent,
)
from .realline import IntervalSet

MAX_COVER_BALLS = 20


@dataclass(frozen=True)
class Level:
    W: object
    pieces: tuple
    balls: tuple  # one (centre, radius) per piece: piece ⊆ O(centre, radius) ⊆ W
    groups: tuple = ()  # I_k: indices of previous pieces merged into piece k
    internals: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.pieces)


@dataclass
class SqueezeSchedule:
    U: object
    levels: list
    provenance: str  # realline-trivial | finite-constructed
    saturated: bool = False  # W reached the whole space; no further levels

    def W(self, m: int):
        return self.levels[m].W

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def extend(self, upto: int) -> "SqueezeSchedule":
        while self.depth < upto and not self.saturated:
            nxt = _next_level(self)
            if nxt is None:
                self.saturated = True
            else:
                self.levels.append(nxt)
                certify_step(self, self.depth)
        return self


# -- construction ------------------------------------------------------------


def _ball(U, centre, radius):
    if isinstance(U, PointSet):
        return U.space.open_ball(centre, radius)
    return IntervalSet.interval(centre - radius, centre + radius)


def _minimal_ball_cover(U: PointSet):
    """Fewest open balls with union ``U`` (exhaustive), in a deterministic order."""
    sp = U.space
    balls = {}
    for x in range(sp.n):
        bs = sp.levels[x]
        for i, m in enumerate(sp.closed[x]):
            if m & ~U.mask == 0:
                r = bs[i + 1] if i + 1 < len(bs) else bs[i] + 1
                balls.setdefault(m, (x, r))
    if len(balls) > MAX_COVER_BALLS:
        raise ResourceError("cover-size", f"{len(balls)} candidate balls")
    items = sorted(balls.items(), key=lambda kv: (-bin(kv[0]).count("1"), kv[0]))
    for size in range(1, len(items) + 1):
        for combo in itertools.combinations(items, size):
            union = 0
            for m, _ in combo:
                union |= m
            if union == U.mask:
                return list(combo)
    raise CertificateError("U is not a union of balls", U)


def _level_zero(U) -> Level:
    if isinstance(U, IntervalSet):
        pieces = tuple(IntervalSet([c]) for c in U.components)
        balls = tuple(((a + b) / 2, (b - a) / 2) for a, b in U.components)
        return Level(U, pieces, balls)
    cover = _minimal_ball_cover(U)
    pieces, seen = [], 0
    for m, _ in cover:
        pieces.append(PointSet(U.space, m & ~seen))
        seen |= m
    return Level(U, tuple(pieces), tuple(b for _, b in cover))


def build_schedule(U, M: int) -> SqueezeSchedule:
    """Levels ``W_0..W_M`` (fewer if ``W`` fills a finite space first)."""
    if U.is_empty:
        raise DomainError("schedule needs a non-empty set")
    if isinstance(U, IntervalSet):
        prov = "realline-trivial"
    elif isinstance(U, PointSet):
        prov = "finite-constructed"
    else:
        raise RepresentationError(f"no schedule for {type(U).__name__}")
    sched = SqueezeSchedule(U, [_level_zero(U)], prov)
    certify_p1(sched.levels[0])
    return sched.extend(M)


def _next_level(sched: SqueezeSchedule):
    prev = sched.levels[-1]
    if isinstance(prev.W, IntervalSet):
        W = prev.W.predecessor()
        pieces = tuple(IntervalSet([c]) for c in W.components)
        groups = tuple(
            tuple(i for i, S in enumerate(prev.pieces) if P.issuperset(S)) for P in pieces
        )
        balls = tuple(((a + b) / 2, (b - a) / 2) for a, b in W.components)
        return Level(W, pieces, balls, groups)
    return _finite_step(prev)


def _finite_step(prev: Level):
    W = prev.W
    sp: FiniteSpace = W.space
    if W.mask == sp.full_mask:
        return None
    Wstar = W.predecessor()
    D = sp.dist
    if Wstar.mask == sp.full_mask:
        # one piece: the whole space, a ball of radius diam + 1
        return Level(
            sp.whole(),
            (sp.whole(),),
            ((0, sp.diameter + 1),),
            (tuple(range(prev.n)),),
            {"saturating": True},
        )
    outside = [z for z in range(sp.n) if z not in Wstar]
    rho, xs, ys = [], [], []
    for S in prev.pieces:
        best = None
        for x in range(sp.n):
            t = min(D[x][z] for z in outside)  # O(x, r) ⊆ W_* iff r <= t
            if max(D[x][s] for s in S) < t and (best is None or t > best[1]):
                best = (x, t)
        if best is None:
            raise CertificateError("no ball between piece and (W_m)_*", sorted(S))
        x, r = best
        rho.append(r)
        xs.append(x)
        y = next(
            (z for z in range(sp.n) if D[x][z] <= 2 * r and z not in W), None
        )
        if y is None:
            raise CertificateError("no escape point outside W_m", (x, r))
        ys.append(y)
    rs = rho  # r_i = ρ_i is attained on a finite space and exceeds ρ_i / 2
    zs = list(dict.fromkeys(ys))
    groups = [tuple(i for i, y in enumerate(ys) if y == z) for z in zs]
    lead = [max(I, key=lambda i: (rs[i], -i)) for I in groups]
    bigs = [sp.open_ball(xs[i], 7 * rs[i]) for i in lead]
    Wn = sp.empty()
    for B in bigs:
        Wn = Wn | B
    delta = sp.min_separation  # O(z, δ) = {z}
    small = [sp.open_ball(z, delta) for z in zs]
    for z, B, O in zip(zs, bigs, small):
        if not (O.issubset(B) and not (O & W).mask):
            raise CertificateError("separation radius conditions fail", z)
    Sp = []
    for I, O in zip(groups, small):
        P = O
        for i in I:
            P = P | prev.pieces[i]
        Sp.append(P)
    Sall = sp.empty()
    for P in Sp:
        Sall = Sall | P
    pieces, covered = [], sp.empty()
    for P, B in zip(Sp, bigs):
        Dk = B - covered
        covered = covered | B
        pieces.append(P | (Dk - Sall))
    internals = {
        "rho": tuple(rho), "x": tuple(xs), "r": tuple(rs), "y": tuple(ys),
        "z": tuple(zs), "I": tuple(groups), "i_k": tuple(lead), "delta": delta,
    }
    balls = tuple((xs[i], 7 * rs[i]) for i in lead)
    return Level(Wn, tuple(pieces), balls, tuple(groups), internals)


# -- certificates --------------------------------------------------------------


def _union(pieces, like):
    out = None
    for P in pieces:
        out = P if out is None else out | P
    return out


def _disjoint(A, B) -> bool:
    if isinstance(A, PointSet):
        return not (A & B).mask
    return (A & B).is_empty


def certify_p1(level: Level):
    for P, (c, r) in zip(level.pieces, level.balls):
        if P.is_empty:
            raise CertificateError("empty piece", P)
        O = _ball(level.W, c, r)
        if not (O.issuperset(P) and level.W.issuperset(O)):
            raise CertificateError("P1 fails", (P, c, r))
    for A, B in itertools.combinations(level.pieces, 2):
        if not _disjoint(A, B):
            raise CertificateError("pieces overlap", (A, B))
    if _union(level.pieces, level.W) != level.W:
        raise CertificateError("pieces do not cover W", level.W)


def certify_step(sched: SqueezeSchedule, m: int):
    """Check P1 at level ``m`` and P2-P4 between levels ``m-1`` and ``m``."""
    prev, cur = sched.levels[m - 1], sched.levels[m]
    certify_p1(cur)
    star = prev.W.predecessor()
    if not (cur.W.issuperset(star) and iterate_predecessor(prev.W, 4).issuperset(cur.W)):
        raise CertificateError("P2 fails", m)
    for S in prev.pieces:
        if not any(P.issuperset(S) for P in cur.pieces):
            raise CertificateError("P3 fails: old piece not absorbed", (m, S))
    for P in cur.pieces:
        if not any(P.issuperset(S) for S in prev.pieces):
            raise CertificateError("P3 fails: new piece without an old one", (m, P))
        if (P - prev.W).is_empty:
            raise CertificateError("P4 fails", (m, P))
    if cur.n > prev.n:
        raise CertificateError("piece count grew", m)


# -- measures -------------------------------------------------------------------


def _measure(lam, S):
    return lam.measure(S)


def K_constant(lam, sched: SqueezeSchedule, M: int) -> Fraction:
    """``max λ(S)/λ(S ∖ W_m)`` over ``m < M`` and ``S ∈ S_{m+1}``; 1 when ``M = 0``."""
    if M > sched.depth:
        raise DomainError(f"schedule has only {sched.depth} levels")
    K = Fraction(1)
    for m in range(M):
        W = sched.W(m)
        for S in sched.levels[m + 1].pieces:
            den = _measure(lam, S - W)
            if den == 0:
                raise CertificateError("piece has no mass outside W_m", (m, S))
            K = max(K, _measure(lam, S) / den)
    return K


def admissibility_threshold(lam, sched, M) -> Fraction:
    C = doubling_constant(lam).value
    K = K_constant(lam, sched, M)
    return 1 / (C**4 * K**5)


@dataclass
class SqueezeMeasure:
    base: object
    schedule: SqueezeSchedule
    eps: Fraction
    M: int
    K: Fraction
    threshold: Fraction
    measure: object  # PiecewiseDensity or PointWeights
    factors: tuple  # per step: tuple of (piece, balancing value)


def _step_factor(lam, sched, m, eps):
    """Pieces of ``S_{m+1}`` with the balancing value on ``S ∖ W_m``."""
    W = sched.W(m)
    out = []
    for S in sched.levels[m + 1].pieces:
        J = S & W
        out.append((S, (_measure(lam, S) - eps * _measure(lam, J)) / _measure(lam, S - W)))
    return tuple(out)


def build_measure(lam, sched: SqueezeSchedule, eps, M: int) -> SqueezeMeasure:
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise DomainError("ε must lie in (0, 1)")
    if M > sched.depth:
        raise DomainError(f"schedule has only {sched.depth} levels, need {M}")
    thr = admissibility_threshold(lam, sched, M) if M else Fraction(1)
    if M and not eps < thr:
        raise DomainError(f"ε = {eps} is not below the admissibility threshold C^-4 K^-5 = {thr}")
    K = K_constant(lam, sched, M)
    steps = [_step_factor(lam, sched, m, eps) for m in range(M)]

    def density_factor(contains):
        f = Fraction(1)
        for m, step in enumerate(steps):
            if contains(sched.W(m)):
                f *= eps
            else:
                for S, v in step:
                    if contains(S):
                        f *= v
                        break
        return f

    if isinstance(lam, PiecewiseDensity):
        breaks = set(lam.breaks)
        for m in range(M + 1):
            for a, b in sched.W(m).components:
                breaks.update((a, b))
        mu = PiecewiseDensity.from_function(
            breaks,
            lambda x: lam.density_at(x) * density_factor(lambda A: A.contains_point(x)),
            lam.outside,
        )
    elif isinstance(lam, PointWeights):
        w = tuple(
            lam.w[p] * density_factor(lambda A: p in A) for p in range(lam.space.n)
        )
        mu = PointWeights(lam.space, w)
    else:
        raise RepresentationError("squeeze measures need a piecewise density or point weights")
    return SqueezeMeasure(lam, sched, eps, M, K, thr, mu, tuple(steps))


def mass_preservation(msr: SqueezeMeasure) -> bool:
    """``μ(S) = λ(S)`` on pieces of ``S_M`` and ``μ = λ`` off ``W_M``."""
    lam, mu, M = msr.base, msr.measure, msr.M
    WM = msr.schedule.W(M)
    if any(mu.measure(S) != lam.measure(S) for S in msr.schedule.levels[M].pieces):
        return False
    if isinstance(mu, PointWeights):
        return all(mu.w[p] == lam.w[p] for p in range(mu.space.n) if p not in WM)
    # compare densities on every cell outside W_M
    pts = sorted(set(mu.breaks) | set(lam.breaks))
    probes = [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    if pts:
        probes += [pts[0] - 1, pts[-1] + 1]
    return all(
        mu.density_at(x) == lam.density_at(x) for x in probes if not WM.contains_point(x)
    ) and mu.outside == lam.outside


# -- certification ----------------------------------------------------------------


@dataclass
class SqueezeReport:
    trivial: bool
    M: int | None
    d_forward: int
    d_bound_ok: bool
    eps: Fraction | None = None
    threshold: Fraction | None = None
    K: Fraction | None = None
    C_mu: Fraction | None = None
    doubling_ok: bool | None = None
    ratio: Fraction | None = None
    ratio_bound: Fraction | None = None
    ratio_ok: bool | None = None
    t_eps: float | None = None
    t_exact: float | None = None
    t_consistent: bool | None = None
    preserved: bool | None = None
    u_identity: bool | None = None
    provenance: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        if self.trivial:
            return self.d_bound_ok
        return all(
            (self.d_bound_ok, self.doubling_ok, self.ratio_ok, self.t_consistent,
             self.preserved, self.u_identity)
        )


def t_of_eps(M: int, lam_U, lam_rest, eps) -> float:
    """Certified lower bound on ``m→`` from one squeeze measure with constant ``ε^{-6}``."""
    return (M - math.log(lam_U / lam_rest) / math.log(1 / eps)) / 6


def certify(msr: SqueezeMeasure, V) -> SqueezeReport:
    sched, M, eps, lam, mu = msr.schedule, msr.M, msr.eps, msr.base, msr.measure
    U = sched.U
    sched.extend(M + 1)
    if M + 1 <= sched.depth and sched.W(M + 1).issuperset(V):
        raise DomainError("schedule-depth: V already lies in W_{M+1}, M is not minimal")
    d = directed_distance(U, V, keep_chain=False).value
    C = doubling_constant(mu).value
    mu_U, mu_V = mu.measure(U), mu.measure(V)
    rest = V - sched.W(M)
    lam_U, lam_rest = lam.measure(U), lam.measure(rest)
    bound = eps**M * lam_U / lam_rest
    ratio = mu_U / mu_V
    t = t_of_eps(M, lam_U, lam_rest, eps)
    t_exact = math.log(mu_V / mu_U) / math.log(C) if mu_V > mu_U and C > 1 else 0.0
    cap = d if sharp_exponent(U) else 3 * d
    return SqueezeReport(
        trivial=False,
        M=M,
        d_forward=d,
        d_bound_ok=d <= 4 * (M + 2),
        eps=eps,
        threshold=msr.threshold,
        K=msr.K,
        C_mu=C,
        doubling_ok=C <= eps**-6,
        ratio=ratio,
        ratio_bound=bound,
        ratio_ok=ratio <= bound and mu.measure(rest) == lam_rest,
        t_eps=t,
        t_exact=t_exact,
        t_consistent=t <= cap + 1e-9 and t_exact <= cap + 1e-9,
        preserved=mass_preservation(msr),
        u_identity=mu_U == eps**M * lam_U,
        provenance={"doubling": "exact", "ratio": "exact", "t": "numeric-with-tolerance 1e-9"},
    )


def depth_reaching(sched: SqueezeSchedule, V, limit: int = 64):
    """Least ``m`` with ``V ⊆ W_m`` (extending the schedule as needed)."""
    m = 0
    while True:
        if m > sched.depth:
            sched.extend(m)
            if m > sched.depth:
                return None
        if sched.W(m).issuperset(V):
            return m
        m += 1
        if m > limit:
            raise ResourceError("schedule-depth", f"V not reached within {limit} levels")


def squeeze(U, V, lam, factors=(Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))):
    """Full pipeline: schedule, ``M``, and one certified report per ``ε = factor · threshold``."""
    sched = build_schedule(U, 1)
    need = depth_reaching(sched, V)
    if need is None:
        raise CertificateError("schedule saturated without covering V", V)
    d = directed_distance(U, V, keep_chain=False).value
    if need <= 1:
        return sched, None, [SqueezeReport(True, None, d, d <= 4)]
    M = need - 2
    thr = admissibility_threshold(lam, sched, M) if M else Fraction(1, 2)
    reports = []
    for f in factors:
        msr = build_measure(lam, sched, thr * f, M)
        reports.append(certify(msr, V))
    return sched, M, reports


def squeeze_witnesses(U, V, lam=None, factors=(Fraction(1, 2), Fraction(1, 8), Fraction(1, 64))):
    """Squeeze measures usable as ``m`` lower-bound witnesses (empty if ``M = 0``)."""
    lam = lam or PiecewiseDensity.lebesgue()
    try:
        sched = build_schedule(U, 1)
        need = depth_reaching(sched, V, limit=24)
    except ResourceError:
        return []
    if need is None or need <= 2:
        return []
    M = need - 2
    thr = admissibility_threshold(lam, sched, M)
    return [build_measure(lam, sched, thr * f, M).measure for f in factors]


def simple_approx_bound(U: IntervalSet, N: int) -> int:
    """``d(U, U_N)`` where ``U_N`` keeps the ``N`` longest components; an upper bound for ``C_U``."""
    if not isinstance(U, IntervalSet):
        raise RepresentationError("simple approximation is implemented on the line")
    if N < 1:
        raise DomainError("keep at least one component")
    comps = sorted(U.components, key=lambda c: (-(c[1] - c[0]), c[0]))[:N]
    return doubling_distance(U, IntervalSet(comps)).value
