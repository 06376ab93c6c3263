"""Lipschitz conditions for induced maps ``U ↦ f^{-1}(U)``, porosity and thinness.

F3: ``d(f^{-1}U, f^{-1}V) <= K d(U, V)``, tested on concentric balls.
F2: pushforwards of ``C``-doubling measures are ``C^K``-doubling.
F1: ``m(f^{-1}U, f^{-1}V) <= K m(U, V)``.

F2 and F1 quantify over all doubling measures; here they run over a named
finite menu and a passing report means "no counterexample in menu".
"""

from __future__ import annotations

import itertools
import math
import random
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import finite as fin
from . import symbolic as sym
from .core import INFINITE, DomainError, RepresentationError, ResourceError, directed_distance
from .finite import FiniteSpace, PointSet
from .measures import (
    PiecewiseDensity,
    PointWeights,
    _bernoulli_menu,
    doubling_constant,
)
from .realline import ClosedSet, IntervalSet, as_rational
from .symbolic import CylinderSet, PermutationSpec

Q = Fraction


# -- maps ---------------------------------------------------------------------


@dataclass(frozen=True)
class MapSpec:
    """A continuous surjection ``f: X -> Y`` described by kind.

    ``X`` and ``Y`` are a :class:`FiniteSpace`, an alphabet size (sequence
    space) or the string ``"realline"``.
    """

    kind: str  # identity | similarity | projection | shift | permutation | finite-table
    X: object
    Y: object
    table: tuple = ()
    perm: PermutationSpec | None = None
    scale: Fraction = Fraction(1)
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind in ("projection", "finite-table"):
            if len(self.table) != self.X.n or any(not 0 <= v < self.Y.n for v in self.table):
                raise DomainError("table must map every point of X into Y")
            if set(self.table) != set(range(self.Y.n)):
                raise DomainError("finite-table map is not surjective")

    @classmethod
    def identity(cls, space) -> "MapSpec":
        if isinstance(space, FiniteSpace):
            return cls("finite-table", space, space, tuple(range(space.n)))
        return cls("identity", space, space)

    @classmethod
    def projection(cls, A: FiniteSpace, B: FiniteSpace) -> "MapSpec":
        """``A × B -> B`` with the supremum metric on the product."""
        P, table = fin.sup_product(A, B)
        return cls("projection", P, B, tuple(table))

    @classmethod
    def finite_table(cls, X, Y, table) -> "MapSpec":
        return cls("finite-table", X, Y, tuple(table))

    @classmethod
    def shift(cls, k: int = 2) -> "MapSpec":
        return cls("shift", k, k)

    @classmethod
    def permutation(cls, r: PermutationSpec, k: int = 2) -> "MapSpec":
        return cls("permutation", k, k, perm=r)

    @classmethod
    def similarity(cls, s, t=0) -> "MapSpec":
        s = as_rational(s)
        if s <= 0:
            raise DomainError("scale must be positive")
        return cls("similarity", "realline", "realline", scale=s, offset=as_rational(t))

    @property
    def backend(self) -> str:
        if isinstance(self.X, FiniteSpace):
            return "finite"
        if self.X == "realline":
            return "realline"
        return "symbolic"

    def preimage(self, U):
        if self.backend == "finite":
            return fin.preimage(self.table, self.X, U)
        if self.kind == "identity":
            return U
        if self.kind == "shift":
            return sym.shift_preimage(U)
        if self.kind == "permutation":
            return sym.permutation_preimage(self.perm, U)
        if self.kind == "similarity":
            s, t = self.scale, self.offset
            return IntervalSet(((a - t) / s, (b - t) / s) for a, b in U.components)
        raise RepresentationError(f"no preimage for kind {self.kind}")

    @property
    def domain_sharp(self) -> bool:
        """F3 => F2 keeps ``K`` when the domain is the line or ultrametric."""
        if self.backend == "finite":
            return self.X.ultrametric
        return True


@dataclass
class FReport:
    condition: str
    K: int
    holds: bool
    observed: object
    witness: object = None
    scope: str = ""
    note: str = ""
    details: dict = field(default_factory=dict)


def _f3(f: MapSpec, K: int, depth: int = 6, radii=None) -> FReport:
    if f.backend == "finite":
        rep = fin.f3_concentric_check(list(f.table), f.X, f.Y, K)
        return FReport("F3", K, rep.holds, rep.observed, rep.witness, "all effective balls of Y")
    if f.backend == "symbolic":
        observed, witness = 0, None
        for w, d in sym.concentric_ball_distances(f.preimage, f.X, depth):
            if d > observed:
                observed, witness = d, (sym.format_word(w), sym.format_word(w[:-1]))
        return FReport("F3", K, observed <= K, observed, witness, f"cylinder balls to depth {depth}")
    observed, witness = 0, None
    radii = radii or [Fraction(2) ** -j for j in range(-3, 6)]
    for y, r in itertools.product([Fraction(j, 4) for j in range(-8, 9)], radii):
        A = f.preimage(IntervalSet.interval(y - r, y + r))
        B = f.preimage(IntervalSet.interval(y - 2 * r, y + 2 * r))
        d = directed_distance(A, B, keep_chain=False).value
        if d > observed:
            observed, witness = d, (y, r)
    return FReport("F3", K, observed <= K, observed, witness, "interval menu")


def _measure_menu(f: MapSpec, size: int, seed: int):
    if f.backend == "finite":
        rng = random.Random(seed)
        yield PointWeights(f.X, (1,) * f.X.n)
        for _ in range(size):
            yield PointWeights(f.X, tuple(rng.randint(1, 9) for _ in range(f.X.n)))
    elif f.backend == "symbolic":
        yield from _bernoulli_menu(f.X, 3)
    else:
        yield PiecewiseDensity.lebesgue()
        yield PiecewiseDensity([0, 1], [3], 1)
        yield PiecewiseDensity([-1, 0, 2], [2, 5], 1)


def pushforward_constant(f: MapSpec, mu, depth: int = 6) -> Fraction:
    """Doubling constant of ``μ ∘ f^{-1}`` (exact on finite spaces; cylinder scan to ``depth``)."""
    if f.backend == "finite":
        w = [Fraction(0)] * f.Y.n
        for p, q in enumerate(f.table):
            w[q] += mu.w[p]
        return fin.doubling_constant(f.Y, w)
    if f.backend == "symbolic":
        k = f.Y
        best = Fraction(1)
        for n in range(1, depth + 1):
            for w in itertools.product(range(k), repeat=n):
                num = mu.measure(f.preimage(CylinderSet(k, [w[:-1]])))
                den = mu.measure(f.preimage(CylinderSet(k, [w])))
                best = max(best, num / den)
        return best
    # affine pushforward of a piecewise density
    s, t = f.scale, f.offset
    nu = PiecewiseDensity([s * b + t for b in mu.breaks], [v / s for v in mu.densities], mu.outside / s)
    return doubling_constant(nu).value


def _f2(f: MapSpec, K: int, size=12, seed=0, depth=6) -> FReport:
    worst, witness = 0.0, None
    holds = True
    count = 0
    for mu in _measure_menu(f, size, seed):
        C = doubling_constant(mu).value
        Cn = pushforward_constant(f, mu, depth)
        count += 1
        ok = Cn <= C**K
        expo = math.log(Cn) / math.log(C) if C > 1 else (0.0 if Cn == 1 else math.inf)
        if expo > worst:
            worst, witness = expo, (mu, C, Cn)
        holds &= ok
    return FReport(
        "F2", K, holds, worst, witness, f"{count} measures (seed {seed})",
        "no counterexample in menu" if holds else "counterexample found",
    )


def _pairs_for_f1(f: MapSpec, limit=400, seed=0):
    if f.backend == "finite":
        sets = list(f.Y.all_subsets())
        pairs = list(itertools.product(sets, repeat=2))
        if len(pairs) > limit:
            pairs = random.Random(seed).sample(pairs, limit)
        return pairs
    if f.backend == "symbolic":
        k = f.Y
        words = [w for n in range(0, 3) for w in itertools.product(range(k), repeat=n)]
        sets = [CylinderSet(k, [w]) for w in words]
        return list(itertools.product(sets, repeat=2))
    ivs = [IntervalSet.interval(a, b) for a, b in [(0, 1), (0, 2), (-1, 3), (2, 3), (0, 8)]]
    return list(itertools.product(ivs, repeat=2))


def _f1(f: MapSpec, K: int, size=12, seed=0, depth=6) -> FReport:
    """Ratio certificates ``log_C μ(f^{-1}V)/μ(f^{-1}U) <= K · (upper bound on m(U, V))``.

    Also runs the F2 check with the same ``K`` (the two conditions are
    equivalent with equal constants).
    """
    f2 = _f2(f, K, size, seed, depth)
    sharp_Y = f.backend != "finite" or f.Y.ultrametric
    worst, witness, holds = 0.0, None, True
    measures = [(mu, doubling_constant(mu).value) for mu in _measure_menu(f, size, seed)]
    for U, V in _pairs_for_f1(f, seed=seed):
        dUV = max(
            directed_distance(U, V, keep_chain=False).value,
            directed_distance(V, U, keep_chain=False).value,
        )
        upper = dUV if sharp_Y else 3 * dUV
        A, B = f.preimage(U), f.preimage(V)
        for mu, C in measures:
            a, b = mu.measure(A), mu.measure(B)
            lo = max(a, b) / min(a, b)
            lb = math.log(lo) / math.log(C) if C > 1 else 0.0
            slack = lb - K * upper
            if slack > worst:
                worst, witness = slack, (U, V, mu)
            if slack > 1e-9:
                holds = False
    return FReport(
        "F1", K, holds and f2.holds, worst, witness,
        f"{len(measures)} measures × set pairs",
        "no counterexample in menu" if holds and f2.holds else "counterexample found",
        {"F2_equivalent": f2},
    )


def f_condition_check(f: MapSpec, which: str, K: int, **scope) -> FReport:
    which = which.upper()
    if which == "F3":
        return _f3(f, K, **{k: v for k, v in scope.items() if k in ("depth", "radii")})
    if which == "F2":
        return _f2(f, K, **scope)
    if which == "F1":
        return _f1(f, K, **scope)
    raise DomainError(f"unknown condition {which}")


@dataclass
class ImplicationReport:
    f3: FReport
    f2: FReport
    f1: FReport
    factor: int

    @property
    def consistent(self) -> bool:
        """No instance where F3 holds but the implied condition fails."""
        return not self.f3.holds or (self.f2.holds and self.f1.holds)


def implication_check(f: MapSpec, K: int, **scope) -> ImplicationReport:
    """F3 at ``K``, then F2 and F1 at ``3K`` (``K`` on the line or ultrametric domains)."""
    factor = 1 if f.domain_sharp else 3
    f3 = f_condition_check(f, "F3", K, **{k: v for k, v in scope.items() if k == "depth"})
    f2 = f_condition_check(f, "F2", factor * K, **scope)
    f1 = f_condition_check(f, "F1", factor * K, **scope)
    return ImplicationReport(f3, f2, f1, factor)


# -- porosity -----------------------------------------------------------------


@dataclass(frozen=True)
class Tail:
    """Points ``c ± h(k)`` for ``k >= k0``, with ``h`` strictly decreasing to 0."""

    c: Fraction
    h: Callable
    k0: int = 1
    signs: tuple = (1, -1)
    window: int = 400

    def first_below(self, dist) -> int:
        """Least ``k >= k0`` with ``h(k) < dist`` (exponential then binary search)."""
        if dist <= 0:
            raise DomainError("distance must be positive")
        lo, step = self.k0, 1
        if self.h(lo) < dist:
            return lo
        while self.h(lo + step) >= dist:
            lo += step
            step *= 2
            if step > 2**60:
                raise DomainError("tail does not decay")
        hi = lo + step  # h(lo) >= dist > h(hi)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.h(mid) >= dist:
                lo = mid
            else:
                hi = mid
        return hi

    def points_between(self, sign, near, far, limit=10**5) -> list:
        """Tail points on one side with ``near < h(k) < far``."""
        k_far = self.first_below(far)
        k_near = self.first_below(near) if near > 0 else None
        if k_near is None:
            raise DomainError("infinitely many points; use a tail block")
        if k_near - k_far > limit:
            raise ResourceError("tail-points", f"{k_near - k_far} punctures in one ball")
        return [self.c + sign * self.h(k) for k in range(k_far, k_near) if self.h(k) > near]


def harmonic_tail() -> Tail:
    return Tail(Fraction(0), lambda k: Fraction(1, k + 1), 1)


@dataclass(frozen=True)
class PorositySpec:
    points: tuple = ()
    intervals: tuple = ()  # closed intervals [a, b] contained in S
    tail: Tail | None = None
    include_limit: bool = True

    def finite_part(self) -> ClosedSet:
        pts = list(self.points)
        if self.tail is not None and self.include_limit:
            pts.append(self.tail.c)
        return ClosedSet([(p, p) for p in pts] + list(self.intervals))

    def contains(self, x) -> bool:
        x = as_rational(x)
        if any(a <= x <= b for a, b in self.finite_part().components):
            return True
        t = self.tail
        if t is None or x == t.c:
            return False
        for s in t.signs:
            if (x - t.c) * s > 0:
                k = t.first_below(abs(x - t.c))
                if k > t.k0 and t.h(k - 1) == abs(x - t.c):
                    return True
        return False

    def with_points(self, extra) -> "PorositySpec":
        return PorositySpec(tuple(self.points) + tuple(extra), self.intervals, self.tail, self.include_limit)


def harmonic_set() -> PorositySpec:
    return PorositySpec((), (), harmonic_tail())


def _remove_closed(U: IntervalSet, S: ClosedSet) -> IntervalSet:
    out = []
    for c, d in U.components:
        pieces = [(c, d)]
        for a, b in S.components:
            nxt = []
            for p, q in pieces:
                if b <= p or a >= q:
                    nxt.append((p, q))
                    continue
                if p < a:
                    nxt.append((p, a))
                if b < q:
                    nxt.append((b, q))
            pieces = nxt
        out.extend(pieces)
    return IntervalSet(out)


@dataclass(frozen=True)
class Complement:
    """``O ∖ S``: a finite :class:`IntervalSet` plus tail gap blocks accumulating at ``c``.

    A block ``(sign, k)`` stands for the gaps between ``c + s h(j+1)`` and
    ``c + s h(j)`` for all ``j >= k``.
    """

    finite: IntervalSet
    blocks: tuple = ()
    tail: Tail | None = None

    @property
    def is_empty(self) -> bool:
        return self.finite.is_empty and not self.blocks

    def predecessor(self) -> IntervalSet:
        """Doubled gaps of a block overlap pairwise, so each block doubles to one interval.

        Its outer end is the largest doubled right end; its inner end tends to
        ``c`` and is attained only when some doubled gap overshoots ``c``. Both
        are read off a finite window of gaps and must settle early in it.
        """
        parts = list(self.finite.predecessor().components)
        t = self.tail
        for sign, k in self.blocks:
            inner, outer = _block_extent(t, k)
            if sign > 0:
                parts.append((t.c + inner, t.c + outer))
            else:
                parts.append((t.c - outer, t.c - inner))
        return IntervalSet(parts)


@lru_cache(maxsize=4096)
def _block_extent(t: Tail, k: int) -> tuple:
    inner, outer = Fraction(0), None
    inner_at = outer_at = k
    for j in range(k, k + t.window):
        p, q = t.h(j + 1), t.h(j)  # the gap in distance from c
        half = (q - p) / 2
        if p - half < inner:
            inner, inner_at = p - half, j
        if outer is None or q + half > outer:
            outer, outer_at = q + half, j
    if max(inner_at, outer_at) > k + t.window // 2:
        raise DomainError("tail predecessor did not settle within the window")
    return inner, outer


def ball_complement(spec: PorositySpec, y, r) -> Complement:
    y, r = as_rational(y), as_rational(r)
    lo, hi = y - r, y + r
    O = IntervalSet.interval(lo, hi)
    t = spec.tail
    blocks = []
    cut_points = []
    if t is not None:
        for s in t.signs:
            inner_edge = (lo - t.c) if s > 0 else (t.c - hi)  # signed distance of the ball's inner end
            outer_edge = (hi - t.c) if s > 0 else (t.c - lo)
            if outer_edge <= 0:
                continue  # ball lies entirely on the other side
            if inner_edge <= 0:
                # the ball reaches c: every tail point with h(k) < outer_edge is inside
                first_in = t.first_below(outer_edge)
                cut_points.append(t.c + s * t.h(first_in))
                blocks.append((s, first_in))
            else:
                cut_points.extend(t.points_between(s, inner_edge, outer_edge))
    fin_part = _remove_closed(O, spec.finite_part())
    fin_part = fin_part.remove_points(cut_points)
    if blocks:
        # drop the gaps already represented by tail blocks
        keep = []
        for a, b in fin_part.components:
            inside = False
            for s, k in blocks:
                edge = t.c + s * t.h(k)
                if s > 0 and t.c <= a and b <= edge:
                    inside = True
                if s < 0 and edge <= a and b <= t.c:
                    inside = True
            if not inside:
                keep.append((a, b))
        fin_part = IntervalSet(keep)
    return Complement(fin_part, tuple(blocks), t)


def complement_distance(spec: PorositySpec, y, r, x) -> float | int:
    """``d→(O(y, r) ∖ S, {x})``; infinite when the difference is empty."""
    C = ball_complement(spec, y, r)
    if C.is_empty:
        return INFINITE
    x = as_rational(x)
    if not C.blocks:
        return directed_distance(C.finite, [x], keep_chain=False).value
    if C.finite.contains_point(x):
        return 0
    return 1 + directed_distance(C.predecessor(), [x], keep_chain=False).value


def ball_menu(spec: PorositySpec, x, alpha) -> list:
    """Balls ``O(y, r)`` with ``x ∈ O`` and ``r <= α``: a centre grid plus gap midpoints."""
    x, alpha = as_rational(x), as_rational(alpha)
    out = set()
    radii = [alpha * j / 4 for j in range(1, 5)]
    for r in radii:
        for t in range(-7, 8):
            out.add((x + r * t / 8, r))
    # midpoints of the gaps of S near x
    near = ball_complement(spec, x, alpha)
    for a, b in near.finite.components:
        m = (a + b) / 2
        for r in radii:
            if abs(m - x) < r:
                out.add((m, r))
    return sorted(out)


@dataclass
class PorosityReport:
    value: object  # int, INFINITE or "unresolved"
    table: list  # (alpha, inf over menu, best ball)
    stabilized: bool


def porosity_index(spec: PorositySpec, x, alphas=None) -> PorosityReport:
    if not spec.contains(x):
        raise DomainError("x must belong to S")
    alphas = alphas or [Fraction(1, 10**j) for j in range(1, 6)]
    table = []
    for a in alphas:
        best, arg = INFINITE, None
        for y, r in ball_menu(spec, x, a):
            d = complement_distance(spec, y, r, x)
            if d < best:
                best, arg = d, (y, r)
        table.append((a, best, arg))
    tail_vals = [v for _, v, _ in table[-3:]]
    stable = len(tail_vals) == 3 and len(set(tail_vals)) == 1
    return PorosityReport(tail_vals[-1] if stable else "unresolved", table, stable)


def pore_ratio(spec: PorositySpec, x, r) -> Fraction:
    """Largest ``ρ/r`` with ``O(z, ρ) ⊆ O(x, r) ∖ S`` (components on the line)."""
    C = ball_complement(spec, x, r)
    best = Fraction(0)
    for a, b in C.finite.components:
        best = max(best, (b - a) / 2 / as_rational(r))
    t = C.tail
    for _s, k in C.blocks:
        best = max(best, (t.h(k) - t.h(k + 1)) / 2 / as_rational(r))
    return best


@dataclass
class BridgeReport:
    pore_found: bool
    distance: object
    holds: bool


def upper_porosity_bridge(spec: PorositySpec, x, r, k: int) -> BridgeReport:
    """If ``O(x,r) ∖ S`` has a pore of radius ``2^{-k} r`` then ``d→(O(x,r) ∖ S, {x}) <= k``."""
    found = k >= 1 and pore_ratio(spec, x, r) >= Fraction(1, 2**k)
    d = complement_distance(spec, x, r, x)
    return BridgeReport(found, d, (not found) or d <= k)


# -- thinness -------------------------------------------------------------------


@dataclass(frozen=True)
class PorousFamily:
    V: tuple
    m: tuple
    N: int


@dataclass
class ThinnessReport:
    holds: bool
    lhs: Fraction
    middle: Fraction
    rhs: Fraction
    C: Fraction
    mass_cap: Fraction  # largest μ(S) the chain allows
    series: Fraction  # Σ C^{-3 m_n}


def _overlap(V) -> int:
    if isinstance(V[0], PointSet):
        sp = V[0].space
        return max(sum(1 for A in V if p in A) for p in range(sp.n))
    ends = sorted({e for A in V for c in A.components for e in c})
    probes = [(a + b) / 2 for a, b in zip(ends, ends[1:])]
    return max((sum(1 for A in V if A.contains_point(p)) for p in probes), default=0)


def _disjoint_from(A, S) -> bool:
    if isinstance(A, PointSet):
        return not (A & S).mask
    if isinstance(S, ClosedSet):
        return not S.meets(A)
    return (A & S).is_empty


def thinness_inequality(fam: PorousFamily, mu, S) -> ThinnessReport:
    """``Σ μ(S) C^{-3 m_n} <= Σ μ(V_n) <= N μ(∪ V_n)`` for a truncated family."""
    if len(fam.V) != len(fam.m):
        raise DomainError("one m_n per set")
    for n, (A, mn) in enumerate(zip(fam.V, fam.m)):
        if not _disjoint_from(A, S):
            raise DomainError(f"V_{n} meets S")
        d = directed_distance(A, S, keep_chain=False).value
        if d > mn:
            raise DomainError(f"d→(V_{n}, S) = {d} exceeds m_{n} = {mn}")
    if _overlap(fam.V) > fam.N:
        raise DomainError(f"overlap {_overlap(fam.V)} exceeds N = {fam.N}")
    C = doubling_constant(mu).value
    series = sum((C ** (-3 * mn) for mn in fam.m), Fraction(0))
    muS = mu.measure(S)
    lhs = muS * series
    middle = sum((mu.measure(A) for A in fam.V), Fraction(0))
    union = fam.V[0]
    for A in fam.V[1:]:
        union = union | A
    rhs = fam.N * mu.measure(union)
    return ThinnessReport(lhs <= middle <= rhs, lhs, middle, rhs, C, rhs / series, series)


def dyadic_family(n_terms: int = 50) -> tuple:
    """``S = {0}``, ``V_n = (2^{-n-1}, 2^{-n})``: pairwise disjoint, ``d→(V_n, S) = 2``."""
    V = tuple(IntervalSet.interval(Fraction(1, 2 ** (n + 1)), Fraction(1, 2**n)) for n in range(1, n_terms + 1))
    return PorousFamily(V, (2,) * n_terms, 1), ClosedSet.points([0])
