"""Doubling measures on the three backends, the comparison inequality and bounds on ``m``.

``m→(U, V)`` is the least ``t`` such that ``μ(U) >= C^{-t} μ(V)`` for every
``C`` and every ``C``-doubling ``μ``. Upper bounds come from the doubling
distance; lower bounds are always explicit witnesses ``(C, μ)`` with
``log_C(μ(V)/μ(U))`` evaluated from exact rationals.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import finite as _finite
from ._lp import linprog_max
from .core import INFINITE, DomainError, RepresentationError, directed_distance
from .finite import FiniteSpace, PointSet
from .realline import ClosedSet, IntervalSet, as_rational
from .symbolic import CylinderSet

Q = Fraction


# -- representations ----------------------------------------------------------


class PiecewiseDensity:
    """Density ``densities[j]`` on ``(breaks[j], breaks[j+1])`` and ``outside`` elsewhere."""

    space_tag = "realline"

    def __init__(self, breaks: Sequence = (), densities: Sequence = (), outside=1):
        self.breaks = tuple(as_rational(b) for b in breaks)
        self.densities = tuple(as_rational(v) for v in densities)
        self.outside = as_rational(outside)
        if len(self.breaks) == 0:
            if self.densities:
                raise DomainError("densities given without breakpoints")
        elif len(self.densities) != len(self.breaks) - 1:
            raise DomainError("need one density per cell")
        if any(a >= b for a, b in zip(self.breaks, self.breaks[1:])):
            raise DomainError("breakpoints must increase strictly")
        if self.outside <= 0 or any(v <= 0 for v in self.densities):
            raise DomainError("densities must be positive")
        # canonical form: merge equal neighbours, trim end cells equal to outside
        bs, vs = list(self.breaks[:1]), []
        for b, v in zip(self.breaks[1:], self.densities):
            if vs and vs[-1] == v:
                bs[-1] = b
            else:
                vs.append(v)
                bs.append(b)
        while vs and vs[0] == self.outside:
            vs.pop(0)
            bs.pop(0)
        while vs and vs[-1] == self.outside:
            vs.pop()
            bs.pop()
        self.breaks = tuple(bs) if vs else ()
        self.densities = tuple(vs)

    @classmethod
    def lebesgue(cls) -> "PiecewiseDensity":
        return cls((), (), 1)

    @classmethod
    def from_function(cls, breaks, fn, outside) -> "PiecewiseDensity":
        """Sample ``fn`` at cell midpoints."""
        bs = sorted({as_rational(b) for b in breaks})
        vals = [as_rational(fn((a + b) / 2)) for a, b in zip(bs, bs[1:])]
        return cls(bs if vals else (), vals, outside)

    def __repr__(self):
        return f"PiecewiseDensity(breaks={[str(b) for b in self.breaks]}, densities={[str(v) for v in self.densities]}, outside={self.outside})"

    def __eq__(self, other):
        return isinstance(other, PiecewiseDensity) and (self.breaks, self.densities, self.outside) == (
            other.breaks, other.densities, other.outside)

    def density_at(self, x) -> Fraction:
        """Density on the open cell containing ``x`` (right cell at a breakpoint)."""
        x = as_rational(x)
        j = bisect.bisect_right(self.breaks, x) - 1
        if j < 0 or j >= len(self.densities):
            return self.outside
        return self.densities[j]

    def _left_right(self, t) -> tuple:
        j = bisect.bisect_left(self.breaks, t)
        left = self.densities[j - 1] if 0 < j <= len(self.densities) else self.outside
        right = self.densities[j] if j < len(self.densities) else self.outside
        return left, right

    def cumulative(self, x) -> Fraction:
        """``μ((t_0, x))`` signed, anchored at the first breakpoint (or 0)."""
        x = as_rational(x)
        bs = self.breaks
        if not bs:
            return self.outside * x
        if x <= bs[0]:
            return self.outside * (x - bs[0])
        total = Fraction(0)
        for j, v in enumerate(self.densities):
            a, b = bs[j], bs[j + 1]
            if x <= b:
                return total + v * (x - a)
            total += v * (b - a)
        return total + self.outside * (x - bs[-1])

    def mass(self, a, b) -> Fraction:
        a, b = as_rational(a), as_rational(b)
        if b <= a:
            return Fraction(0)
        return self.cumulative(b) - self.cumulative(a)

    def measure(self, S) -> Fraction:
        if isinstance(S, IntervalSet):
            return sum((self.mass(a, b) for a, b in S.components), Fraction(0))
        if isinstance(S, ClosedSet):
            return sum((self.mass(a, b) for a, b in S.components), Fraction(0))
        raise RepresentationError("piecewise densities measure realline sets")

    def scaled(self, c) -> "PiecewiseDensity":
        c = as_rational(c)
        return PiecewiseDensity(self.breaks, [v * c for v in self.densities], self.outside * c)

    def ratio(self, x, r) -> Fraction:
        """``μ(O(x, 2r)) / μ(O(x, r))``."""
        return self.mass(x - 2 * r, x + 2 * r) / self.mass(x - r, x + r)

    @property
    def extreme_densities(self) -> tuple:
        vals = (*self.densities, self.outside)
        return min(vals), max(vals)


@dataclass(frozen=True)
class BernoulliWeights:
    """Product measure on ``Λ^ℕ``: ``μ([w]) = Π p_{w_k}``."""

    p: tuple
    space_tag = "symbolic"

    def __post_init__(self):
        p = tuple(as_rational(v) for v in self.p)
        if len(p) < 2 or any(v <= 0 for v in p) or sum(p) != 1:
            raise DomainError("Bernoulli weights must be positive and sum to 1")
        object.__setattr__(self, "p", p)

    @property
    def k(self) -> int:
        return len(self.p)

    def cylinder(self, w) -> Fraction:
        out = Fraction(1)
        for c in w:
            out *= self.p[c]
        return out

    def measure(self, S: CylinderSet) -> Fraction:
        if not isinstance(S, CylinderSet):
            raise RepresentationError("Bernoulli weights measure cylinder sets")
        if S.k != self.k:
            raise RepresentationError("alphabet size mismatch")
        return sum((self.cylinder(w) for w in S.words), Fraction(0))


@dataclass(frozen=True)
class PointWeights:
    space: FiniteSpace
    w: tuple
    space_tag = "finite"

    def __post_init__(self):
        w = tuple(as_rational(v) for v in self.w)
        if len(w) != self.space.n:
            raise DomainError("one weight per point required")
        if any(v <= 0 for v in w):
            raise DomainError("weights must be positive")
        object.__setattr__(self, "w", w)

    def measure(self, S: PointSet) -> Fraction:
        if not isinstance(S, PointSet) or S.space is not self.space:
            raise RepresentationError("point weights measure subsets of their own space")
        return _finite.mass(self.w, S)


def measure_of(mu, S) -> Fraction:
    if not hasattr(mu, "measure"):
        raise RepresentationError(f"not a measure: {mu!r}")
    return mu.measure(S)


# -- doubling constants -------------------------------------------------------


@dataclass(frozen=True)
class DoublingConstant:
    value: Fraction
    provenance: str  # exact | certified-bound
    upper: Fraction | None = None
    witness: tuple | None = None


def _unit_mass(gl, gr, lo, hi) -> Fraction:
    """Mass of ``[t + lo, t + hi]`` for unit scale with density ``gl`` left of ``t`` and ``gr`` right."""
    left = max(Fraction(0), min(hi, Fraction(0)) - lo)
    right = max(Fraction(0), hi - max(lo, Fraction(0)))
    return gl * left + gr * right


def piecewise_doubling_constant(mu: PiecewiseDensity) -> DoublingConstant:
    """Exact supremum of ``μ(O(x,2r))/μ(O(x,r))`` for a piecewise-constant density.

    The lines ``x ± r = t_j`` and ``x ± 2r = t_j`` cut the half plane
    ``r > 0`` into convex cells on which the ratio is linear-fractional, so
    its supremum over a cell is reached at a vertex or along an unbounded
    direction (where the ratio tends to 2). Vertices on ``r = 0`` are
    approached along the four rays ``x = t_j + s r``, ``s ∈ {±1, ±2}``.
    """
    lo, hi = mu.extreme_densities
    upper = 2 * hi / lo
    best, wit = Fraction(2), None
    ts = mu.breaks
    cs = (1, -1, 2, -2)
    for ti, tj in itertools.product(ts, repeat=2):
        for c1, c2 in itertools.permutations(cs, 2):
            r = (ti - tj) / (c1 - c2)
            if r <= 0:
                continue
            x = ti - c1 * r
            v = mu.ratio(x, r)
            if v > best:
                best, wit = v, (x, r)
    for t in ts:
        gl, gr = mu._left_right(t)
        for s in cs:
            v = _unit_mass(gl, gr, Fraction(s - 2), Fraction(s + 2)) / _unit_mass(
                gl, gr, Fraction(s - 1), Fraction(s + 1)
            )
            if v > best:
                best, wit = v, (t, Fraction(0), s)
    return DoublingConstant(best, "exact", upper, wit)


def bernoulli_doubling_constant(mu: BernoulliWeights) -> DoublingConstant:
    # every ball is a cylinder [w] and its double is [w minus its last letter]
    return DoublingConstant(1 / min(mu.p), "exact", 1 / min(mu.p))


def doubling_constant(mu) -> DoublingConstant:
    if isinstance(mu, PiecewiseDensity):
        return piecewise_doubling_constant(mu)
    if isinstance(mu, BernoulliWeights):
        return bernoulli_doubling_constant(mu)
    if isinstance(mu, PointWeights):
        c = _finite.doubling_constant(mu.space, mu.w)
        return DoublingConstant(c, "exact", c)
    raise RepresentationError(f"no doubling constant for {type(mu).__name__}")


# -- the comparison inequality ------------------------------------------------


def sharp_exponent(U) -> bool:
    """The strong form ``C^{-d→}`` holds on the line and on ultrametric spaces."""
    if isinstance(U, PointSet):
        return U.space.ultrametric
    return U.space_tag in ("realline", "symbolic")


@dataclass(frozen=True)
class ComparisonReport:
    holds: bool
    mu_U: Fraction
    mu_V: Fraction
    C: Fraction
    d: int
    exponent: int
    tight: bool

    @property
    def bound(self) -> Fraction:
        return self.mu_V / self.C ** self.exponent


def verify_comparison(mu, U, V, *, sharp: bool | None = None) -> ComparisonReport:
    """Check ``μ(U) >= C^{-k} μ(V)`` with ``k = d→(U,V)`` (sharp) or ``3 d→(U,V)``."""
    d = directed_distance(U, V, keep_chain=False).value
    if d == INFINITE:
        raise DomainError("comparison needs a finite directed distance")
    if sharp is None:
        sharp = sharp_exponent(U)
    k = d if sharp else 3 * d
    C = doubling_constant(mu).value
    mu_U, mu_V = mu.measure(U), mu.measure(V)
    rhs = mu_V / C ** k
    return ComparisonReport(mu_U >= rhs, mu_U, mu_V, C, d, k, mu_U == rhs)


# -- bounds on m --------------------------------------------------------------


@dataclass(frozen=True)
class MWitness:
    C: Fraction
    ratio: Fraction
    measure: object

    @property
    def exponent(self) -> float:
        if self.ratio <= 1 or self.C <= 1:
            return 0.0
        return math.log(self.ratio) / math.log(self.C)


@dataclass(frozen=True)
class MBoundReport:
    lower: float
    upper: int
    witness: MWitness | None
    d_forward: int
    d_backward: int
    sharp: bool
    grid: tuple = field(default=(), repr=False)

    @property
    def consistent(self) -> bool:
        return self.lower <= self.upper + 1e-9


def finite_ratio_lp(U: PointSet, V: PointSet, C: Fraction, theta=Fraction(1, 10**6)):
    """Best ``μ(V)/μ(U)`` over ``C``-doubling weights, as an explicit positive witness.

    Charnes-Cooper form: ``w(U) = 1``, maximise ``w(V)`` under
    ``w(O(x,2r)) <= C w(O(x,r))`` for every effective pair. The optimum may
    sit on the boundary ``w_i = 0``; it is then mixed with a strictly
    positive feasible point so the witness is a genuine doubling measure.
    Returns ``None`` if no strictly positive ``C``-doubling weights exist.
    """
    sp = U.space
    n = sp.n
    rows = []
    for _x, _i, inner, outer in sp.effective_pairs():
        if inner == outer:
            continue
        rows.append([(1 if outer >> j & 1 else 0) - (C if inner >> j & 1 else 0) for j in range(n)])
    rows = [list(r) for r in {tuple(r) for r in rows}]
    eq = [[1 if j in U else 0 for j in range(n)]]
    best = linprog_max([1 if j in V else 0 for j in range(n)], rows, [0] * len(rows), eq, [1])
    if best.status != "optimal":
        return None
    w = list(best.x)
    if any(v == 0 for v in w):
        # maximise s subject to w_i >= s
        rows2 = [r + [0] for r in rows] + [[-1 if j == i else 0 for j in range(n)] + [1] for i in range(n)]
        pos = linprog_max([0] * n + [1], rows2, [0] * len(rows2), [e + [0] for e in eq], [1])
        if pos.status != "optimal" or pos.value == 0:
            return None
        w = [(1 - theta) * a + theta * b for a, b in zip(w, pos.x[:n])]
    Cw = _finite.doubling_constant(sp, w)
    ratio = _finite.mass(w, V) / _finite.mass(w, U)
    return MWitness(Cw, ratio, PointWeights(sp, tuple(w)))


def _frac_of(x: float) -> Fraction:
    return Fraction(x).limit_denominator(10**6)


def _finite_lower(U, V, grid_size=24, refine=16):
    if V.issubset(U):
        return None, ()
    logs = [math.log(1.05) + k * (math.log(2.0**12) - math.log(1.05)) / (grid_size - 1) for k in range(grid_size)]
    table = []
    cache: dict = {}

    def score(lc):
        C = _frac_of(math.exp(lc))
        if C not in cache:
            cache[C] = finite_ratio_lp(U, V, C)
        wit = cache[C]
        table.append((C, wit.exponent if wit else None))
        return (wit.exponent if wit else -1.0), wit

    scored = [score(lc) for lc in logs]
    k = max(range(grid_size), key=lambda i: scored[i][0])
    best = scored[k]
    lo, hi = logs[max(k - 1, 0)], logs[min(k + 1, grid_size - 1)]
    g = (math.sqrt(5) - 1) / 2
    a, b = hi - g * (hi - lo), lo + g * (hi - lo)
    sa, sb = score(a), score(b)
    for _ in range(refine):
        if sa[0] >= sb[0]:
            hi, b, sb = b, a, sa
            a = hi - g * (hi - lo)
            sa = score(a)
        else:
            lo, a, sa = a, b, sb
            b = lo + g * (hi - lo)
            sb = score(b)
        best = max(best, sa, sb, key=lambda s: s[0])
    return best[1], tuple(table)


def _bernoulli_menu(k: int, depth: int = 4):
    """Weights proportional to powers of 2 up to ``2^-depth``, normalised."""
    seen = set()
    for exps in itertools.product(range(depth + 1), repeat=k):
        raw = [Fraction(1, 2**e) for e in exps]
        p = tuple(v / sum(raw) for v in raw)
        if p not in seen:
            seen.add(p)
            yield BernoulliWeights(p)


def _realline_lower(U, V, d_forward):
    best = None
    cands = [PiecewiseDensity.lebesgue()]
    if d_forward not in (0, INFINITE):
        from .squeeze import squeeze_witnesses

        cands.extend(squeeze_witnesses(U, V))
    for mu in cands:
        C = doubling_constant(mu).value
        wit = MWitness(C, mu.measure(V) / mu.measure(U), mu)
        if best is None or wit.exponent > best.exponent:
            best = wit
    return best


def m_bounds(U, V, *, directed: bool = True, **opts) -> MBoundReport:
    """Bracket ``m→(U, V)`` (or ``m(U, V)`` with ``directed=False``).

    Upper: ``3 d`` in general, ``d`` on the line and on spaces flagged
    ultrametric. Lower: the best witness found over the backend's menu.
    """
    fwd = directed_distance(U, V, keep_chain=False).value
    bwd = directed_distance(V, U, keep_chain=False).value
    sharp = sharp_exponent(U)
    d = fwd if directed else max(fwd, bwd)
    upper = d if sharp else 3 * d
    pairs = [(U, V)] if directed else [(U, V), (V, U)]
    best, grid = None, ()
    for A, B in pairs:
        if isinstance(A, PointSet):
            wit, grid = _finite_lower(A, B, **opts)
        elif isinstance(A, CylinderSet):
            wit = None
            for mu in _bernoulli_menu(A.k, opts.get("depth", 4)):
                cand = MWitness(1 / min(mu.p), mu.measure(B) / mu.measure(A), mu)
                if wit is None or cand.exponent > wit.exponent:
                    wit = cand
        elif isinstance(A, IntervalSet):
            wit = _realline_lower(A, B, fwd if A is U else bwd)
        else:
            raise RepresentationError(f"no m bounds for {type(A).__name__}")
        if wit is not None and (best is None or wit.exponent > best.exponent):
            best = wit
    lower = best.exponent if best else 0.0
    return MBoundReport(lower, upper, best, fwd, bwd, sharp, grid)
