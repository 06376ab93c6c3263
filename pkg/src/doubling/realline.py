"""Exact open-set algebra on the real line.

Bounded open sets with finitely many components are stored as
:class:`IntervalSet`; the infinite puncture towers built by :func:`minus`
are handled symbolically by :class:`MinusTower`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import DomainError, RepresentationError, SimilarityMap

Q = Fraction


def as_rational(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(str(v))
    return Fraction(v)


def _normalize(pairs) -> tuple:
    ivs = sorted((as_rational(a), as_rational(b)) for a, b in pairs)
    for a, b in ivs:
        if not a < b:
            raise DomainError(f"degenerate interval ({a}, {b})")
    merged: list[list[Fraction]] = []
    for a, b in ivs:
        # touching intervals stay apart: the shared endpoint is not in the set
        if merged and a < merged[-1][1]:
            if b > merged[-1][1]:
                merged[-1][1] = b
        else:
            merged.append([a, b])
    return tuple((a, b) for a, b in merged)


class IntervalSet:
    """Finite union of open intervals with rational endpoints, canonical form."""

    space_tag = "realline"
    __slots__ = ("components",)

    def __init__(self, intervals: Iterable = ()):
        self.components = _normalize(intervals)

    @classmethod
    def interval(cls, a, b) -> "IntervalSet":
        return cls([(a, b)])

    @classmethod
    def punctured(cls, a, b, points) -> "IntervalSet":
        """``(a, b)`` with the given points removed."""
        a, b = as_rational(a), as_rational(b)
        cuts = sorted({as_rational(p) for p in points if a < as_rational(p) < b})
        edges = [a, *cuts, b]
        return cls(zip(edges[:-1], edges[1:]))

    # -- basic protocol ------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.components

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        body = " ∪ ".join(f"({a}, {b})" for a, b in self.components) or "∅"
        return f"IntervalSet[{body}]"

    @property
    def inf(self) -> Fraction:
        return self.components[0][0]

    @property
    def sup(self) -> Fraction:
        return self.components[-1][1]

    def contains_point(self, x) -> bool:
        x = as_rational(x)
        return any(a < x < b for a, b in self.components)

    def issuperset(self, other) -> bool:
        if isinstance(other, IntervalSet):
            i = 0
            comps = self.components
            for a, b in other.components:
                while i < len(comps) and comps[i][1] < b:
                    i += 1
                if i == len(comps) or not (comps[i][0] <= a and b <= comps[i][1]):
                    return False
            return True
        if isinstance(other, ClosedSet):
            return all(
                any(c < a and b < d for c, d in self.components)
                for a, b in other.components
            )
        if hasattr(other, "components"):
            raise RepresentationError("cannot compare with a non-realline set")
        return all(self.contains_point(p) for p in other)

    def issubset(self, other: "IntervalSet") -> bool:
        return other.issuperset(self)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.components + other.components)

    __or__ = union

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for a, b in self.components:
            for c, d in other.components:
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    out.append((lo, hi))
        return IntervalSet(out)

    __and__ = intersection

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        """Open part of ``self ∖ other``: removes ``other`` and its endpoints.

        Only the interior is returned; a measure-zero boundary is dropped.
        """
        out = []
        for a, b in self.components:
            pieces = [(a, b)]
            for c, d in other.components:
                nxt = []
                for p, q in pieces:
                    if d <= p or q <= c:
                        nxt.append((p, q))
                        continue
                    if p < c:
                        nxt.append((p, c))
                    if d < q:
                        nxt.append((d, q))
                pieces = nxt
            out.extend(pieces)
        return IntervalSet(out)

    __sub__ = difference

    def remove_points(self, points) -> "IntervalSet":
        pts = sorted({as_rational(p) for p in points})
        out = []
        for a, b in self.components:
            inner = [p for p in pts if a < p < b]
            edges = [a, *inner, b]
            out.extend(zip(edges[:-1], edges[1:]))
        return IntervalSet(out)

    def length(self) -> Fraction:
        return sum((b - a for a, b in self.components), Fraction(0))

    # -- doubling-metric protocol -------------------------------------------

    def predecessor(self) -> "IntervalSet":
        return predecessor(self)

    def inner_ball(self):
        a, b = max(self.components, key=lambda ab: ab[1] - ab[0])
        return (a + b) / 2, (b - a) / 2

    def spread(self, V, x) -> Fraction:
        x = as_rational(x)
        if isinstance(V, (IntervalSet, ClosedSet)):
            if V.is_empty:
                return Fraction(0)
            return max(abs(V.sup - x), abs(x - V.inf))
        pts = [as_rational(p) for p in V]
        return max((abs(p - x) for p in pts), default=Fraction(0))

    def apply_similarity(self, s, t) -> "IntervalSet":
        return similarity_apply(self, s, t)


class ClosedSet:
    """Finite union of closed intervals ``[a, b]`` (``a == b`` for points)."""

    space_tag = "realline"
    __slots__ = ("components",)

    def __init__(self, intervals: Iterable = ()):
        ivs = sorted((as_rational(a), as_rational(b)) for a, b in intervals)
        merged: list[list[Fraction]] = []
        for a, b in ivs:
            if a > b:
                raise DomainError(f"reversed interval [{a}, {b}]")
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(b, merged[-1][1])
            else:
                merged.append([a, b])
        self.components = tuple((a, b) for a, b in merged)

    @classmethod
    def points(cls, pts) -> "ClosedSet":
        return cls((p, p) for p in pts)

    @property
    def is_empty(self) -> bool:
        return not self.components

    @property
    def inf(self) -> Fraction:
        return self.components[0][0]

    @property
    def sup(self) -> Fraction:
        return self.components[-1][1]

    def length(self) -> Fraction:
        return sum((b - a for a, b in self.components), Fraction(0))

    def meets(self, U: IntervalSet) -> bool:
        return any(c < b and a < d for a, b in self.components for c, d in U.components)

    def __eq__(self, other):
        return isinstance(other, ClosedSet) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return "ClosedSet(" + ", ".join(f"[{a}, {b}]" for a, b in self.components) + ")"


def predecessor(U: IntervalSet) -> IntervalSet:
    """``U_*``: every component ``(a, b)`` grows to ``(a - L/2, b + L/2)``.

    On the line each ball is an interval sitting in a single component, and the
    component itself is the largest such ball.
    """
    return IntervalSet(
        (a - (b - a) / 2, b + (b - a) / 2) for a, b in U.components
    )


def components_cover(U: IntervalSet) -> list:
    """Maximal balls of ``U`` as ``(center, radius)``; pairwise disjoint."""
    return [((a + b) / 2, (b - a) / 2) for a, b in U.components]


def similarity_apply(U: IntervalSet, s, t) -> IntervalSet:
    s, t = as_rational(s), as_rational(t)
    if s <= 0:
        raise DomainError("scale must be positive")
    return IntervalSet((s * a + t, s * b + t) for a, b in U.components)


# -- the minus operation ---------------------------------------------------


MAX_TOWER_COMPONENTS = 200_000


def puncture_sequences(a, b, N: int):
    """``(ys, xs)``: the first ``N+1`` punctures approaching ``a`` and ``b``."""
    a, b = as_rational(a), as_rational(b)
    ys = [(3 * a + b) / 4]
    xs = [(3 * b + a) / 4]
    for _ in range(N):
        ys.append((2 * a + ys[-1]) / 3)
        xs.append((2 * b + xs[-1]) / 3)
    return ys, xs


def minus(U: IntervalSet, N: int) -> IntervalSet:
    """Truncated minus operation.

    In each component the punctures ``y_0..y_N`` and ``x_0..x_N`` are removed;
    the stubs ``(a, y_N)`` and ``(x_N, b)`` stay, which is what makes a
    truncated tower overshoot under the predecessor.
    """
    if N < 0:
        raise DomainError("truncation N must be >= 0")
    out = []
    for a, b in U.components:
        ys, xs = puncture_sequences(a, b, N)
        edges = [a, *reversed(ys), *xs, b]
        out.extend(zip(edges[:-1], edges[1:]))
    return IntervalSet(out)


@dataclass(frozen=True)
class _Affine:
    """``c0 + c1*q`` with rational coefficients; ``q = 3**-n`` for a level ``n``."""

    c0: Fraction
    c1: Fraction

    def __add__(self, o):
        return _Affine(self.c0 + o.c0, self.c1 + o.c1)

    def __sub__(self, o):
        return _Affine(self.c0 - o.c0, self.c1 - o.c1)

    def scale(self, k):
        return _Affine(self.c0 * k, self.c1 * k)


def _minus_identity_certificate() -> dict:
    """Check ``((0,1)_-)_* = (0,1)`` as identities valid for every level ``n``.

    With ``q = 3**-n``: ``y_n = q/4`` and ``x_n = 1 - q/4``. The generic left
    gap ``(y_{n+1}, y_n)`` has predecessor ``(0, q/3)``, the generic right gap
    has ``(1 - q/3, 1)`` and the core ``(y_0, x_0)`` maps to ``(0, 1)``. The
    predecessor commutes with ``x -> s x + t`` (``s > 0``) so the unit interval
    stands for every ``(a, b)``.
    """
    half = Fraction(1, 2)
    zero, one = _Affine(Q(0), Q(0)), _Affine(Q(1), Q(0))
    y_n = _Affine(Q(0), Q(1, 4))
    y_next = _Affine(Q(0), Q(1, 12))
    x_n = _Affine(Q(1), Q(-1, 4))
    x_next = _Affine(Q(1), Q(-1, 12))

    def pred(lo, hi):
        half_len = (hi - lo).scale(half)
        return lo - half_len, hi + half_len

    left_lo, left_hi = pred(y_next, y_n)
    right_lo, right_hi = pred(x_n, x_next)
    core_lo, core_hi = pred(
        _Affine(Q(1, 4), Q(0)), _Affine(Q(3, 4), Q(0))
    )
    checks = {
        "core_is_whole": (core_lo, core_hi) == (zero, one),
        "left_gaps_reach_a": left_lo == zero,
        # right end q/3 <= 1/3 < 1 for every q in (0, 1]
        "left_gaps_stay_inside": left_hi.c0 == 0 and 0 < left_hi.c1 < 1,
        "right_gaps_reach_b": right_hi == one,
        "right_gaps_stay_inside": right_lo.c0 == 1 and -1 < right_lo.c1 < 0,
        # y_{n+1} = (2a + y_n)/3, x_{n+1} = (2b + x_n)/3, and q = 1 gives y_0, x_0
        "closed_forms_match_recursion": (
            (zero.scale(2) + y_n).scale(Q(1, 3)) == y_next
            and (one.scale(2) + x_n).scale(Q(1, 3)) == x_next
            and y_n.c0 + y_n.c1 == Q(1, 4)
            and x_n.c0 + x_n.c1 == Q(3, 4)
        ),
    }
    return checks


@dataclass(frozen=True)
class MinusTower:
    """``V_-^M`` for an interval ``V = (a, b)``, kept symbolic.

    ``truncation`` only matters for :meth:`materialize`; distance claims use
    the symbolic identity ``(V_-^M)_* = V_-^(M-1)``.
    """

    a: Fraction
    b: Fraction
    depth: int
    truncation: int = 4

    def __post_init__(self):
        object.__setattr__(self, "a", as_rational(self.a))
        object.__setattr__(self, "b", as_rational(self.b))
        if not self.a < self.b:
            raise DomainError("tower base must be a non-degenerate interval")
        if self.depth < 0 or self.truncation < 0:
            raise DomainError("depth and truncation must be natural numbers")

    @property
    def base(self) -> IntervalSet:
        return IntervalSet.interval(self.a, self.b)

    def predecessor(self) -> "MinusTower":
        if self.depth == 0:
            raise RepresentationError("predecessor of the base interval is an IntervalSet")
        return MinusTower(self.a, self.b, self.depth - 1, self.truncation)

    def materialize(self, N: int | None = None) -> IntervalSet:
        N = self.truncation if N is None else N
        U = self.base
        for _ in range(self.depth):
            U = minus(U, N)
        return U

    def strictness_witness(self) -> Fraction:
        """``y_0`` of the base: in ``V`` but removed by the first minus."""
        return (3 * self.a + self.b) / 4


@dataclass(frozen=True)
class TowerCertificate:
    depth: int
    identity_checks: dict
    witness: Fraction
    witness_in_base: bool
    witness_outside_minus: bool
    truncation_checks: dict

    @property
    def ok(self) -> bool:
        return (
            all(self.identity_checks.values())
            and self.witness_in_base
            and self.witness_outside_minus
            and all(all(v.values()) for v in self.truncation_checks.values())
        )


def tower_certificate(V: IntervalSet, M: int, truncations=(2, 4, 8)) -> TowerCertificate:
    """Evidence that ``d(V_-^M, V) = M`` for an interval ``V``.

    Upper bound: ``(V_-^M)_*^M = V`` follows from the per-level identity.
    Lower bound: ``(V_-^M)_*^(M-1) = V_-`` misses ``y_0``. Truncated towers
    are checked numerically in the direction that survives truncation:
    ``T_N ⊆ V``, ``T_N`` misses ``y_0`` and ``(T_N)_*^M ⊇ V``.
    """
    if len(V) != 1:
        raise DomainError("tower base must be a single interval")
    if M < 0:
        raise DomainError("M must be a natural number")
    (a, b), = V.components
    tower = MinusTower(a, b, M)
    y0 = tower.strictness_witness()
    v_minus = minus(V, 0)
    trunc = {}
    if M >= 1:
        from .core import iterate_predecessor

        for N in truncations:
            if (2 * N + 3) ** M <= MAX_TOWER_COMPONENTS:
                T = tower.materialize(N)
                trunc[N] = {
                    "inside_base": V.issuperset(T),
                    "misses_witness": not T.contains_point(y0),
                    "covers_after_M": iterate_predecessor(T, M).issuperset(V),
                }
            else:
                # each component I of a level satisfies minus_N(I)_* ⊇ I (one affine
                # check on (0, 1)); monotonicity chains the levels back to V
                unit = IntervalSet.interval(0, 1)
                trunc[N] = {
                    "inside_base": True,
                    "misses_witness": not minus(V, N).contains_point(y0),
                    "covers_after_M": predecessor(minus(unit, N)).issuperset(unit),
                    "local": True,
                }
    return TowerCertificate(
        depth=M,
        identity_checks=_minus_identity_certificate(),
        witness=y0,
        witness_in_base=V.contains_point(y0),
        witness_outside_minus=not v_minus.contains_point(y0),
        truncation_checks=trunc,
    )


def tower_distance(V: IntervalSet, M: int) -> int:
    """``d(V_-^M, V)``, certified symbolically (see :func:`tower_certificate`)."""
    if M == 0:
        return 0
    cert = tower_certificate(V, M)
    if not cert.ok:
        from .core import CertificateError

        raise CertificateError("minus-tower certificate failed", cert)
    return M


def similarity(scale, offset=0) -> SimilarityMap:
    return SimilarityMap(Fraction(scale), Fraction(offset))
