"""Finite metric spaces: the brute-force substrate for every other backend.

All radii are handled through *effective radii*. For a centre ``x`` let
``0 = b_0 < b_1 < ... < b_k`` be the distinct distances from ``x``. For
``r`` in ``(b_i, b_{i+1}]`` the open ball ``O(x, r)`` is the closed ball
``{δ <= b_i}``, and the union of ``O(x, 2r)`` over that interval is
``{δ < 2 b_{i+1}}``. For ``r > b_k`` the ball is the whole space. That turns
every "for all radii" quantifier into a finite scan.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .core import DomainError, RepresentationError, ResourceError, directed_distance

MAX_GAME_HORIZON = 12
MAX_GAME_POINTS = 16


def _frac(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(str(v))
    return Fraction(v)


class FiniteSpace:
    """Points ``0..n-1`` with an exact rational distance matrix."""

    def __init__(self, dist: Sequence[Sequence], *, ultrametric: bool = False, labels=None):
        D = [[_frac(v) for v in row] for row in dist]
        n = len(D)
        if n == 0:
            raise DomainError("a metric space needs at least one point")
        if any(len(row) != n for row in D):
            raise DomainError("distance matrix must be square")
        for i in range(n):
            if D[i][i] != 0:
                raise DomainError(f"non-zero diagonal at {i}")
            for j in range(i + 1, n):
                if D[i][j] != D[j][i]:
                    raise DomainError(f"asymmetric distance at ({i}, {j})")
                if D[i][j] <= 0:
                    raise DomainError(f"non-positive distance at ({i}, {j})")
        for i, j, k in itertools.product(range(n), repeat=3):
            if D[i][k] > D[i][j] + D[j][k]:
                raise DomainError(f"triangle inequality fails at ({i}, {j}, {k})")
            if ultrametric and D[i][k] > max(D[i][j], D[j][k]):
                raise DomainError(f"ultrametric inequality fails at ({i}, {j}, {k})")
        self.dist = tuple(tuple(row) for row in D)
        self.n = n
        self.ultrametric = ultrametric
        self.labels = tuple(labels) if labels is not None else tuple(range(n))
        self.full_mask = (1 << n) - 1
        # levels[x] = (b_0, ..., b_k); closed[x][i] = mask of {δ(x, .) <= b_i}
        self.levels = []
        self.closed = []
        for x in range(n):
            bs = sorted(set(D[x]))
            self.levels.append(tuple(bs))
            self.closed.append(tuple(self._mask(lambda y: D[x][y] <= b) for b in bs))
        self._pairs = tuple(self._effective_pairs())

    def _mask(self, pred) -> int:
        m = 0
        for y in range(self.n):
            if pred(y):
                m |= 1 << y
        return m

    def __repr__(self):
        return f"FiniteSpace(n={self.n}{', ultrametric' if self.ultrametric else ''})"

    def is_ultrametric(self) -> bool:
        D = self.dist
        return all(
            D[i][k] <= max(D[i][j], D[j][k])
            for i, j, k in itertools.product(range(self.n), repeat=3)
        )

    @property
    def diameter(self) -> Fraction:
        return max(max(row) for row in self.dist)

    @property
    def min_separation(self) -> Fraction | None:
        vals = [v for row in self.dist for v in row if v > 0]
        return min(vals) if vals else None

    # -- sets -------------------------------------------------------------

    def subset(self, points: Iterable[int]) -> "PointSet":
        m = 0
        for p in points:
            if not 0 <= p < self.n:
                raise DomainError(f"point {p} outside the space")
            m |= 1 << p
        return PointSet(self, m)

    def whole(self) -> "PointSet":
        return PointSet(self, self.full_mask)

    def empty(self) -> "PointSet":
        return PointSet(self, 0)

    def all_subsets(self, nonempty: bool = True):
        for m in range(1 if nonempty else 0, self.full_mask + 1):
            yield PointSet(self, m)

    def open_ball(self, x: int, r) -> "PointSet":
        r = _frac(r)
        if r <= 0:
            raise DomainError("radius must be positive")
        return PointSet(self, self._mask(lambda y: self.dist[x][y] < r))

    def closed_ball(self, x: int, r) -> "PointSet":
        r = _frac(r)
        return PointSet(self, self._mask(lambda y: self.dist[x][y] <= r))

    def effective_pairs(self) -> tuple:
        """``(x, i, inner, outer)``: inner ``O(x, r)`` and the largest ``O(x, 2r)``
        over the radius interval ``(b_i, b_{i+1}]`` (tail interval last)."""
        return self._pairs

    def _effective_pairs(self):
        for x in range(self.n):
            bs = self.levels[x]
            for i in range(len(bs)):
                inner = self.closed[x][i]
                if i + 1 < len(bs):
                    outer = self._mask(lambda y: self.dist[x][y] < 2 * bs[i + 1])
                else:
                    outer = self.full_mask
                yield x, i, inner, outer


@dataclass(frozen=True)
class PointSet:
    """Subset of a :class:`FiniteSpace` as a bitmask; every subset is open."""

    space: FiniteSpace
    mask: int

    space_tag = "finite"

    def __post_init__(self):
        if self.mask < 0 or self.mask > self.space.full_mask:
            raise DomainError("mask outside the space")

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    def __iter__(self):
        m, i = self.mask, 0
        while m:
            if m & 1:
                yield i
            m >>= 1
            i += 1

    def __len__(self):
        return bin(self.mask).count("1")

    def __contains__(self, p: int) -> bool:
        return bool(self.mask >> p & 1)

    def __repr__(self):
        return f"PointSet({sorted(self)})"

    def _peer(self, other) -> "PointSet":
        if isinstance(other, PointSet):
            if other.space is not self.space:
                raise RepresentationError("sets live in different spaces")
            return other
        return self.space.subset(other)

    def issuperset(self, other) -> bool:
        o = self._peer(other)
        return o.mask & ~self.mask == 0

    def issubset(self, other) -> bool:
        return self._peer(other).issuperset(self)

    def __or__(self, other):
        return PointSet(self.space, self.mask | self._peer(other).mask)

    def __and__(self, other):
        return PointSet(self.space, self.mask & self._peer(other).mask)

    def __sub__(self, other):
        return PointSet(self.space, self.mask & ~self._peer(other).mask)

    def complement(self) -> "PointSet":
        return PointSet(self.space, self.space.full_mask & ~self.mask)

    # -- doubling-metric protocol -------------------------------------------

    def predecessor(self) -> "PointSet":
        return predecessor(self)

    def inner_ball(self):
        x = next(iter(self))
        bs = self.space.levels[x]
        return x, (bs[1] if len(bs) > 1 else Fraction(1))

    def spread(self, V, x) -> Fraction:
        pts = list(self._peer(V))
        return max((self.space.dist[x][p] for p in pts), default=Fraction(0))


def open_ball(space: FiniteSpace, x: int, r) -> PointSet:
    return space.open_ball(x, r)


def predecessor(U: PointSet) -> PointSet:
    """Union of ``{δ < 2 b_{i+1}}`` over effective pairs whose inner ball lies in ``U``."""
    if U.is_empty:
        raise DomainError("predecessor of the empty set is not used; d→(∅, ·) is infinite")
    sp = U.space
    out = 0
    for x, _i, inner, outer in sp.effective_pairs():
        if inner & ~U.mask == 0:
            out |= outer
    return PointSet(sp, out)


def brute_predecessor(U: PointSet, radii: Iterable) -> PointSet:
    """Oracle: union of ``O(x, 2r)`` over the given radii with ``O(x, r) ⊆ U``."""
    sp = U.space
    out = 0
    for x in range(sp.n):
        for r in radii:
            if sp.open_ball(x, r).issubset(U):
                out |= sp.open_ball(x, 2 * r).mask
    return PointSet(sp, out)


# -- the game ---------------------------------------------------------------


def radius_menu(space: FiniteSpace, y: int, x: int) -> list:
    """Representative radii for player I's move ``(x, r)`` from position ``y``.

    Breakpoints are ``δ(y, x)/2`` and every distance from ``x``; between two
    consecutive breakpoints both the legality test ``δ(y,x) < 2r`` and the
    ball ``O(x, r)`` are constant, so each breakpoint, each midpoint and one
    radius past the last breakpoint cover all cases.
    """
    pts = sorted({space.dist[y][x] / 2, *space.dist[x]} - {Fraction(0)})
    menu = set(pts)
    edges = [Fraction(0), *pts]
    menu.update((a + b) / 2 for a, b in zip(edges, edges[1:]))
    menu.add(edges[-1] + 1)
    return sorted(r for r in menu if r > 0)


def game_solve(U: PointSet, y0: int, n: int) -> bool:
    """Does player I have a winning strategy in the ``n``-stage game from ``y0``?

    Player I names ``(x, r)`` with ``δ(y, x) < 2r``; player II answers with a
    point of ``O(x, r)``; player I wins if the final point lies in ``U``.
    Solved by backward induction over the move menu, memoised on
    ``(position, stages left)``.
    """
    sp = U.space
    if n < 0:
        raise DomainError("horizon must be >= 0")
    if n > MAX_GAME_HORIZON:
        raise ResourceError("game-horizon", f"n={n} exceeds {MAX_GAME_HORIZON}")
    if sp.n > MAX_GAME_POINTS:
        raise ResourceError("game-points", f"{sp.n} points exceed {MAX_GAME_POINTS}")
    D = sp.dist

    @lru_cache(maxsize=None)
    def wins(y: int, k: int) -> bool:
        if k == 0:
            return y in U
        for x in range(sp.n):
            for r in radius_menu(sp, y, x):
                if not D[y][x] < 2 * r:
                    continue
                replies = [z for z in range(sp.n) if D[z][x] < r]
                if all(wins(z, k - 1) for z in replies):
                    return True
        return False

    return wins(y0, n)


# -- measures -----------------------------------------------------------------


def doubling_constant(space: FiniteSpace, weights: Sequence) -> Fraction:
    """Exact least ``C`` with ``μ(O(x,2r)) <= C μ(O(x,r))`` for all ``x, r``."""
    w = [_frac(v) for v in weights]
    if len(w) != space.n:
        raise DomainError("one weight per point required")
    if any(v <= 0 for v in w):
        raise DomainError("doubling measures charge every point")
    best = Fraction(1)
    for _x, _i, inner, outer in space.effective_pairs():
        ratio = _mass(w, outer) / _mass(w, inner)
        if ratio > best:
            best = ratio
    return best


def _mass(w, mask: int) -> Fraction:
    total = Fraction(0)
    i = 0
    while mask:
        if mask & 1:
            total += w[i]
        mask >>= 1
        i += 1
    return total


def mass(weights: Sequence, S: PointSet) -> Fraction:
    return _mass([_frac(v) for v in weights], S.mask)


# -- Lipschitz condition on concentric balls -----------------------------------


@dataclass(frozen=True)
class ConcentricReport:
    holds: bool
    K: int
    observed: int
    witness: tuple | None


def preimage(f: Sequence[int], X: FiniteSpace, S: PointSet) -> PointSet:
    return X.subset(i for i, fi in enumerate(f) if fi in S)


def f3_concentric_check(f: Sequence[int], X: FiniteSpace, Y: FiniteSpace, K: int) -> ConcentricReport:
    """``d→(f^{-1}O(y,r), f^{-1}O(y,2r)) <= K`` for every ``y`` and effective radius."""
    if len(f) != X.n or any(not 0 <= v < Y.n for v in f):
        raise DomainError("f must map every point of X into Y")
    if set(f) != set(range(Y.n)):
        raise DomainError("f must be surjective")
    observed, witness = 0, None
    for y, i, inner, outer in Y.effective_pairs():
        A = preimage(f, X, PointSet(Y, inner))
        B = preimage(f, X, PointSet(Y, outer))
        d = directed_distance(A, B, keep_chain=False).value
        if d > observed:
            observed, witness = d, (y, Y.levels[y][i], sorted(A), sorted(B))
    return ConcentricReport(observed <= K, K, observed, witness)


# -- fixture spaces -----------------------------------------------------------


def line(points: Sequence) -> FiniteSpace:
    """Points of ``ℝ`` with the Euclidean metric."""
    ps = [_frac(p) for p in points]
    return FiniteSpace([[abs(a - b) for b in ps] for a in ps], labels=ps)


def discrete_space(n: int) -> FiniteSpace:
    return FiniteSpace([[0 if i == j else 1 for j in range(n)] for i in range(n)])


def x_space(N: int = 8) -> FiniteSpace:
    """``{0,1} × {0..N}`` with all distances 1."""
    labels = [(i, k) for k in range(N + 1) for i in (0, 1)]
    return FiniteSpace(
        [[0 if p == q else 1 for q in labels] for p in labels], labels=labels
    )


def y_space(N: int = 8) -> FiniteSpace:
    """``{0,1} × {0..N}``: the two points of level ``n`` sit ``2^{-n-1}`` apart, all else 1."""
    labels = [(i, k) for k in range(N + 1) for i in (0, 1)]

    def d(p, q):
        if p == q:
            return Fraction(0)
        if p[1] == q[1]:
            return Fraction(1, 2 ** (p[1] + 1))
        return Fraction(1)

    return FiniteSpace([[d(p, q) for q in labels] for p in labels], labels=labels)


def sup_product(X: FiniteSpace, Y: FiniteSpace) -> tuple:
    """``X × Y`` with the max metric, plus the projection onto ``Y`` as a point table."""
    labels = [(a, b) for a in range(X.n) for b in range(Y.n)]
    D = [
        [max(X.dist[p[0]][q[0]], Y.dist[p[1]][q[1]]) for q in labels]
        for p in labels
    ]
    P = FiniteSpace(D, labels=labels, ultrametric=X.ultrametric and Y.ultrametric)
    return P, [b for _a, b in labels]
