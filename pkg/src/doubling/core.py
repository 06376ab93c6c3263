"""Space-agnostic predecessor iteration and doubling distances.

Every backend open-set type (``IntervalSet``, ``CylinderSet``, ``PointSet``)
implements the same small protocol:

``predecessor()``
    the union of all doubled balls ``O(x, 2r)`` with ``O(x, r)`` inside the set
``issuperset(other)``
    exact containment; ``other`` may be a set of the same backend or a
    collection of points
``inner_ball()``
    some ball ``(x, r)`` contained in the set
``spread(other, x)``
    the supremum of ``dist(x, p)`` over points ``p`` of ``other``
``is_empty``

The engine below only talks to that protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

INFINITE = math.inf


class DomainError(ValueError):
    """An operation was called outside its mathematical domain."""


class RepresentationError(TypeError):
    """A set or measure is not representable by the requested backend."""


class ResourceError(RuntimeError):
    """An exhaustive search would exceed its configured guard."""

    def __init__(self, guard: str, message: str):
        super().__init__(f"{guard}: {message}")
        self.guard = guard


class CertificateError(RuntimeError):
    """A constructed object failed one of its own certificates (a bug guard)."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class DistanceResult:
    """Outcome of a directed or symmetric distance computation.

    ``value`` is an ``int`` or ``INFINITE``. ``witness_chain`` holds the
    iterated predecessors ``U, U_*, U_*^2, ...`` up to the one that first
    contains the target.
    """

    value: int | float
    witness_chain: tuple = field(default=(), repr=False, compare=False)
    cutoff_used: int = 0

    @property
    def finite(self) -> bool:
        return self.value != INFINITE

    def __int__(self) -> int:
        if not self.finite:
            raise DomainError("distance is infinite")
        return int(self.value)


def ceil_log2(q: Fraction) -> int:
    """Smallest ``n >= 0`` with ``2**n >= q`` (exact)."""
    q = Fraction(q)
    n = 0
    while Fraction(2) ** n < q:
        n += 1
    return n


def iterate_predecessor(U, n: int):
    """Return ``U_*^n``."""
    if n < 0:
        raise DomainError("n must be a natural number")
    if not hasattr(U, "predecessor"):
        raise RepresentationError(f"{type(U).__name__} has no exact predecessor")
    W = U
    for _ in range(n):
        W = W.predecessor()
    return W


def cutoff_bound(U, V) -> int:
    """Number of predecessor steps after which ``V`` is certainly covered.

    If ``O(x, r)`` lies in ``U`` then ``O(x, 2**n r)`` lies in ``U_*^n``; once
    ``2**n r`` exceeds the spread ``D`` of ``V`` around ``x`` the target is
    inside. Returns ``ceil(log2(max(D/r, 1))) + 1``.
    """
    if U.is_empty:
        raise DomainError("U must be non-empty")
    x, r = U.inner_ball()
    D = U.spread(V, x)
    if D is None or D == INFINITE:
        raise DomainError("V is unbounded")
    return ceil_log2(max(Fraction(D) / Fraction(r), Fraction(1))) + 1


def _is_empty_target(V) -> bool:
    if hasattr(V, "is_empty"):
        return V.is_empty
    return len(V) == 0


def directed_distance(U, V, *, keep_chain: bool = True) -> DistanceResult:
    """Least ``n`` with ``V ⊆ U_*^n``.

    Iteration stops at :func:`cutoff_bound`; reaching it without containment
    is reported as ``INFINITE`` (which cannot happen for bounded ``V``, so it
    flags a backend bug rather than a genuine infinite distance).
    """
    if U.is_empty:
        raise DomainError("directed distance needs a non-empty source set")
    if _is_empty_target(V):
        return DistanceResult(0, (U,) if keep_chain else (), 0)
    limit = cutoff_bound(U, V)
    chain = [U]
    W = U
    for n in range(limit + 1):
        if W.issuperset(V):
            return DistanceResult(n, tuple(chain) if keep_chain else (), limit)
        W = W.predecessor()
        chain.append(W)
    return DistanceResult(INFINITE, tuple(chain) if keep_chain else (), limit)


def doubling_distance(U, V) -> DistanceResult:
    """``max(d→(U, V), d→(V, U))``; both sets must be non-empty."""
    forward = directed_distance(U, V)
    backward = directed_distance(V, U)
    if forward.value >= backward.value:
        return forward
    return backward


@dataclass(frozen=True)
class SimilarityMap:
    """Affine map ``x -> scale*x + offset`` with distortion bounds.

    For pure similarities ``K1 == K2 == scale``. A bi-Lipschitz map with
    ``K1 <= |f(x)-f(y)|/|x-y| <= K2`` distorts directed distances by at most
    the factor returned from :meth:`distortion_constant`.
    """

    scale: Fraction
    offset: Fraction = Fraction(0)
    K1: Fraction | None = None
    K2: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "offset", Fraction(self.offset))
        if self.scale <= 0:
            raise DomainError("similarity scale must be positive")
        k1 = self.scale if self.K1 is None else Fraction(self.K1)
        k2 = self.scale if self.K2 is None else Fraction(self.K2)
        if not 0 < k1 <= k2:
            raise DomainError("need 0 < K1 <= K2")
        object.__setattr__(self, "K1", k1)
        object.__setattr__(self, "K2", k2)

    @property
    def is_pure(self) -> bool:
        return self.K1 == self.K2 == self.scale

    def distortion_constant(self) -> int:
        """Smallest natural ``K`` with ``K >= 1 + log2(K2/K1)``."""
        K = 1
        while Fraction(2) ** (K - 1) * self.K1 < self.K2:
            K += 1
        return K

    def __call__(self, U):
        return U.apply_similarity(self.scale, self.offset)
