"""Cylinder-set algebra on the sequence space ``Λ^ℕ``.

The metric is ``δ(i, j) = 2**-n`` where ``n`` is the length of the common
prefix. An open ball ``O(x, r)`` with ``2**-(n+1) < r <= 2**-n`` is the
cylinder of the first ``n+1`` letters of ``x``, so doubling a ball strips one
letter. Sequences are never materialized: every set is a finite antichain of
words, each word standing for its cylinder. The empty word is the whole
space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .core import (
    INFINITE,
    DomainError,
    RepresentationError,
    ResourceError,
    directed_distance,
)

Word = tuple

MAX_ENUMERATION = 200_000


def parse_word(w) -> Word:
    if isinstance(w, str):
        return tuple(int(c) for c in w)
    return tuple(int(c) for c in w)


def format_word(w: Word) -> str:
    return "".join(str(c) for c in w)


def _canonical(words: Iterable[Word], k: int) -> frozenset:
    ws = set(words)
    # drop words that extend another word
    ws = {w for w in ws if not any(w[:i] in ws for i in range(len(w)))}
    changed = True
    while changed:
        changed = False
        by_parent: dict[Word, set] = {}
        for w in ws:
            if w:
                by_parent.setdefault(w[:-1], set()).add(w[-1])
        for parent, letters in by_parent.items():
            if len(letters) == k:
                ws -= {parent + (a,) for a in range(k)}
                ws.add(parent)
                changed = True
        if changed:
            ws = {w for w in ws if not any(w[:i] in ws for i in range(len(w)))}
    return frozenset(ws)


class CylinderSet:
    """Union of cylinders over the alphabet ``{0, ..., k-1}``, canonical antichain."""

    space_tag = "symbolic"
    __slots__ = ("k", "words")

    def __init__(self, k: int, words: Iterable = ()):
        if k < 2:
            raise DomainError("alphabet needs at least two letters")
        parsed = [parse_word(w) for w in words]
        for w in parsed:
            if any(not 0 <= c < k for c in w):
                raise DomainError(f"word {format_word(w)} uses letters outside the alphabet")
        self.k = k
        self.words = _canonical(parsed, k)

    @classmethod
    def whole(cls, k: int) -> "CylinderSet":
        return cls(k, [()])

    @property
    def is_empty(self) -> bool:
        return not self.words

    @property
    def is_whole(self) -> bool:
        return () in self.words

    @property
    def depth(self) -> int:
        return max((len(w) for w in self.words), default=0)

    def sorted_words(self) -> list:
        return sorted(self.words, key=lambda w: (len(w), w))

    def __eq__(self, other):
        return isinstance(other, CylinderSet) and (self.k, self.words) == (other.k, other.words)

    def __hash__(self):
        return hash((self.k, self.words))

    def __repr__(self):
        if self.is_whole:
            return f"CylinderSet(k={self.k}, Σ)"
        return f"CylinderSet(k={self.k}, {[format_word(w) for w in self.sorted_words()]})"

    def _check(self, other):
        if not isinstance(other, CylinderSet):
            raise RepresentationError("expected a CylinderSet")
        if other.k != self.k:
            raise RepresentationError("alphabet sizes differ")

    def covers_word(self, v: Word) -> bool:
        return any(v[:i] in self.words for i in range(len(v) + 1))

    def issuperset(self, other) -> bool:
        self._check(other)
        return all(self.covers_word(v) for v in other.words)

    def union(self, other) -> "CylinderSet":
        self._check(other)
        return CylinderSet(self.k, self.words | other.words)

    __or__ = union

    def predecessor(self) -> "CylinderSet":
        return predecessor(self)

    def inner_ball(self):
        w = min(self.words, key=lambda u: (len(u), u))
        return w, Fraction(2) ** (1 - len(w))

    def spread(self, V, x: Word) -> Fraction:
        self._check(V)
        if V.is_empty:
            return Fraction(0)
        worst = Fraction(0)
        for v in V.words:
            j = 0
            while j < len(v) and v[j] == (x[j] if j < len(x) else 0):
                j += 1
            worst = max(worst, Fraction(1, 2 ** j))
        return worst

    def expand(self, depth: int) -> frozenset:
        """All words of length ``depth`` whose cylinders lie in the set."""
        out = set()
        for w in self.words:
            if len(w) > depth:
                raise DomainError("expansion depth below the set's depth")
            for tail in itertools.product(range(self.k), repeat=depth - len(w)):
                out.add(w + tail)
        return frozenset(out)


def ball(x: Word, n: int, k: int) -> CylinderSet:
    """``O(x, r)`` for ``2**-(n+1) < r <= 2**-n``: the first ``n+1`` letters of ``x``."""
    return CylinderSet(k, [tuple(x[: n + 1])])


def predecessor(U: CylinderSet) -> CylinderSet:
    """Strip the last letter of every maximal word."""
    if U.is_empty:
        return U
    if U.is_whole:
        return U
    return CylinderSet(U.k, [w[:-1] for w in U.words])


def strip_depth_distance(U: CylinderSet, V: CylinderSet):
    """``d→(U, V)`` by shortest paths on the word trie.

    A node ``u`` is covered after ``n`` steps iff it has a prefix in ``U``
    (``n = 0``) or some ``p ⪯ u`` has a child ``pa`` covered after ``n - 1``
    steps (the ball ``[pa]`` doubles to ``[p] ⊇ [u]``), or every child of ``u``
    is covered (``[u]`` is their union). That is a min-max shortest-path system
    on all words up to the deepest word of ``U ∪ V``, solved here by
    relaxation. Independent of the predecessor iteration.
    """
    U._check(V)
    if U.is_empty:
        if V.is_empty:
            return 0
        raise DomainError("directed distance needs a non-empty source set")
    if V.is_empty:
        return 0
    k = U.k
    L = max(U.depth, V.depth, 1)
    nodes = [w for n in range(L + 1) for w in itertools.product(range(k), repeat=n)]
    if len(nodes) > MAX_ENUMERATION:
        raise ResourceError("trie-size", f"{len(nodes)} trie nodes")
    F = {w: (0 if U.covers_word(w) else INFINITE) for w in nodes}
    while True:
        # best child value under each internal node
        G = {
            p: min(F[p + (a,)] for a in range(k))
            for p in nodes
            if len(p) < L
        }
        changed = False
        best_above: dict[Word, float] = {}
        for w in nodes:  # parents come before children
            inherited = best_above.get(w[:-1], INFINITE) if w else INFINITE
            here = min(inherited, G.get(w, INFINITE))
            best_above[w] = here
            if F[w] != 0 and 1 + here < F[w]:
                F[w] = 1 + here
                changed = True
        for w in reversed(nodes):  # children before parents
            if len(w) < L:
                joint = max(F[w + (a,)] for a in range(k))
                if joint < F[w]:
                    F[w] = joint
                    changed = True
        if not changed:
            break
    return max(F[v] for v in V.words)


def shift_preimage(U: CylinderSet) -> CylinderSet:
    """``σ^{-1}(U)`` for the shift dropping the first letter."""
    if U.is_whole:
        return U
    return CylinderSet(U.k, [(a,) + w for w in U.words for a in range(U.k)])


@dataclass(frozen=True)
class PermutationSpec:
    """Bijection ``r`` of positions ``1, 2, ...``: a finite table, identity elsewhere.

    The induced map is ``f(i)_n = i_{r(n)}``.
    """

    table: tuple = field(default=())

    def __post_init__(self):
        pairs = tuple(sorted((int(a), int(b)) for a, b in dict(self.table).items()))
        keys = {a for a, _ in pairs}
        vals = {b for _, b in pairs}
        if any(a < 1 or b < 1 for a, b in pairs):
            raise DomainError("positions start at 1")
        if keys != vals or len(vals) != len(pairs):
            raise DomainError("table does not extend to a bijection by the identity")
        object.__setattr__(self, "table", pairs)

    @classmethod
    def from_mapping(cls, mapping) -> "PermutationSpec":
        return cls(tuple(dict(mapping).items()))

    @classmethod
    def swap(cls, i: int, j: int) -> "PermutationSpec":
        return cls(((i, j), (j, i)))

    @classmethod
    def blocks(cls, lengths) -> "PermutationSpec":
        """Blocks where the first position jumps to the block end and the rest shift down.

        ``n - r(n)`` stays ``<= 1`` but reaches ``1 - L`` for a block of length ``L``.
        """
        mapping = {}
        start = 1
        for L in lengths:
            end = start + L - 1
            mapping[start] = end
            for n in range(start + 1, end + 1):
                mapping[n] = n - 1
            start = end + 1
        return cls.from_mapping(mapping)

    def __call__(self, n: int) -> int:
        return dict(self.table).get(n, n)

    def inverse(self) -> "PermutationSpec":
        return PermutationSpec(tuple((b, a) for a, b in self.table))

    @property
    def reach(self) -> int:
        return max((a for a, _ in self.table), default=0)

    def displacement(self) -> int:
        """``max(0, max_n (n - r(n)))``; identity positions contribute 0."""
        return max([0] + [a - b for a, b in self.table])


def permutation_preimage(r: PermutationSpec, U: CylinderSet) -> CylinderSet:
    """``f^{-1}(U)``: sequences carrying letter ``w_n`` at position ``r(n)``."""
    out = []
    for w in U.words:
        if not w:
            return CylinderSet.whole(U.k)
        constraint = {r(n): c for n, c in enumerate(w, start=1)}
        D = max(constraint)
        free = [p for p in range(1, D + 1) if p not in constraint]
        if U.k ** len(free) > MAX_ENUMERATION:
            raise ResourceError("preimage-size", f"{U.k ** len(free)} words")
        for letters in itertools.product(range(U.k), repeat=len(free)):
            full = dict(constraint)
            full.update(zip(free, letters))
            out.append(tuple(full[p] for p in range(1, D + 1)))
    return CylinderSet(U.k, out)


@dataclass(frozen=True)
class F3Result:
    holds: bool
    K: int
    observed: int
    witness: tuple | None
    per_depth: dict


def concentric_ball_distances(f_preimage, k: int, depth: int, *, all_words_limit: int = 4096):
    """Yield ``(w, d→(f^{-1}[w], f^{-1}[w[:-1]]))`` for cylinder balls up to ``depth``.

    ``[w]`` and ``[w[:-1]]`` are ``O(y, ρ)`` and ``O(y, 2ρ)`` for every ``ρ``
    with ``2**-|w| < ρ <= 2**(1-|w|)``; larger radii give the whole space twice.
    """
    for n in range(1, depth + 1):
        if k ** n <= all_words_limit:
            words = itertools.product(range(k), repeat=n)
        else:
            words = (tuple([a] * n) for a in range(k))
        for w in words:
            small = f_preimage(CylinderSet(k, [w]))
            big = f_preimage(CylinderSet(k, [w[:-1]]))
            yield w, directed_distance(small, big, keep_chain=False).value


def permutation_f3_check(r: PermutationSpec, depth: int, K: int | None = None, k: int = 2) -> F3Result:
    """Concentric-ball test of the Lipschitz condition for ``f_r``.

    Bounded displacement ``D = max(n - r(n), 0)`` gives
    ``d→(f^{-1}O(y,ρ), f^{-1}O(y,2ρ)) <= D + 1``; ``K`` defaults to that bound.
    """
    if K is None:
        K = r.displacement() + 1
    observed = 0
    witness = None
    per_depth: dict[int, int] = {}
    for w, d in concentric_ball_distances(lambda U: permutation_preimage(r, U), k, depth):
        per_depth[len(w)] = max(per_depth.get(len(w), 0), d)
        if d > observed:
            observed, witness = d, (format_word(w), format_word(w[:-1]), d)
    return F3Result(observed <= K, K, observed, witness, per_depth)
