"""JSON schemas for spaces, sets, measures and reports.

Exact quantities travel as strings (``"3/4"``, ``"0.25"``) or JSON integers,
never as floating JSON numbers, so a replay is bit-exact. Every emitted
document carries ``schema_version``.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from fractions import Fraction

from .core import DomainError
from .finite import FiniteSpace, PointSet
from .measures import BernoulliWeights, PiecewiseDensity, PointWeights
from .realline import ClosedSet, IntervalSet
from .symbolic import CylinderSet, format_word, parse_word

SCHEMA_VERSION = 1
SPACES = ("realline", "symbolic", "finite")


class SchemaError(DomainError):
    """Malformed input; ``pointer`` is a JSON-pointer-style path to the offending value."""

    def __init__(self, pointer: str, msg: str):
        super().__init__(f"{pointer or '/'}: {msg}")
        self.pointer = pointer or "/"


# -- scalars --------------------------------------------------------------------


def rational(v, pointer: str = "") -> Fraction:
    if isinstance(v, bool):
        raise SchemaError(pointer, "expected a rational, got a boolean")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        raise SchemaError(pointer, "exact quantities must be strings or integers, not floats")
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise SchemaError(pointer, f"not a rational: {v!r}") from None
    raise SchemaError(pointer, f"expected a rational, got {type(v).__name__}")


def natural(v, pointer: str = "") -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise SchemaError(pointer, "expected a natural number")
    return v


def fmt(q) -> str | int:
    """Integers stay JSON integers; other rationals become ``"p/q"`` strings."""
    if isinstance(q, bool):
        return q
    if isinstance(q, float):
        return "inf" if math.isinf(q) else repr(q)
    q = Fraction(q)
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_count(v) -> int | str:
    """Naturals or ``"inf"``."""
    return "inf" if isinstance(v, float) and math.isinf(v) else int(v)


def _list(v, pointer: str) -> list:
    if not isinstance(v, list):
        raise SchemaError(pointer, "expected a list")
    return v


# -- spaces ------------------------------------------------------------------------


def parse_space(obj, pointer: str = "/space"):
    """``"realline"``, ``{"space": "symbolic", "alphabet": 2}`` or ``{"space": "finite", "dist": [...]}``.

    ``kind`` and ``k`` are accepted as aliases of ``space`` and ``alphabet``.
    Returns ``"realline"``, an alphabet size or a :class:`FiniteSpace`.
    """
    if isinstance(obj, str):
        obj = {"space": obj}
    if not isinstance(obj, dict):
        raise SchemaError(pointer, "expected a space name or object")
    kind = obj.get("space", obj.get("kind"))
    if kind == "realline":
        return "realline"
    if kind == "symbolic":
        k = natural(obj.get("alphabet", obj.get("k", 2)), pointer + "/alphabet")
        if k < 2:
            raise SchemaError(pointer + "/alphabet", "alphabet needs at least two letters")
        return k
    if kind == "finite":
        rows = _list(obj.get("dist"), pointer + "/dist")
        D = [
            [rational(v, f"{pointer}/dist/{i}/{j}") for j, v in enumerate(_list(row, f"{pointer}/dist/{i}"))]
            for i, row in enumerate(rows)
        ]
        return FiniteSpace(D, ultrametric=bool(obj.get("ultrametric", False)))
    raise SchemaError(pointer + "/space", f"unknown space {kind!r}; expected one of {', '.join(SPACES)}")


def dump_space(space) -> dict:
    if space == "realline":
        return {"space": "realline"}
    if isinstance(space, int):
        return {"space": "symbolic", "alphabet": space}
    out = {"space": "finite", "dist": [[fmt(v) for v in row] for row in space.dist]}
    if space.ultrametric:
        out["ultrametric"] = True
    return out


# -- sets ------------------------------------------------------------------------


_SET_KEYS = ("intervals", "words", "points")


def parse_set(space, obj, pointer: str = "/u"):
    """A bare list, or an object carrying ``intervals``, ``words`` or ``points``."""
    if isinstance(obj, dict):
        key = next((k for k in _SET_KEYS if k in obj), None)
        if key is None:
            raise SchemaError(pointer, f"set object needs one of {', '.join(_SET_KEYS)}")
        obj, pointer = obj[key], f"{pointer}/{key}"
    items = _list(obj, pointer)
    if space == "realline":
        pairs = []
        for i, p in enumerate(items):
            p = _list(p, f"{pointer}/{i}")
            if len(p) != 2:
                raise SchemaError(f"{pointer}/{i}", "an interval is a pair [a, b]")
            a, b = (rational(v, f"{pointer}/{i}/{j}") for j, v in enumerate(p))
            if a >= b:
                raise SchemaError(f"{pointer}/{i}", "interval needs a < b")
            pairs.append((a, b))
        return IntervalSet(pairs)
    if isinstance(space, int):
        words = []
        for i, w in enumerate(items):
            if not isinstance(w, str) or any(not c.isdigit() or int(c) >= space for c in w):
                raise SchemaError(f"{pointer}/{i}", f"word over the alphabet 0..{space - 1} expected")
            words.append(parse_word(w))
        return CylinderSet(space, words)
    if isinstance(space, FiniteSpace):
        for i, p in enumerate(items):
            if isinstance(p, bool) or not isinstance(p, int) or not 0 <= p < space.n:
                raise SchemaError(f"{pointer}/{i}", f"point index in 0..{space.n - 1} expected")
        return space.subset(items)
    raise SchemaError(pointer, "unknown space")


def dump_set(S) -> list:
    if isinstance(S, IntervalSet):
        return [[fmt(a), fmt(b)] for a, b in S.components]
    if isinstance(S, ClosedSet):
        return [[fmt(a), fmt(b)] for a, b in S.components]
    if isinstance(S, CylinderSet):
        return [format_word(w) for w in S.sorted_words()]
    if isinstance(S, PointSet):
        return sorted(S)
    raise TypeError(f"cannot serialize {type(S).__name__}")


# -- measures ----------------------------------------------------------------------


def parse_measure(space, obj, pointer: str = "/measure"):
    """``{"measure": "lebesgue"}``, ``{"measure": "piecewise", ...}``, ``{"measure": "bernoulli", "p": [...]}``
    or ``{"measure": "weights", "w": [...]}``; ``None`` picks the uniform measure of the space."""
    if obj is None:
        if space == "realline":
            return PiecewiseDensity.lebesgue()
        if isinstance(space, int):
            return BernoulliWeights(tuple(Fraction(1, space) for _ in range(space)))
        return PointWeights(space, tuple(Fraction(1) for _ in range(space.n)))
    if not isinstance(obj, dict):
        raise SchemaError(pointer, "expected a measure object")
    kind = obj.get("measure", obj.get("kind"))
    if kind == "lebesgue" and space == "realline":
        return PiecewiseDensity.lebesgue()
    if kind == "piecewise" and space == "realline":
        breaks = [rational(v, f"{pointer}/breaks/{i}") for i, v in enumerate(_list(obj.get("breaks", []), pointer + "/breaks"))]
        dens = [rational(v, f"{pointer}/densities/{i}") for i, v in enumerate(_list(obj.get("densities", []), pointer + "/densities"))]
        return PiecewiseDensity(breaks, dens, rational(obj.get("outside", 1), pointer + "/outside"))
    if kind == "bernoulli" and isinstance(space, int):
        p = [rational(v, f"{pointer}/p/{i}") for i, v in enumerate(_list(obj.get("p"), pointer + "/p"))]
        if len(p) != space:
            raise SchemaError(pointer + "/p", f"need {space} weights")
        return BernoulliWeights(tuple(p))
    if kind in ("weights", "points") and isinstance(space, FiniteSpace):
        w = [rational(v, f"{pointer}/w/{i}") for i, v in enumerate(_list(obj.get("w"), pointer + "/w"))]
        return PointWeights(space, tuple(w))
    raise SchemaError(pointer + "/measure", f"measure kind {kind!r} does not fit this space")


def dump_measure(mu) -> dict:
    if isinstance(mu, PiecewiseDensity):
        if not mu.breaks and mu.outside == 1:
            return {"measure": "lebesgue"}
        return {
            "measure": "piecewise",
            "breaks": [fmt(b) for b in mu.breaks],
            "densities": [fmt(v) for v in mu.densities],
            "outside": fmt(mu.outside),
        }
    if isinstance(mu, BernoulliWeights):
        return {"measure": "bernoulli", "p": [fmt(v) for v in mu.p]}
    if isinstance(mu, PointWeights):
        return {"measure": "weights", "w": [fmt(v) for v in mu.w]}
    raise TypeError(f"cannot serialize {type(mu).__name__}")


# -- documents -----------------------------------------------------------------------


def encode(doc) -> str:
    """Canonical text: sorted keys, fixed separators, trailing newline."""
    if isinstance(doc, dict) and "schema_version" not in doc:
        doc = {**doc, "schema_version": SCHEMA_VERSION}
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def load(arg: str, pointer: str = ""):
    """Inline JSON, or the contents of a file when ``arg`` names one."""
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            arg = fh.read()
    try:
        return json.loads(arg)
    except json.JSONDecodeError as e:
        raise SchemaError(pointer, f"invalid JSON: {e.msg}") from None


def atomic_write(path: str, text: str) -> None:
    """Write via a temporary file in the same directory and rename over the target."""
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
