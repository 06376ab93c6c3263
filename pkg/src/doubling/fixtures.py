"""Named input bundles with expected-output manifests.

A bundle is a JSON document::

    {"name": ..., "inputs": {...}, "expected": [{"verb", "params", "expect", "provenance"}]}

``inputs`` can be fed straight to a CLI verb through ``--input``. Each
``expect`` entry is a list of ``[key, op, value]`` checks with ``op`` one of
``==``, ``<=``, ``>=``; :func:`replay` runs every entry and evaluates them.
"""

from __future__ import annotations

from fractions import Fraction

from . import finite as fin
from .core import DomainError
from .jsonio import dump_set, dump_space, fmt
from .realline import IntervalSet

PAPER, DERIVED = "PAPER", "DERIVED"


def _case(verb, params, expect, provenance):
    return {"verb": verb, "params": params, "expect": expect, "provenance": provenance}


def minus_tower(m=None):
    depths = [m] if m is not None else list(range(1, 7))
    v = [[0, 4]]
    cases = [
        _case("minus", {"v": v, "m": M}, [["distance", "==", M], ["certificate_ok", "==", True]], PAPER)
        for M in depths
    ]
    return {"space": "realline", "v": v, "m": depths}, cases


def remark_a(m=None):
    m = 3 if m is None else m
    step = Fraction(1, 2**m)
    punctures = [k * step for k in range(-(2**m) + 1, 2**m)]
    U = IntervalSet.punctured(-1, 1, punctures)
    inputs = {"space": "realline", "u": dump_set(U), "v": [[-2, 2]]}
    return inputs, [_case("dist", dict(inputs), [["d_uv", "==", 2]], PAPER)]


def _singleton_reach(X, steps, provenance):
    space = dump_space(X)
    cases = [
        _case("dist", {"space": space, "u": [p], "v": list(range(X.n))}, [["d_uv", "==", steps]], provenance)
        for p in range(X.n)
    ]
    return {"space": space}, cases


def y_space(m=None):
    return _singleton_reach(fin.y_space(8 if m is None else m), 2, PAPER)


def x_space(m=None):
    return _singleton_reach(fin.x_space(8 if m is None else m), 1, DERIVED)


def harmonic_porosity(m=None):
    spec = {"preset": "harmonic"}
    xs = [0, "1/2", "-1/3", "1/7"]
    cases = [
        _case("porosity", {"spec": spec, "x": x}, [["value", "<=", 2], ["stabilized", "==", True]], PAPER)
        for x in xs
    ]
    return {"spec": spec, "x": xs}, cases


def projection(m=None):
    A, B = fin.line([0, 1, 3]), fin.line([0, 2, 3])
    mp = {"kind": "projection", "A": dump_space(A), "B": dump_space(B)}
    cases = [
        _case("fcheck", {"map": mp, "which": "F3", "K": 1}, [["holds", "==", True]], PAPER),
        _case("fcheck", {"map": mp, "which": "F2", "K": 3}, [["holds", "==", True]], PAPER),
        _case("fcheck", {"map": mp, "which": "F1", "K": 3}, [["holds", "==", True]], PAPER),
    ]
    return {"map": mp}, cases


def shift(m=None):
    mp = {"kind": "shift", "k": 2 if m is None else m}
    cases = [
        _case("fcheck", {"map": mp, "which": "F1", "K": 1}, [["holds", "==", True]], PAPER),
        _case("fcheck", {"map": mp, "which": "F2", "K": 1}, [["holds", "==", True]], PAPER),
        _case("fcheck", {"map": mp, "which": "F3", "K": 1}, [["holds", "==", True]], DERIVED),
    ]
    return {"map": mp}, cases


def permutation(m=None):
    blocks = [2, 3, 4, 5] if m is None else list(range(2, m + 2))
    fwd = {"kind": "permutation", "blocks": blocks}
    inv = {"kind": "permutation", "blocks": blocks, "inverse": True}
    cases = [
        _case("fcheck", {"map": fwd, "which": "F3", "K": 2, "depth": 12}, [["holds", "==", True]], DERIVED),
        _case("fcheck", {"map": inv, "which": "F3", "K": 2, "depth": 12}, [["holds", "==", False]], DERIVED),
    ]
    return {"map": fwd}, cases


def two_point(m=None):
    X = fin.discrete_space(2)
    inputs = {"space": dump_space(X), "u": [0], "v": [0, 1]}
    cases = [
        _case("dist", dict(inputs), [["d_uv", "==", 1], ["d_vu", "==", 0]], DERIVED),
        _case("m-bounds", dict(inputs), [["upper", "==", 3], ["lower", ">=", fmt(Fraction(999, 1000))]], DERIVED),
    ]
    return inputs, cases


FIXTURES = {
    "minus-tower": minus_tower,
    "remark-a": remark_a,
    "y-space": y_space,
    "x-space": x_space,
    "harmonic-porosity": harmonic_porosity,
    "projection": projection,
    "shift": shift,
    "permutation": permutation,
    "two-point": two_point,
}


def bundle(name: str, m: int | None = None) -> dict:
    if name not in FIXTURES:
        raise DomainError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}")
    inputs, cases = FIXTURES[name](m)
    out = {"name": name, "inputs": inputs, "expected": cases}
    if m is not None:
        out["m"] = m
    return out


def _holds(actual, op, want) -> bool:
    if op == "==":
        return actual == want
    a, w = Fraction(str(actual)), Fraction(str(want))
    return a <= w if op == "<=" else a >= w


def replay(doc: dict, execute) -> dict:
    """Run every manifest entry through ``execute(verb, params)`` and evaluate its checks."""
    results = []
    for case in doc["expected"]:
        out = execute(case["verb"], case["params"])
        for key, op, want in case["expect"]:
            got = out.get(key)
            results.append({
                "verb": case["verb"],
                "key": key,
                "op": op,
                "expected": want,
                "actual": got,
                "pass": got is not None and _holds(got, op, want),
                "provenance": case["provenance"],
            })
    return {"name": doc["name"], "passed": all(r["pass"] for r in results), "checks": results}
