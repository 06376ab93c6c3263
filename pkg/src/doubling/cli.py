"""Batch command-line front end.

Every verb maps JSON-shaped parameters to a JSON document through
:func:`execute`; :func:`main` adds argument parsing, ``--input`` bundles,
atomic ``--out``/``--csv`` writing and exit codes (0 ok, 1 domain or schema
error, 2 resource guard).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction

from . import analysis as an
from . import finite as fin
from . import fixtures as fx
from . import measures as ms
from . import squeeze as sq
from .core import (
    CertificateError,
    DomainError,
    RepresentationError,
    ResourceError,
    directed_distance,
    iterate_predecessor,
)
from .jsonio import (
    SchemaError,
    atomic_write,
    dump_measure,
    dump_set,
    encode,
    fmt,
    fmt_count,
    load,
    natural,
    parse_measure,
    parse_set,
    parse_space,
    rational,
)
from .realline import IntervalSet, ClosedSet, components_cover, minus, tower_certificate
from .symbolic import PermutationSpec

VERBS = (
    "pred", "dist", "game", "cover", "minus", "measure", "doubling-constant", "compare",
    "m-bounds", "squeeze", "fcheck", "porosity", "thinness", "fixtures",
)
EXACT, BOUND, NUMERIC = "exact", "certified-bound", "numeric-with-tolerance"


def _need(params, key):
    if key not in params or params[key] is None:
        raise SchemaError(f"/{key}", "required parameter missing")
    return params[key]


def _space(params):
    """The ``space`` parameter, else a space tag carried by the ``u`` set object."""
    if "space" in params:
        return parse_space(params["space"])
    u = params.get("u")
    if isinstance(u, dict) and "space" in u:
        return parse_space(u, "/u")
    return "realline"


def plain(v):
    """Report values as JSON: rationals as strings, sets via their schema, tuples as lists."""
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, (Fraction, float)):
        return fmt(v)
    if isinstance(v, (IntervalSet, ClosedSet)) or hasattr(v, "mask") or hasattr(v, "words"):
        return dump_set(v)
    if isinstance(v, dict):
        return {str(k): plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [plain(x) for x in v]
    return str(v)


# -- verbs ---------------------------------------------------------------------


def _pred(p):
    sp = _space(p)
    U = parse_set(sp, _need(p, "u"))
    return dump_set(iterate_predecessor(U, natural(p.get("n", 1), "/n")))


def _dist(p):
    sp = _space(p)
    U, V = parse_set(sp, _need(p, "u")), parse_set(sp, _need(p, "v"), "/v")
    uv = directed_distance(U, V, keep_chain=False)
    vu = directed_distance(V, U, keep_chain=False)
    return {
        "d": fmt_count(max(uv.value, vu.value)),
        "d_uv": fmt_count(uv.value),
        "d_vu": fmt_count(vu.value),
        "cutoff_uv": uv.cutoff_used,
        "cutoff_vu": vu.cutoff_used,
        "provenance": EXACT,
    }


def _game(p):
    sp = _space(p)
    if not isinstance(sp, fin.FiniteSpace):
        raise RepresentationError("the game is solved on finite spaces")
    U = parse_set(sp, _need(p, "u"))
    y0, n = natural(_need(p, "y0"), "/y0"), natural(_need(p, "n"), "/n")
    if y0 >= sp.n:
        raise SchemaError("/y0", "point outside the space")
    wins = fin.game_solve(U, y0, n)
    inside = y0 in iterate_predecessor(U, n)
    return {"wins": wins, "in_predecessor": inside, "agree": wins == inside, "provenance": EXACT}


def _cover(p):
    sp = _space(p)
    U = parse_set(sp, _need(p, "u"))
    if isinstance(U, IntervalSet):
        balls = components_cover(U)
    elif isinstance(sp, fin.FiniteSpace):
        balls = [ball for _, ball in sq._minimal_ball_cover(U)]
    else:
        balls = [(w, Fraction(2) ** (1 - len(w))) for w in U.sorted_words()]
        balls = [("".join(map(str, w)), r) for w, r in balls]
    return {"balls": [[plain(c), fmt(r)] for c, r in balls], "provenance": EXACT}


def _minus(p):
    if "m" in p and p["m"] is not None:
        V = parse_set("realline", _need(p, "v"), "/v")
        M = natural(p["m"], "/m")
        cert = tower_certificate(V, M)
        return {
            "distance": M if cert.ok else None,
            "certificate_ok": cert.ok,
            "witness": fmt(cert.witness),
            "identity_checks": plain(cert.identity_checks),
            "truncation_checks": {str(k): v for k, v in cert.truncation_checks.items()},
            "provenance": EXACT,
        }
    U = parse_set("realline", _need(p, "u"))
    return {"set": dump_set(minus(U, natural(p.get("n", 4), "/n"))), "provenance": EXACT}


def _measure(p):
    sp = _space(p)
    mu = parse_measure(sp, p.get("measure"))
    U = parse_set(sp, _need(p, "u"))
    return {"mass": fmt(ms.measure_of(mu, U)), "measure": dump_measure(mu), "provenance": EXACT}


def _doubling_constant(p):
    sp = _space(p)
    dc = ms.doubling_constant(parse_measure(sp, p.get("measure")))
    out = {"C": fmt(dc.value), "provenance": dc.provenance}
    if dc.upper is not None:
        out["upper"] = fmt(dc.upper)
    if dc.witness is not None:
        out["witness"] = plain(dc.witness)
    return out


def _compare(p):
    sp = _space(p)
    mu = parse_measure(sp, p.get("measure"))
    U, V = parse_set(sp, _need(p, "u")), parse_set(sp, _need(p, "v"), "/v")
    r = ms.verify_comparison(mu, U, V)
    return {
        "holds": r.holds, "mu_U": fmt(r.mu_U), "mu_V": fmt(r.mu_V), "C": fmt(r.C),
        "d_uv": fmt_count(r.d), "exponent": fmt_count(r.exponent), "bound": fmt(r.bound),
        "tight": r.tight, "provenance": EXACT,
    }


def _m_bounds(p):
    sp = _space(p)
    U, V = parse_set(sp, _need(p, "u")), parse_set(sp, _need(p, "v"), "/v")
    r = ms.m_bounds(U, V, directed=not p.get("symmetric", False))
    out = {
        "lower": fmt(r.lower), "upper": fmt_count(r.upper), "d_uv": fmt_count(r.d_forward),
        "d_vu": fmt_count(r.d_backward), "sharp": r.sharp, "consistent": r.consistent,
        "provenance": {"lower": NUMERIC, "upper": BOUND},
    }
    if r.witness is not None:
        out["witness"] = {"C": fmt(r.witness.C), "ratio": fmt(r.witness.ratio),
                          "measure": dump_measure(r.witness.measure)}
    return out


def _squeeze_rows(reports):
    return [
        {k: plain(getattr(r, k)) for k in (
            "eps", "threshold", "K", "C_mu", "ratio", "ratio_bound", "t_eps", "t_exact",
            "doubling_ok", "ratio_ok", "t_consistent", "preserved", "u_identity", "d_bound_ok")}
        | {"ok": r.ok}
        for r in reports
    ]


def _squeeze(p):
    sp = _space(p)
    lam = parse_measure(sp, p.get("measure"))
    U, V = parse_set(sp, _need(p, "u")), parse_set(sp, _need(p, "v"), "/v")
    factors = tuple(rational(f, f"/factors/{i}") for i, f in enumerate(p.get("factors", ["1/2", "1/4", "1/8"])))
    sched, M, reports = sq.squeeze(U, V, lam, factors)
    r0 = reports[0]
    return {
        "trivial": r0.trivial,
        "M": M,
        "d_uv": fmt_count(r0.d_forward),
        "levels": [dump_set(sched.W(m)) for m in range(sched.depth + 1)],
        "reports": [] if r0.trivial else _squeeze_rows(reports),
        "ok": all(r.ok for r in reports),
        "provenance": {"doubling": EXACT, "ratio": EXACT, "t": NUMERIC},
    }


def parse_map(obj, pointer="/map") -> an.MapSpec:
    if not isinstance(obj, dict):
        raise SchemaError(pointer, "expected a map object")
    kind = obj.get("kind")
    if kind == "projection":
        return an.MapSpec.projection(parse_space(obj.get("A"), pointer + "/A"), parse_space(obj.get("B"), pointer + "/B"))
    if kind == "finite-table":
        X, Y = parse_space(obj.get("X"), pointer + "/X"), parse_space(obj.get("Y"), pointer + "/Y")
        return an.MapSpec.finite_table(X, Y, obj.get("table", []))
    if kind == "identity":
        return an.MapSpec.identity(parse_space(obj.get("space", "realline"), pointer + "/space"))
    if kind == "shift":
        return an.MapSpec.shift(natural(obj.get("k", 2), pointer + "/k"))
    if kind == "permutation":
        if "blocks" in obj:
            r = PermutationSpec.blocks([natural(v, f"{pointer}/blocks/{i}") for i, v in enumerate(obj["blocks"])])
        else:
            r = PermutationSpec.from_mapping({int(a): int(b) for a, b in obj.get("table", [])})
        if obj.get("inverse"):
            r = r.inverse()
        return an.MapSpec.permutation(r, natural(obj.get("k", 2), pointer + "/k"))
    if kind == "similarity":
        return an.MapSpec.similarity(rational(obj.get("scale", 1), pointer + "/scale"),
                                     rational(obj.get("offset", 0), pointer + "/offset"))
    raise SchemaError(pointer + "/kind", f"unknown map kind {kind!r}")


def _fcheck(p):
    f = parse_map(_need(p, "map"))
    K = natural(_need(p, "K"), "/K")
    scope = {}
    if "depth" in p:
        scope["depth"] = natural(p["depth"], "/depth")
    which = str(_need(p, "which")).upper()
    if which in ("F1", "F2"):
        scope["seed"] = natural(p.get("seed", 0), "/seed")
    r = an.f_condition_check(f, which, K, **scope)
    out = {
        "condition": r.condition, "K": r.K, "holds": r.holds, "observed": plain(r.observed),
        "witness": plain(r.witness), "scope": r.scope, "note": r.note,
        "provenance": EXACT,
    }
    if "seed" in scope:
        out["seed"] = scope["seed"]
    return out


def parse_porosity(obj, pointer="/spec") -> an.PorositySpec:
    if obj is None or obj == {"preset": "harmonic"}:
        return an.harmonic_set()
    if not isinstance(obj, dict):
        raise SchemaError(pointer, "expected a porosity spec object")
    pts = tuple(rational(v, f"{pointer}/points/{i}") for i, v in enumerate(obj.get("points", [])))
    ivs = tuple(
        (rational(a, f"{pointer}/intervals/{i}/0"), rational(b, f"{pointer}/intervals/{i}/1"))
        for i, (a, b) in enumerate(obj.get("intervals", []))
    )
    tail = None
    if obj.get("tail") is not None:
        t = obj["tail"]
        if t.get("kind", "harmonic") != "harmonic":
            raise SchemaError(pointer + "/tail/kind", "only harmonic tails c ± 1/(k+1) are supported")
        tail = an.Tail(rational(t.get("c", 0), pointer + "/tail/c"), lambda k: Fraction(1, k + 1), 1)
    return an.PorositySpec(pts, ivs, tail, bool(obj.get("include_limit", True)))


def _porosity(p):
    spec = parse_porosity(p.get("spec"))
    x = rational(_need(p, "x"), "/x")
    alphas = p.get("alphas")
    if alphas is not None:
        alphas = [rational(a, f"/alphas/{i}") for i, a in enumerate(alphas)]
    r = an.porosity_index(spec, x, alphas)
    return {
        "value": fmt_count(r.value) if r.value != "unresolved" else "unresolved",
        "stabilized": r.stabilized,
        "table": [
            {"alpha": fmt(a), "value": fmt_count(v), "ball": None if arg is None else [fmt(arg[0]), fmt(arg[1])]}
            for a, v, arg in r.table
        ],
        "provenance": EXACT,
    }


def _thinness(p):
    fam = p.get("family", {"kind": "dyadic"})
    if fam.get("kind", "dyadic") == "dyadic":
        family, S = an.dyadic_family(natural(fam.get("terms", 50), "/family/terms"))
    else:
        V = tuple(parse_set("realline", v, f"/family/V/{i}") for i, v in enumerate(_need(fam, "V")))
        m = tuple(natural(v, f"/family/m/{i}") for i, v in enumerate(_need(fam, "m")))
        family = an.PorousFamily(V, m, natural(fam.get("N", 1), "/family/N"))
        S = ClosedSet((rational(a), rational(b)) for a, b in _need(fam, "S"))
    mu = parse_measure("realline", p.get("measure"))
    r = an.thinness_inequality(family, mu, S)
    return {
        "holds": r.holds, "lhs": fmt(r.lhs), "middle": fmt(r.middle), "rhs": fmt(r.rhs),
        "C": fmt(r.C), "series": fmt(r.series), "mass_cap": fmt(r.mass_cap),
        "terms": len(family.V), "provenance": EXACT,
    }


def _fixtures(p):
    name = _need(p, "name")
    m = p.get("m")
    doc = fx.bundle(name, None if m is None else natural(m, "/m"))
    if p.get("replay"):
        return fx.replay(doc, execute)
    return doc


_DISPATCH = {
    "pred": _pred, "dist": _dist, "game": _game, "cover": _cover, "minus": _minus,
    "measure": _measure, "doubling-constant": _doubling_constant, "compare": _compare,
    "m-bounds": _m_bounds, "squeeze": _squeeze, "fcheck": _fcheck, "porosity": _porosity,
    "thinness": _thinness, "fixtures": _fixtures,
}


def execute(verb: str, params: dict):
    if verb not in _DISPATCH:
        raise SchemaError("/verb", f"unknown verb {verb!r}")
    return _DISPATCH[verb](dict(params))


# -- csv ------------------------------------------------------------------------


def to_csv(verb: str, doc) -> str:
    if verb == "squeeze":
        rows = doc["reports"]
    elif verb == "porosity":
        rows = [{"alpha": r["alpha"], "value": r["value"]} for r in doc["table"]]
    else:
        raise SchemaError("/csv", f"no CSV series for {verb}")
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


# -- entry point ---------------------------------------------------------------------

_JSON_FLAGS = ("u", "v", "measure", "map", "spec", "family", "factors", "alphas", "x")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="doubling", description="Doubling metric toolkit.")
    ap.add_argument("verb", choices=VERBS)
    ap.add_argument("--input", help="JSON file or inline JSON with parameters (bundles use their 'inputs')")
    ap.add_argument("--out", help="write the JSON result here (atomically) instead of stdout")
    ap.add_argument("--csv", help="write the CSV series (squeeze, porosity) here")
    ap.add_argument("--space", help="realline | symbolic | finite, or a JSON space object")
    ap.add_argument("--k", type=int, help="alphabet size for the symbolic space")
    ap.add_argument("--dist", help="distance matrix (JSON) for the finite space")
    ap.add_argument("--ultrametric", action="store_true")
    for flag in _JSON_FLAGS:
        ap.add_argument(f"--{flag}", help="JSON value or file")
    ap.add_argument("--n", type=int)
    ap.add_argument("--m", type=int)
    ap.add_argument("--y0", type=int)
    ap.add_argument("--K", type=int)
    ap.add_argument("--which", choices=("F1", "F2", "F3"))
    ap.add_argument("--depth", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--name")
    ap.add_argument("--replay", action="store_true")
    ap.add_argument("--symmetric", action="store_true", help="m-bounds: symmetric m instead of m→")
    return ap


def _params(args) -> dict:
    params = {}
    if args.input:
        doc = load(args.input, "/input")
        if not isinstance(doc, dict):
            raise SchemaError("/input", "expected a JSON object")
        params.update(doc.get("inputs", doc))
    if args.space:
        try:
            space = load(args.space, "/space")
        except SchemaError:
            space = args.space
        if isinstance(space, str):
            space = {"space": space}
        params["space"] = space
    if args.k is not None or args.dist or args.ultrametric:
        space = params.get("space", {})
        space = {"space": space} if isinstance(space, str) else dict(space)
        if args.k is not None:
            space.setdefault("space", "symbolic")
            space["alphabet"] = args.k
        if args.dist:
            space.setdefault("space", "finite")
            space["dist"] = load(args.dist, "/dist")
        if args.ultrametric:
            space["ultrametric"] = True
        params["space"] = space
    for flag in _JSON_FLAGS:
        val = getattr(args, flag)
        if val is not None:
            params[flag] = load(val, f"/{flag}")
    for flag in ("n", "m", "y0", "K", "which", "depth", "seed", "name"):
        val = getattr(args, flag)
        if val is not None:
            params[flag] = val
    if args.replay:
        params["replay"] = True
    if args.symmetric:
        params["symmetric"] = True
    return params


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = execute(args.verb, _params(args))
        text = encode(doc)
        if args.csv:
            atomic_write(args.csv, to_csv(args.verb, doc))
        if args.out:
            atomic_write(args.out, text)
        else:
            sys.stdout.write(text)
        if args.verb == "fixtures" and args.replay and not doc["passed"]:
            return 1
        return 0
    except ResourceError as e:
        sys.stderr.write(encode({"error": str(e), "guard": e.guard}))
        return 2
    except SchemaError as e:
        sys.stderr.write(encode({"error": str(e), "pointer": e.pointer}))
        return 1
    except (DomainError, RepresentationError, CertificateError) as e:
        sys.stderr.write(encode({"error": str(e)}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
