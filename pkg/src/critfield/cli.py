"""Command-line interface.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 empty set,
4 violated precondition, 5 resolution or size limit.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .construct import assemble_translates, build_ferry_set, gap_witness, projection_check
from .distfield import PlanarCompactSet, ferry_check, is_critical, scan_critical
from .errors import CritfieldError, EmptySetError
from .hyperbolic import (
    cosh_inequality_check,
    cosine_formula_check,
    hyp_critical_points,
    kappa_of,
    random_sites,
    riemannian_ferry_check,
    tie_configuration,
)
from .levelset import extract, manifold_diagnostic
from .realsets import CompactRealSet, bt_index_estimate, gap_sum, is_bt, minkowski_profile
from .setgen import cantor, cantor_assembly, dyadic_lattice_set, finite
from .svg import Canvas
from .verify import (
    annulus_packing,
    band_series,
    critical_length_profile,
    exclusion_bound,
    local_gapsum_check,
    porosity_probe,
    realization_round_trip,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------


def _plain(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _dump(obj: Any) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=1) + "\n"


def _read_json(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _real_set(path: str) -> CompactRealSet:
    return CompactRealSet.from_json(_read_json(path))


def _planar_set(path: str) -> PlanarCompactSet:
    d = _read_json(path)
    if "F" in d:  # construction output
        d = d["F"]
    return PlanarCompactSet.from_json(d)


def _report(check: str, passed: bool, **fields) -> dict:
    return {"check": check, "passed": bool(passed), **fields}


def _window_of(F: PlanarCompactSet, pad: float = 0.25) -> tuple[float, float, float, float]:
    x0, y0, x1, y1 = F.bbox
    m = pad * max(x1 - x0, y1 - y0, 1e-9)
    return x0 - m, y0 - m, x1 + m, y1 + m


def _draw_sites(cv: Canvas, F: PlanarCompactSet) -> None:
    if len(F.points):
        cv.points(F.points)
    if len(F.segments):
        cv.segments(F.segments)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_setgen(a) -> int:
    if a.kind == "cantor":
        K = cantor(a.alpha, a.depth, left=a.left, scale=a.scale)
    elif a.kind in ("tf", "assembly"):
        K = cantor_assembly(a.nmax)
    elif a.kind in ("t45", "lattice"):
        K = dyadic_lattice_set(a.nmax)
    else:
        K = finite(a.points)
    _write(_dump(K.to_json()), a.out)
    return EXIT_OK


def cmd_gapsum(a) -> int:
    K = _real_set(a.set)
    if K.is_empty:
        raise EmptySetError()
    if a.minkowski is not None:
        r = np.geomspace(a.rmax, a.rmin, a.n)
        _write(minkowski_profile(K, a.minkowski, r).to_csv(), a.out)
        return EXIT_OK
    finite_part = gap_sum(K, a.alpha)
    ok, rep = is_bt(K, a.alpha)
    out = {
        "alpha": a.alpha,
        "finite": finite_part,
        "tail": rep.tail,
        "total": rep.total,
        "null": rep.null,
        "is_bt": ok,
        "n_intervals": K.n_intervals,
    }
    if a.index:
        fit = bt_index_estimate(K, full=True)
        out["index"] = {"slope": fit.slope, "stderr": fit.stderr}
    _write(_dump(out), a.out)
    return EXIT_OK


def cmd_construct(a) -> int:
    if a.action == "ferry":
        K = _real_set(a.set)
        c = build_ferry_set(K, seed=a.seed)
        vals = K.points() if K.is_null else K.endpoints()
        proj = [bool(projection_check(c, v)) for v in vals]
        res = [is_critical(c.F, c.axis_point(v))[1] for v in vals]
        doc = {
            "F": c.F.to_json(),
            "y": c.y.tolist(),
            "g": c.g.tolist(),
            "a": c.a,
            "b": c.b,
            "checks": _report(
                "values realized on the axis",
                all(proj) and max(res, default=0.0) == 0.0,
                projection_ok=all(proj),
                max_residual=max(res, default=0.0),
            ),
        }
        if a.witness is not None:
            w = gap_witness(K, a.witness, c.b)
            doc["witness"] = _plain(w) if w is not None else None
        _write(_dump(doc), a.out)
        if a.svg:
            cv = Canvas(_window_of(c.F, 0.1))
            _draw_sites(cv, c.F)
            _write(cv.render(), a.svg)
        return EXIT_OK if doc["checks"]["passed"] else EXIT_FAIL

    parts = []
    for p in a.parts:
        d = _read_json(p)
        P = PlanarCompactSet.from_json(d.get("F", d))
        delta = float(d["delta"]) if "delta" in d else float(np.max(np.hypot(*P.vertices.T))) / 4.0
        parts.append((P, delta))
    asm = assemble_translates(parts, a.mode)
    doc = {
        "F": asm.F.to_json(),
        "centers": asm.centers,
        "radii": asm.radii,
        "mode": asm.mode,
        "area_budget": asm.area_budget,
        "rectangle": asm.rectangle,
        "checks": _report("guard balls isolate parts", asm.verified),
    }
    _write(_dump(doc), a.out)
    if a.svg:
        cv = Canvas(_window_of(asm.F, 0.1))
        _draw_sites(cv, asm.F)
        cv.circles(asm.centers, asm.radii)
        _write(cv.render(), a.svg)
    return EXIT_OK if asm.verified else EXIT_FAIL


def cmd_field(a) -> int:
    F = _planar_set(a.set)
    h = a.step if a.step is not None else F.diam / 500
    recs = scan_critical(F, a.window, h, a.tol)
    keep = [r for r in recs if r.value >= a.eps]
    buf = io.StringIO()
    buf.write("x,y,value,residual\n")
    for r in keep:
        buf.write("{!r},{!r},{!r},{!r}\n".format(*r.as_row()))
    _write(buf.getvalue(), a.out)
    if a.svg:
        cv = Canvas(recs.window)
        _draw_sites(cv, F)
        if keep:
            cv.points(np.array([r.location for r in keep]), layer="critical", r=2.5, color="crimson")
        _write(cv.render(), a.svg)
    if a.report:
        fr = ferry_check(keep, a.tol)
        _write(_dump(_report("quadratic value control between critical pairs", fr.passed, **_plain(fr))), a.report)
        return EXIT_OK if fr.passed else EXIT_FAIL
    return EXIT_OK


def cmd_levelset(a) -> int:
    F = _planar_set(a.set)
    window = a.window if a.window is not None else _window_of(F)
    h = a.step if a.step is not None else F.diam / 500
    curves = extract(F, a.r, window, h)
    rep = manifold_diagnostic(curves, a.focus, a.radius)
    doc = {
        "r": a.r,
        "n_components": curves.n_components,
        "bboxes": curves.bboxes,
        "max_vertex_error": curves.max_vertex_error,
        "anomalies": [dataclasses.asdict(x) for x in curves.anomalies],
        "clean": rep.clean,
        "extra_components": rep.extra_components,
    }
    _write(_dump(doc), a.out)
    if a.svg:
        cv = Canvas(window)
        _draw_sites(cv, F)
        cv.polylines(curves.polylines)
        if curves.anomalies:
            cv.points(np.array([x.location for x in curves.anomalies]), layer="anomalies", r=3, color="crimson")
        _write(cv.render(), a.svg)
    return EXIT_OK


def cmd_verify(a) -> int:
    name = _VERIFY_ALIASES.get(a.check, a.check)
    if name == "round-trip":
        A = _real_set(a.target)
        rep = realization_round_trip(A, a.eps, a.step, a.tol, a.match)
        doc = _report("every target value recovered and recovered set half-power summable", rep.passed, **_plain(rep))
    elif name == "band-series":
        K = _real_set(a.set)
        rep = band_series(K, a.D or 1.0, a.N)
        ok = rep.verdict == "consistent" and rep.sandwich_ok
        doc = _report("band series agrees with its integral form", ok, **_plain(rep))
    elif name == "packing":
        F = _planar_set(a.set)
        rep = annulus_packing(F, a.D, a.N, seed=a.seed)
        doc = _report(
            "weighted shell packing count",
            rep.passed,
            weighted_sum=rep.weighted_sum,
            bound=rep.bound,
            margin=rep.margin,
            **_plain(rep),
        )
    elif name == "length":
        F = _planar_set(a.set)
        r = np.asarray(a.r if a.r else np.geomspace(F.diam / 100, F.diam / 2, 8))
        rep = critical_length_profile(F, r, a.s)
        doc = _report("length of critical points above each level", True, **_plain(rep))
    elif name == "local-gapsum":
        F = _planar_set(a.set)
        rep = local_gapsum_check(F, a.at, a.tol)
        doc = _report(
            "local half-power gap sum of critical values", rep.passed, margin=rep.margin, **_plain(rep)
        )
    elif name == "exclusion":
        cv = _real_set(a.cv) if a.cv else CompactRealSet([])
        rep = exclusion_bound(a.D or 1.0, a.alpha, a.beta, cv)
        doc = _report("equispaced values cannot all be critical", rep.verdict == "excluded", **_plain(rep))
        doc["p"] = str(rep.p)
    else:
        cv = _real_set(a.cv)
        r = np.asarray(a.r if a.r else np.geomspace(cv.max / 64, cv.max, 7))
        rep = porosity_probe(cv, r)
        doc = _report("largest gap below each radius", True, **_plain(rep))
    doc["seed"] = a.seed
    _write(_dump(doc), a.out)
    return EXIT_OK if doc["passed"] else EXIT_FAIL


def cmd_hyp(a) -> int:
    rng = np.random.default_rng(a.seed)
    k = a.k
    if a.check in ("cosine", "cosinus"):
        worst = 0.0
        for _ in range(a.n):
            F, x, v = tie_configuration(rng, k)
            worst = max(worst, cosine_formula_check(F, x, v, (a.t,)).max_error)
        doc = _report("directional derivative equals minus cosine", worst <= a.limit, max_error=worst, t=a.t, n=a.n)
    elif a.check == "ferry":
        viol, worst, pairs = 0, 0.0, 0
        for _ in range(a.n):
            F = random_sites(rng, k, a.sites)
            cp = hyp_critical_points(F)
            rep = riemannian_ferry_check([(p, d) for p, d, _ in cp], kappa=kappa_of(k))
            viol += rep.violations
            pairs += rep.n_pairs
            worst = max(worst, rep.worst_ratio)
        doc = _report("squared values controlled by squared distance", viol == 0, violations=viol, pairs=pairs, worst_ratio=worst)
    else:
        uv = rng.uniform(-5, 5, (a.n, 2))
        ok = [cosh_inequality_check(u, v) for u, v in uv]
        doc = _report("hyperbolic cosine inequalities", all(x and y for x, y in ok), n=a.n)
    doc["k"] = k
    doc["seed"] = a.seed
    _write(_dump(doc), a.out)
    return EXIT_OK if doc["passed"] else EXIT_FAIL


_VERIFY_ALIASES = {
    "odrn": "round-trip",
    "chardon": "band-series",
    "peter": "packing",
    "mkrb": "length",
    "nakouli": "local-gapsum",
    "konmn": "exclusion",
}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _positive(x: str) -> float:
    v = float(x)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _at_least_one(x: str) -> int:
    v = int(x)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="critfield", description="Critical values of planar distance functions.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("setgen", parents=[common], help="generate compact subsets of the line")
    s.add_argument("kind", choices=["cantor", "tf", "assembly", "t45", "lattice", "finite"])
    s.add_argument("--alpha", type=_positive, default=1 / 3)
    s.add_argument("--depth", type=int, default=10)
    s.add_argument("--left", type=float, default=0.0)
    s.add_argument("--scale", type=_positive, default=1.0)
    s.add_argument("--nmax", type=_at_least_one, default=4)
    s.add_argument("--points", type=float, nargs="*", default=[])
    s.set_defaults(func=cmd_setgen)

    g = sub.add_parser("gapsum", parents=[common], help="gap sums and profiles of a set")
    g.add_argument("--set", default="-")
    g.add_argument("--alpha", type=_positive, default=0.5)
    g.add_argument("--index", action="store_true", help="also estimate the gap-sum exponent")
    g.add_argument("--minkowski", type=float, default=None, metavar="S", help="emit the CSV profile at exponent S")
    g.add_argument("--rmin", type=_positive, default=1e-4)
    g.add_argument("--rmax", type=_positive, default=1e-1)
    g.add_argument("--n", type=_at_least_one, default=20)
    g.set_defaults(func=cmd_gapsum)

    c = sub.add_parser("construct", parents=[common], help="planar sets with prescribed critical values")
    c.add_argument("action", choices=["ferry", "assemble"])
    c.add_argument("--set", default="-")
    c.add_argument("--witness", type=float, default=None, help="report a gap witness at this value")
    c.add_argument("--parts", nargs="*", default=[])
    c.add_argument("--mode", choices=["bounded", "closed"], default="bounded")
    c.add_argument("--svg", default=None)
    c.set_defaults(func=cmd_construct)

    f = sub.add_parser("field", parents=[common], help="scan the distance function for critical points")
    f.add_argument("action", choices=["scan"])
    f.add_argument("--set", default="-")
    f.add_argument("--eps", type=float, default=0.0)
    f.add_argument("--step", type=_positive, default=None)
    f.add_argument("--tol", type=_positive, default=1e-9)
    f.add_argument("--window", type=float, nargs=4, default=None)
    f.add_argument("--svg", default=None)
    f.add_argument("--report", default=None, help="write the pairwise value-control report here")
    f.set_defaults(func=cmd_field)

    ls = sub.add_parser("levelset", parents=[common], help="extract a level curve of the distance function")
    ls.add_argument("--set", default="-")
    ls.add_argument("--r", type=_positive, required=True)
    ls.add_argument("--window", type=float, nargs=4, default=None)
    ls.add_argument("--step", type=_positive, default=None)
    ls.add_argument("--focus", type=float, nargs=2, default=None)
    ls.add_argument("--radius", type=_positive, default=None)
    ls.add_argument("--svg", default=None)
    ls.set_defaults(func=cmd_levelset)

    v = sub.add_parser("verify", parents=[common], help="numerical checks of the quantitative bounds")
    v.add_argument(
        "check",
        choices=sorted({*_VERIFY_ALIASES, *_VERIFY_ALIASES.values(), "porosity"}),
    )
    v.add_argument("--target", default="-")
    v.add_argument("--set", default="-")
    v.add_argument("--cv", default=None)
    v.add_argument("--D", type=_positive, default=None, help="scale (default 1, or diam F for packing)")
    v.add_argument("--N", type=_at_least_one, default=12)
    v.add_argument("--alpha", type=float, default=0.5)
    v.add_argument("--beta", type=float, default=1.0)
    v.add_argument("--s", type=float, default=1.0)
    v.add_argument("--r", type=float, nargs="*", default=None)
    v.add_argument("--at", type=float, nargs=2, default=(0.0, 0.0))
    v.add_argument("--eps", type=_positive, default=None)
    v.add_argument("--step", type=_positive, default=None)
    v.add_argument("--tol", type=_positive, default=1e-9)
    v.add_argument("--match", type=_positive, default=1e-6)
    v.set_defaults(func=cmd_verify)

    hp = sub.add_parser("hyp", parents=[common], help="checks on the hyperbolic plane")
    hp.add_argument("action", choices=["check"])
    hp.add_argument("check", choices=["cosine", "cosinus", "ferry", "cosh"])
    hp.add_argument("--k", type=float, default=-1.0)
    hp.add_argument("--n", type=_at_least_one, default=100)
    hp.add_argument("--t", type=_positive, default=1e-4)
    hp.add_argument("--limit", type=_positive, default=1e-4)
    hp.add_argument("--sites", type=_at_least_one, default=8)
    hp.set_defaults(func=cmd_hyp)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "window", None) is not None and args.command == "levelset":
        x0, y0, x1, y1 = args.window
        if not (x1 > x0 and y1 > y0):
            parser.error("window must have positive extent")
    if args.command == "gapsum" and args.minkowski is not None and args.rmin >= args.rmax:
        parser.error("--rmin must be below --rmax")
    try:
        return args.func(args)
    except CritfieldError as e:
        print(f"critfield: {e}", file=sys.stderr)
        return e.exit_code
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        print(f"critfield: cannot read input: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
