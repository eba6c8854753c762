"""Command-line front end.

Subcommands: ``analyze`` tabulates the point invariants over a uniform grid
of the surface's chart rectangle, ``directions`` solves the asymptotic and
principal direction equations at one point, ``trace`` integrates a direction
field from a seed, and ``verify`` runs the library's self-check suites.

Exit codes: 0 success, 1 input or spec error, 2 numeric or degeneracy error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import re
import sys
from typing import List, Optional

import numpy as np

from .curves import (
    CurveError,
    FieldKind,
    frenet_curvatures,
    integrate_line,
    is_constant_curvature,
)
from .expr import ExpressionError, ParseError
from .geometry import (
    ALL_DIRECTIONS,
    DEFAULT_TOLERANCES,
    GeometryError,
    TangentDirection,
    Tolerances,
    asymptotic_directions,
    classify_point,
    form_bundle,
    geodesic_torsion,
    normal_curvature,
    principal_directions,
)
from .surfaces import (
    SurfaceDefinition,
    SurfaceError,
    SurfaceSpecError,
    load_surface,
    resolve_surface,
    surface_jet,
)
from .verify import SUITE_NAMES, run_suite


class CliInputError(Exception):
    """Bad command line, option value, or surface spec (exit code 1)."""


class AnalysisError(Exception):
    """Numeric or degeneracy failure during a computation (exit code 2)."""


CSV_HEADER = "u,v,E,F,G,L,M,N,k,kappa,K,class,nu1,nu2"
TRACE_CSV_HEADER = "u,v,x1,x2,x3,x4"

_TOL_FIELDS = tuple(f.name for f in dataclasses.fields(Tolerances))
_ENV_PREFIX = "SURF4_TOL_"


def _fmt(x: float) -> str:
    # shortest round-trip decimal
    return repr(float(x))


def _tol_value(name: str, text: str, source: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise CliInputError(
            f"{source}: cannot parse tolerance {name}={text!r}") from None
    if not (math.isfinite(value) and value > 0.0):
        raise CliInputError(
            f"{source}: tolerance {name} must be positive and finite")
    return value


def resolve_tolerances(pairs: Optional[List[str]],
                       env=os.environ) -> Tolerances:
    """Defaults, overridden by SURF4_TOL_* variables, then by --tol pairs."""
    values = {}
    for key in sorted(k for k in env if k.startswith(_ENV_PREFIX)):
        name = key[len(_ENV_PREFIX):].lower()
        if name not in _TOL_FIELDS:
            raise CliInputError(f"unknown tolerance in environment: {key}")
        values[name] = _tol_value(name, env[key], key)
    for item in pairs or ():
        name, sep, text = item.partition("=")
        if not sep:
            raise CliInputError(f"--tol expects NAME=VALUE, got {item!r}")
        if name not in _TOL_FIELDS:
            raise CliInputError(
                f"unknown tolerance {name!r} "
                f"(known: {', '.join(_TOL_FIELDS)})")
        values[name] = _tol_value(name, text, "--tol")
    return dataclasses.replace(DEFAULT_TOLERANCES, **values)


def _parse_grid(text: str):
    m = re.fullmatch(r"(\d+)x(\d+)", text)
    if m is None:
        raise CliInputError(f"--grid expects NUxNV, got {text!r}")
    nu, nv = int(m.group(1)), int(m.group(2))
    if nu < 2 or nv < 2:
        raise CliInputError("grid must be at least 2x2")
    return nu, nv


def _surface(token: str) -> SurfaceDefinition:
    try:
        if token.startswith("builtin:"):
            return resolve_surface(token)
        return load_surface(token)
    except SurfaceSpecError as e:
        raise CliInputError(str(e)) from e


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# subcommands

def cmd_analyze(args) -> int:
    tol = resolve_tolerances(args.tol)
    defn = _surface(args.surface)
    nu, nv = _parse_grid(args.grid)
    us = np.linspace(defn.u_domain[0], defn.u_domain[1], nu)
    vs = np.linspace(defn.v_domain[0], defn.v_domain[1], nv)
    rows = []
    for u in us:
        for v in vs:
            u_f, v_f = float(u), float(v)
            try:
                b = form_bundle(surface_jet(defn, u_f, v_f), tol)
                inv = classify_point(b.first, b.second, tol)
            except (GeometryError, ExpressionError) as e:
                raise AnalysisError(
                    f"analysis failed at (u, v) = "
                    f"({u_f!r}, {v_f!r}): {e}") from e
            rows.append((u_f, v_f, b.first.E, b.first.F, b.first.G,
                         b.second.L, b.second.M, b.second.N,
                         inv.k, inv.kappa, inv.gauss,
                         inv.point_class.value, inv.nu1, inv.nu2))
    if args.format == "csv":
        lines = [CSV_HEADER]
        for row in rows:
            lines.append(",".join(
                x if isinstance(x, str) else _fmt(x) for x in row))
        _emit("\n".join(lines) + "\n", args.out)
    else:
        keys = CSV_HEADER.split(",")
        payload = {
            "surface": defn.name,
            "grid": [nu, nv],
            "rows": [dict(zip(keys, row)) for row in rows],
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_directions(args) -> int:
    tol = resolve_tolerances(args.tol)
    defn = _surface(args.surface)
    b = form_bundle(surface_jet(defn, args.u, args.v), tol)
    asym = asymptotic_directions(b.second, tol)
    if asym is ALL_DIRECTIONS:
        raise AnalysisError("flat point: all tangents")
    prin = principal_directions(b.first, b.second, tol)
    if prin is ALL_DIRECTIONS:
        raise AnalysisError("every tangent is principal at this point")

    def entry(d: TangentDirection):
        return {
            "direction": [d.lam, d.mu],
            "nu": normal_curvature(b.first, b.second, d),
            "alpha": geodesic_torsion(b.first, b.second, d),
        }

    payload = {
        "surface": defn.name,
        "u": args.u,
        "v": args.v,
        "asymptotic": [entry(d) for d in asym],
        "principal": [entry(d) for d in prin],
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_trace(args) -> int:
    tol = resolve_tolerances(args.tol)
    if not math.isfinite(args.step) or args.step <= 0.0:
        raise CliInputError("--step must be positive")
    if args.steps < 1:
        raise CliInputError("--steps must be at least 1")
    if args.frenet and args.format == "csv":
        raise CliInputError("--frenet output requires --format json")
    defn = _surface(args.surface)
    kind = FieldKind(args.field)
    try:
        trace = integrate_line(defn, args.u, args.v, kind,
                               branch=args.branch, step=args.step,
                               steps=args.steps, tol=tol)
    except (CurveError, GeometryError, SurfaceError, ExpressionError) as e:
        raise AnalysisError(f"trace failed at the seed: {e}") from e

    if args.format == "csv":
        lines = [TRACE_CSV_HEADER]
        for (pu, pv), pt in zip(trace.params, trace.points):
            lines.append(",".join(_fmt(x) for x in (pu, pv, *pt)))
        _emit("\n".join(lines) + "\n", args.out)
        return 0

    payload = {
        "surface": defn.name,
        "field": kind.value,
        "branch": args.branch,
        "step": args.step,
        "steps_requested": args.steps,
        "status": trace.status.value,
        "detail": trace.detail,
        "samples": int(trace.params.shape[0]),
        "params": trace.params.tolist(),
        "points": trace.points.tolist(),
        "tangents": trace.tangents.tolist(),
    }
    if args.frenet:
        try:
            fr = frenet_curvatures(trace.points, arc_step=args.step)
        except CurveError as e:
            raise AnalysisError(f"frenet analysis failed: {e}") from e
        frenet = {
            "arc_step": args.step,
            "kappa1": fr.kappa1.tolist(),
            "kappa2": None if fr.kappa2 is None else fr.kappa2.tolist(),
            "kappa3": None if fr.kappa3 is None else fr.kappa3.tolist(),
        }
        try:
            frenet["constant_curvature"] = is_constant_curvature(fr)
        except CurveError:
            frenet["constant_curvature"] = None
        payload["frenet"] = frenet
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    results = run_suite(args.suite, seed=args.seed)
    ok = all(r.passed for r in results)
    payload = {
        "suite": args.suite,
        "seed": args.seed,
        "passed": ok,
        "checks": [
            {
                "name": r.name,
                "passed": r.passed,
                "error_vs_tolerance": r.ratio,
                "detail": r.detail,
            }
            for r in results
        ],
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0 if ok else 3


# ---------------------------------------------------------------------------
# parser

class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; that slot is taken by
    # numeric errors here, so route usage problems through exit code 1
    def error(self, message):
        raise CliInputError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="surf4",
                     description="Curvature analysis of surfaces in R^4.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def common(p):
        p.add_argument("--tol", action="append", metavar="NAME=VALUE",
                       help="tolerance override, repeatable; names: "
                            + ", ".join(_TOL_FIELDS)
                            + "; SURF4_TOL_<NAME> env vars do the same")
        p.add_argument("--out", metavar="PATH",
                       help="write the report to PATH instead of stdout")

    p = sub.add_parser("analyze",
                       help="tabulate forms and invariants over a grid")
    p.add_argument("--surface", required=True, metavar="PATH|URI",
                   help="surface spec JSON file or builtin: URI")
    p.add_argument("--grid", required=True, metavar="NUxNV",
                   help="grid resolution, e.g. 20x20")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("directions",
                       help="asymptotic and principal directions at a point")
    p.add_argument("--surface", required=True, metavar="PATH|URI")
    p.add_argument("u", type=float)
    p.add_argument("v", type=float)
    common(p)
    p.set_defaults(func=cmd_directions)

    p = sub.add_parser("trace", help="integrate a direction field line")
    p.add_argument("--surface", required=True, metavar="PATH|URI")
    p.add_argument("--field", required=True,
                   choices=tuple(k.value for k in FieldKind))
    p.add_argument("--branch", type=int, choices=(1, 2), default=1)
    p.add_argument("--step", type=float, default=1e-2, metavar="H")
    p.add_argument("--steps", type=int, default=100, metavar="N")
    p.add_argument("--frenet", action="store_true",
                   help="append numeric Frenet curvatures (json only)")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("u", type=float)
    p.add_argument("v", type=float)
    common(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("verify", help="run a self-check suite")
    p.add_argument("suite", choices=SUITE_NAMES)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as e:  # argparse --help
        return 0 if e.code is None else int(e.code)
    except CliInputError as e:
        print(f"surf4: error: {e}", file=sys.stderr)
        return 1
    except (SurfaceSpecError, ParseError) as e:
        print(f"surf4: error: {e}", file=sys.stderr)
        return 1
    except AnalysisError as e:
        print(f"surf4: error: {e}", file=sys.stderr)
        return 2
    except (GeometryError, SurfaceError, CurveError, ExpressionError) as e:
        print(f"surf4: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
