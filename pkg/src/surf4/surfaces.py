"""Surface construction: expressions to jets, plus closed-form references.

A SurfaceDefinition is four component expressions in (u, v) over a rectangular
chart. The rotational family
    z(u, v) = (f(u) cos(a v), f(u) sin(a v), g(u) cos(b v), g(u) sin(b v))
gets dedicated support: a builder with regularity checks and a closed-form
report of all pointwise quantities, which the numeric pipeline is tested
against. Definitions can also be loaded from JSON files or named builtins.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple
from urllib.parse import parse_qs

import numpy as np

from .expr import (
    BinOp,
    Call,
    DomainError,
    Expression,
    Num,
    ParseError,
    Var,
    evaluate_jet,
    parse_expression,
)
from .geometry import SurfaceJet


class SurfaceError(Exception):
    """Base class for surface construction and evaluation failures."""


class SurfaceSpecError(SurfaceError):
    """A surface description is malformed or defines a degenerate surface."""


class OutOfDomainError(SurfaceError):
    """Evaluation was requested outside the declared chart rectangle."""


@dataclass(frozen=True)
class SurfaceDefinition:
    """Four component expressions over a rectangular (u, v) chart."""

    name: str
    components: Tuple[Expression, Expression, Expression, Expression]
    constants: Dict[str, float]
    u_domain: Tuple[float, float]
    v_domain: Tuple[float, float]


@dataclass(frozen=True)
class RotationalParams:
    """Profile functions and angular speeds of a rotational surface.

    f_expr and g_expr are expressions in u alone; alpha and beta are the two
    rotation speeds. Constants referenced by the expressions are bound here.
    """

    f_expr: str
    g_expr: str
    alpha: float
    beta: float
    constants: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class ClosedFormReport:
    """Analytically evaluated pointwise quantities of a rotational surface."""

    E: float
    F: float
    G: float
    L: float
    M: float
    N: float
    k: float
    kappa: float
    gauss: float


def _contains_var(node, name: str) -> bool:
    if isinstance(node, Var):
        return node.name == name
    if isinstance(node, BinOp):
        return _contains_var(node.left, name) or _contains_var(node.right,
                                                               name)
    for attr in ("operand", "arg"):
        child = getattr(node, attr, None)
        if child is not None:
            return _contains_var(child, name)
    return False


def _parse_profile(text: str, constants: Dict[str, float], label: str):
    try:
        ast = parse_expression(text, constants=set(constants))
    except ParseError as e:
        raise SurfaceSpecError(f"{label}: {e}") from e
    if _contains_var(ast, "v"):
        raise SurfaceSpecError(f"{label} must depend on u only")
    return ast


def _profile_jets(params: RotationalParams, u: float):
    f_ast = _parse_profile(params.f_expr, params.constants, "f")
    g_ast = _parse_profile(params.g_expr, params.constants, "g")
    fj = evaluate_jet(f_ast, u, 0.0, params.constants)
    gj = evaluate_jet(g_ast, u, 0.0, params.constants)
    return fj, gj


def make_rotational(params: RotationalParams,
                    u_domain: Tuple[float, float] = (0.5, 2.0),
                    v_domain: Optional[Tuple[float, float]] = None
                    ) -> SurfaceDefinition:
    """Build the rotational surface definition, checking regularity.

    The profile expressions are parsed and the induced metric is sampled
    across u_domain; a vanishing E = f'^2 + g'^2 or G = a^2 f^2 + b^2 g^2
    anywhere on the sample grid rejects the surface.
    """
    a, b = params.alpha, params.beta
    for label, val in (("alpha", a), ("beta", b)):
        if not (math.isfinite(val) and val != 0.0):
            raise SurfaceSpecError(f"{label} must be finite and nonzero")
    if not (math.isfinite(u_domain[0]) and math.isfinite(u_domain[1])
            and u_domain[0] < u_domain[1]):
        raise SurfaceSpecError(f"bad u domain {u_domain!r}")
    if v_domain is None:
        v_domain = (0.0, 2.0 * math.pi)

    f_ast = _parse_profile(params.f_expr, params.constants, "f")
    g_ast = _parse_profile(params.g_expr, params.constants, "g")

    for u in np.linspace(u_domain[0], u_domain[1], 33):
        try:
            fj = evaluate_jet(f_ast, float(u), 0.0, params.constants)
            gj = evaluate_jet(g_ast, float(u), 0.0, params.constants)
        except DomainError as e:
            raise SurfaceSpecError(
                f"profile undefined at u={float(u)!r}: {e}") from e
        E = fj.du ** 2 + gj.du ** 2
        G = (a * fj.val) ** 2 + (b * gj.val) ** 2
        if E * G <= 1e-24:
            raise SurfaceSpecError(
                f"surface degenerate near u={float(u)!r} (E={E!r}, G={G!r})")

    def circle(fn: str, speed: float) -> Expression:
        return Call(fn, BinOp("*", Num(speed), Var("v")))

    components = (
        BinOp("*", f_ast, circle("cos", a)),
        BinOp("*", f_ast, circle("sin", a)),
        BinOp("*", g_ast, circle("cos", b)),
        BinOp("*", g_ast, circle("sin", b)),
    )
    return SurfaceDefinition(name="rotational", components=components,
                             constants=dict(params.constants),
                             u_domain=(float(u_domain[0]),
                                       float(u_domain[1])),
                             v_domain=(float(v_domain[0]),
                                       float(v_domain[1])))


def rotational_closed_form(params: RotationalParams,
                           u: float) -> ClosedFormReport:
    """Pointwise quantities of the rotational surface, no numerics.

    With p = g f' - f g', q = g' f'' - f' g'', r = b^2 g f' - a^2 f g':
        E = f'^2 + g'^2        G = a^2 f^2 + b^2 g^2        F = 0
        L = 2 a b p q / (E G)  M = 0   N = -2 a b p r / (E G)
        k = -4 a^2 b^2 p^2 q r / (E^3 G^3)
        kappa = a b p (G q - E r) / (E^2 G^2)
        K = (G q r - a^2 b^2 E p^2) / (E^2 G^2)
    """
    fj, gj = _profile_jets(params, u)
    a, b = params.alpha, params.beta
    f, fp, fpp = fj.val, fj.du, fj.duu
    g, gp, gpp = gj.val, gj.du, gj.duu

    E = fp * fp + gp * gp
    G = a * a * f * f + b * b * g * g
    if E * G <= 1e-24:
        raise SurfaceSpecError(
            f"surface degenerate at u={u!r} (E={E!r}, G={G!r})")
    p = g * fp - f * gp
    q = gp * fpp - fp * gpp
    r = b * b * g * fp - a * a * f * gp

    ab = a * b
    L = 2.0 * ab * p * q / (E * G)
    N = -2.0 * ab * p * r / (E * G)
    k = -4.0 * ab * ab * p * p * q * r / (E * G) ** 3
    kappa = ab * p * (G * q - E * r) / (E * G) ** 2
    gauss = (G * q * r - ab * ab * E * p * p) / (E * G) ** 2
    return ClosedFormReport(E=E, F=0.0, G=G, L=L, M=0.0, N=N,
                            k=k, kappa=kappa, gauss=gauss)


def helix_frenet_closed_form(a: float, b: float, alpha: float,
                             beta: float) -> Tuple[float, float, float]:
    """Frenet curvatures of t -> (a cos at', ...)-style double helix.

    The curve is (a cos(alpha t), a sin(alpha t), b cos(beta t),
    b sin(beta t)); the three curvatures, as rotation rates per unit of the
    curve parameter, are constant:
        k1 = sqrt((a^2 alpha^4 + b^2 beta^4) / (a^2 alpha^2 + b^2 beta^2))
        k2 = a b alpha beta (alpha^2 - beta^2)
             / (sqrt(a^2 alpha^4 + b^2 beta^4) sqrt(a^2 alpha^2 + b^2 beta^2))
        k3 = alpha beta sqrt(a^2 alpha^2 + b^2 beta^2)
             / sqrt(a^2 alpha^4 + b^2 beta^4)
    The second and third values only name frame rotation rates when the
    curve actually spans four dimensions (a b alpha beta (alpha^2 - beta^2)
    nonzero); degenerate speed parameters are rejected.
    """
    s2 = a * a * alpha * alpha + b * b * beta * beta
    t2 = a * a * alpha ** 4 + b * b * beta ** 4
    if s2 <= 0.0 or t2 <= 0.0:
        raise SurfaceSpecError("degenerate helix parameters")
    k1 = math.sqrt(t2 / s2)
    k2 = a * b * alpha * beta * (alpha * alpha - beta * beta) \
        / math.sqrt(t2) / math.sqrt(s2)
    k3 = alpha * beta * math.sqrt(s2) / math.sqrt(t2)
    return k1, k2, k3


def surface_jet(defn: SurfaceDefinition, u: float, v: float) -> SurfaceJet:
    """Order-2 jet of the parametrization at (u, v), domain checked."""
    (u0, u1), (v0, v1) = defn.u_domain, defn.v_domain
    if not (u0 <= u <= u1 and v0 <= v <= v1):
        raise OutOfDomainError(
            f"(u, v) = ({u!r}, {v!r}) outside "
            f"[{u0!r}, {u1!r}] x [{v0!r}, {v1!r}]")
    jets = [evaluate_jet(c, u, v, defn.constants) for c in defn.components]
    return SurfaceJet(
        u=u, v=v,
        z=np.array([j.val for j in jets]),
        z_u=np.array([j.du for j in jets]),
        z_v=np.array([j.dv for j in jets]),
        z_uu=np.array([j.duu for j in jets]),
        z_uv=np.array([j.duv for j in jets]),
        z_vv=np.array([j.dvv for j in jets]),
    )


# ---------------------------------------------------------------------------
# loading: JSON files and builtins

def _parse_components(texts, constants: Dict[str, float]):
    parsed = []
    for i, text in enumerate(texts):
        if not isinstance(text, str):
            raise SurfaceSpecError(f"component {i + 1} must be a string")
        try:
            parsed.append(parse_expression(text, constants=set(constants)))
        except ParseError as e:
            raise SurfaceSpecError(f"component {i + 1}: {e}") from e
    return tuple(parsed)


def _parse_interval(obj, label: str) -> Tuple[float, float]:
    if (not isinstance(obj, list) or len(obj) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                       for x in obj)):
        raise SurfaceSpecError(f"domain.{label} must be [lo, hi]")
    lo, hi = float(obj[0]), float(obj[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise SurfaceSpecError(f"domain.{label}: need lo < hi, both finite")
    return lo, hi


def surface_from_dict(data: dict, name: str = "surface"
                      ) -> SurfaceDefinition:
    """Build a definition from the JSON object form.

    Required keys: "components" (four expression strings) and "domain"
    ({"u": [lo, hi], "v": [lo, hi]}). Optional: "name", "constants".
    Unknown keys are rejected.
    """
    if not isinstance(data, dict):
        raise SurfaceSpecError("surface description must be a JSON object")
    unknown = set(data) - {"name", "components", "constants", "domain"}
    if unknown:
        raise SurfaceSpecError(f"unknown keys: {', '.join(sorted(unknown))}")
    if "components" not in data or "domain" not in data:
        raise SurfaceSpecError('"components" and "domain" are required')

    comps = data["components"]
    if not isinstance(comps, list) or len(comps) != 4:
        raise SurfaceSpecError('"components" must be a list of 4 strings')

    constants = data.get("constants", {})
    if not isinstance(constants, dict):
        raise SurfaceSpecError('"constants" must be an object')
    bound: Dict[str, float] = {}
    for key, val in constants.items():
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise SurfaceSpecError(f"constant {key!r} must be a number")
        bound[key] = float(val)

    domain = data["domain"]
    if not isinstance(domain, dict) or set(domain) != {"u", "v"}:
        raise SurfaceSpecError('"domain" must have exactly keys "u" and "v"')

    if "name" in data and not isinstance(data["name"], str):
        raise SurfaceSpecError('"name" must be a string')

    return SurfaceDefinition(
        name=data.get("name", name),
        components=_parse_components(comps, bound),
        constants=bound,
        u_domain=_parse_interval(domain["u"], "u"),
        v_domain=_parse_interval(domain["v"], "v"),
    )


def load_surface(path: str) -> SurfaceDefinition:
    """Read a surface definition from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise SurfaceSpecError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SurfaceSpecError(f"{path}: invalid JSON: {e}") from e
    stem = os.path.splitext(os.path.basename(path))[0]
    return surface_from_dict(data, name=stem)


_ROTATIONAL_KEYS = {"case", "a", "b", "c", "f", "g", "alpha", "beta",
                    "umin", "umax"}


def _query_floats(query: Dict[str, str], names, defaults):
    out = []
    for name, fallback in zip(names, defaults):
        if name in query:
            try:
                out.append(float(query[name]))
            except ValueError:
                raise SurfaceSpecError(
                    f"{name}={query[name]!r} is not a number") from None
        else:
            out.append(fallback)
    return out


def _builtin_rotational(query: Dict[str, str]) -> SurfaceDefinition:
    unknown = set(query) - _ROTATIONAL_KEYS
    if unknown:
        raise SurfaceSpecError(
            f"unknown rotational parameters: {', '.join(sorted(unknown))}")
    case = query.get("case")
    if case is not None and case not in ("1", "2", "3"):
        raise SurfaceSpecError(f"case must be 1, 2 or 3, got {case!r}")

    alpha_default, beta_default = (1.0, 2.0) if case == "3" else (1.0, 1.0)
    alpha, beta, umin, umax = _query_floats(
        query, ("alpha", "beta", "umin", "umax"),
        (alpha_default, beta_default, 0.5, 2.0))

    if case == "1":
        (a,) = _query_floats(query, ("a",), (1.0,))
        f_text, g_text = "u", f"{a!r}*u"
    elif case == "2":
        a, b = _query_floats(query, ("a", "b"), (2.0, 1.0))
        f_text, g_text = "u", f"{a!r}*u+{b!r}"
    elif case == "3":
        (c,) = _query_floats(query, ("c",), (1.0,))
        exponent = beta * beta / (alpha * alpha)
        f_text, g_text = "u", f"{c!r}*u^{exponent!r}"
    else:
        f_text = g_text = None

    f_text = query.get("f", f_text)
    g_text = query.get("g", g_text)
    if f_text is None or g_text is None:
        raise SurfaceSpecError(
            "rotational builtin needs case=1|2|3 or explicit f= and g=")

    params = RotationalParams(f_expr=f_text, g_expr=g_text,
                              alpha=alpha, beta=beta)
    return make_rotational(params, u_domain=(umin, umax))


def _fixed_builtin(name: str, texts, u_domain, v_domain) -> SurfaceDefinition:
    return SurfaceDefinition(name=name,
                             components=_parse_components(texts, {}),
                             constants={}, u_domain=u_domain,
                             v_domain=v_domain)


def resolve_surface(token: str) -> SurfaceDefinition:
    """Turn a --surface argument into a definition.

    Accepts builtin URIs (builtin:plane, builtin:clifford,
    builtin:rotational?case=3&alpha=1&beta=2...) or a path to a JSON file.
    """
    if not token.startswith("builtin:"):
        return load_surface(token)

    rest = token[len("builtin:"):]
    name, _, raw_query = rest.partition("?")
    query: Dict[str, str] = {}
    if raw_query:
        try:
            pairs = parse_qs(raw_query, strict_parsing=True,
                             keep_blank_values=True)
        except ValueError as e:
            raise SurfaceSpecError(f"bad query {raw_query!r}: {e}") from e
        for key, values in pairs.items():
            if len(values) != 1:
                raise SurfaceSpecError(f"repeated parameter {key!r}")
            query[key] = values[0]

    if name in ("plane", "clifford"):
        if query:
            raise SurfaceSpecError(f"builtin:{name} takes no parameters")
        if name == "plane":
            return _fixed_builtin("plane", ("u", "v", "0", "0"),
                                  (-1e6, 1e6), (-1e6, 1e6))
        full_turn = (0.0, 2.0 * math.pi)
        return _fixed_builtin("clifford",
                              ("cos(u)", "sin(u)", "cos(v)", "sin(v)"),
                              full_turn, full_turn)
    if name == "rotational":
        return _builtin_rotational(query)
    raise SurfaceSpecError(f"unknown builtin surface {name!r}")
