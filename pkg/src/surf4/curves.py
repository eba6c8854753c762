"""Tracing direction fields on a surface and Frenet analysis of the traces.

A direction field (asymptotic or principal) assigns each point of the surface
at most two tangent lines. integrate_line follows one branch with a
fixed-step RK4 integrator, keeping unit speed in R^4, so successive samples
are spaced one step apart in arc length. frenet_curvatures then recovers the
first three Frenet curvatures of any uniformly sampled curve from finite
differences, as rotation rates per unit of the sample parameter; for
unit-speed samples these are the classical arc-length curvatures.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .expr import DomainError
from .geometry import (
    ALL_DIRECTIONS,
    DEFAULT_TOLERANCES,
    DegenerateSurfaceError,
    FormBundle,
    NumericInconsistencyError,
    TangentDirection,
    Tolerances,
    asymptotic_directions,
    form_bundle,
    principal_directions,
)
from .surfaces import OutOfDomainError, SurfaceDefinition, surface_jet

#: Relative residual below which a derivative is treated as linearly
#: dependent on the lower-order ones, ending the Frenet frame.
DEFAULT_FRAME_TOL = 1e-6


class CurveError(Exception):
    """Base class for tracing and Frenet analysis failures."""


class DegenerateFieldError(CurveError):
    """The field does not single out finitely many directions here."""


class NoRealDirectionError(CurveError):
    """The field equation has no real solutions here (elliptic point)."""


class DegenerateFrameError(CurveError):
    """The curve is too degenerate to carry even a tangent frame."""


class InsufficientSamplesError(CurveError):
    """Not enough samples for the requested finite-difference analysis."""


class FieldKind(enum.Enum):
    ASYMPTOTIC = "asymptotic"
    PRINCIPAL = "principal"


class TraceStatus(enum.Enum):
    COMPLETED = "completed"
    HIT_BOUNDARY = "hit-boundary"
    DEGENERATE_FIELD = "degenerate-field"
    STEP_FAILURE = "step-failure"


@dataclass(frozen=True)
class CurveTrace:
    """Committed samples of a traced field line.

    params holds (u, v) rows, points the surface positions, tangents the
    unit-speed chart velocities actually followed. A trace that stops early
    keeps every fully completed step and reports why it stopped.
    """

    params: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    status: TraceStatus
    detail: str = ""


@dataclass(frozen=True)
class FrenetSamples:
    """Frenet curvatures per interior sample; unemitted levels are None.

    kappa1 >= 0 and kappa3 >= 0 by construction; kappa2 carries the sign of
    the oriented 4-volume of the derivative frame when that volume is
    resolvable, and is reported nonnegative otherwise.
    """

    kappa1: np.ndarray
    kappa2: Optional[np.ndarray]
    kappa3: Optional[np.ndarray]


def _field_roots(bundle: FormBundle, kind: FieldKind, tol: Tolerances):
    if kind is FieldKind.ASYMPTOTIC:
        roots = asymptotic_directions(bundle.second, tol)
    else:
        roots = principal_directions(bundle.first, bundle.second, tol)
    if roots is ALL_DIRECTIONS:
        raise DegenerateFieldError(
            f"{kind.value} field undetermined (every direction qualifies)")
    if not roots:
        raise NoRealDirectionError(f"no real {kind.value} direction")
    return roots


def _unit_velocity(bundle: FormBundle, kind: FieldKind, tol: Tolerances,
                   branch: int = 1,
                   ref: Optional[np.ndarray] = None) -> np.ndarray:
    """Chart velocity of unit R^4 speed along the field, aligned with ref."""
    roots = _field_roots(bundle, kind, tol)
    ff = bundle.first
    if ref is None:
        d = roots[min(branch, len(roots)) - 1]
    else:
        ref_dir = TangentDirection(float(ref[0]), float(ref[1]))
        d = max(roots, key=lambda r: abs(ff.inner(ref_dir, r))
                / math.sqrt(ff.value(r)))
    vec = np.array([d.lam, d.mu]) / math.sqrt(ff.value(d))
    if ref is not None and ff.inner(
            TangentDirection(float(ref[0]), float(ref[1])),
            TangentDirection(float(vec[0]), float(vec[1]))) < 0.0:
        vec = -vec
    return vec


def direction_at(defn: SurfaceDefinition, u: float, v: float,
                 kind: FieldKind, branch: int = 1,
                 prev: Optional[TangentDirection] = None,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> TangentDirection:
    """Field direction at a point.

    Without prev, the requested branch of the canonically sorted roots,
    canonical. With prev, the root closest in angle to prev, unit I-norm and
    sign-aligned with it.
    """
    bundle = form_bundle(surface_jet(defn, u, v), tol)
    if prev is None:
        roots = _field_roots(bundle, kind, tol)
        return roots[min(branch, len(roots)) - 1]
    vec = _unit_velocity(bundle, kind, tol, branch,
                         np.array([prev.lam, prev.mu]))
    return TangentDirection(float(vec[0]), float(vec[1]))


def integrate_line(defn: SurfaceDefinition, u0: float, v0: float,
                   kind: FieldKind, branch: int = 1, step: float = 1e-2,
                   steps: int = 100,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> CurveTrace:
    """Trace a field line with classical RK4 at fixed step size.

    The velocity has unit R^4 norm, so committed samples are one step apart
    in arc length up to integration error. Each RK4 stage re-solves the
    field equation and aligns the root with the previous stage, so the trace
    follows one coherent branch. A step whose stages or endpoint leave the
    chart is discarded entirely and the trace reports hit-boundary; field
    degeneracy or evaluation failure at the seed raises, later on it stops
    the trace with the corresponding status.
    """
    if step <= 0.0 or steps < 1:
        raise ValueError("step must be positive and steps >= 1")
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2")

    seed_bundle = form_bundle(surface_jet(defn, u0, v0), tol)
    ref = _unit_velocity(seed_bundle, kind, tol, branch)

    params = [np.array([u0, v0], dtype=float)]
    points = [np.asarray(seed_bundle.jet.z, dtype=float)]
    tangents = [ref]
    status, detail = TraceStatus.COMPLETED, ""

    def stage(pt: np.ndarray, align: np.ndarray):
        bundle = form_bundle(surface_jet(defn, float(pt[0]), float(pt[1])),
                             tol)
        return _unit_velocity(bundle, kind, tol, branch, align), bundle

    p = params[0]
    h = step
    for _ in range(steps):
        try:
            k1, _ = stage(p, ref)
            k2, _ = stage(p + 0.5 * h * k1, k1)
            k3, _ = stage(p + 0.5 * h * k2, k2)
            k4, _ = stage(p + h * k3, k3)
            p_next = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(p_next)):
                status, detail = TraceStatus.STEP_FAILURE, \
                    "step produced non-finite parameters"
                break
            t_next, bundle_next = stage(p_next, k4)
        except OutOfDomainError as e:
            status, detail = TraceStatus.HIT_BOUNDARY, str(e)
            break
        except (DegenerateFieldError, NoRealDirectionError,
                DegenerateSurfaceError) as e:
            status, detail = TraceStatus.DEGENERATE_FIELD, str(e)
            break
        except (DomainError, NumericInconsistencyError) as e:
            status, detail = TraceStatus.STEP_FAILURE, str(e)
            break
        params.append(p_next)
        points.append(np.asarray(bundle_next.jet.z, dtype=float))
        tangents.append(t_next)
        p, ref = p_next, t_next

    return CurveTrace(params=np.array(params), points=np.array(points),
                      tangents=np.array(tangents), status=status,
                      detail=detail)


# ---------------------------------------------------------------------------
# Frenet analysis of sampled curves

_STENCILS = (
    # (derivative order, offsets, weights, power of spacing)
    (1, (-1, 1), (-0.5, 0.5), 1),
    (2, (-1, 0, 1), (1.0, -2.0, 1.0), 2),
    (3, (-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5), 3),
    (4, (-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0), 4),
)


def _derivatives_at(pts: np.ndarray, i: int, h: float) -> np.ndarray:
    """d^j c / dt^j for j = 1..4 at index i, Richardson-extrapolated."""
    out = np.empty((4, pts.shape[1]))
    for row, (_, offs, weights, power) in enumerate(_STENCILS):
        fine = sum(w * pts[i + o] for o, w in zip(offs, weights)) / h ** power
        coarse = sum(w * pts[i + 2 * o] for o, w in zip(offs, weights)) \
            / (2.0 * h) ** power
        out[row] = (4.0 * fine - coarse) / 3.0
    return out


def frenet_curvatures(points: np.ndarray, arc_step: float,
                      frame_tol: float = DEFAULT_FRAME_TOL) -> FrenetSamples:
    """First three Frenet curvatures of a uniformly sampled curve in R^4.

    points is an (n, 4) array sampled at parameter spacing arc_step; nine
    samples are the minimum (the extrapolated stencils reach four indices to
    each side). With Q_j the volume of the parallelotope spanned by the
    first j derivatives, the curvatures per unit parameter are
        kappa1 = Q2 / Q1^2,
        kappa2 = sign(det) Q3 Q1 / Q2^2,
        kappa3 = Q4 Q2 / Q3^2.
    Level j is emitted only if the j-th derivative stays linearly
    independent from the lower ones (relative residual above frame_tol) at
    every interior sample; higher levels stop being reported after the first
    failure, which is how a circle reports kappa1, kappa2 and no kappa3.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 4:
        raise ValueError("points must be an (n, 4) array")
    if not (math.isfinite(arc_step) and arc_step > 0.0):
        raise ValueError("arc_step must be positive")
    n = pts.shape[0]
    if n < 9:
        raise InsufficientSamplesError(
            f"need at least 9 samples, got {n}")

    m = n - 8
    vols = np.empty((m, 4))
    dets = np.empty(m)
    healthy = np.ones((m, 4), dtype=bool)
    for idx, i in enumerate(range(4, n - 4)):
        d = _derivatives_at(pts, i, arc_step)
        A = d.T  # columns d1..d4
        r = np.abs(np.diag(np.linalg.qr(A, mode="r")))
        vols[idx] = np.cumprod(r)
        dets[idx] = np.linalg.det(A)
        speed = np.linalg.norm(d[0])
        for j in range(4):
            col_norm = np.linalg.norm(d[j])
            healthy[idx, j] = r[j] > frame_tol * max(col_norm,
                                                     speed ** (j + 1))

    level = 0
    for j in range(4):
        if not healthy[:, j].all():
            break
        level = j + 1

    if level < 1:
        raise DegenerateFrameError("tangent direction unresolvable")

    kappa1 = vols[:, 1] / vols[:, 0] ** 2
    kappa2 = kappa3 = None
    if level >= 2:
        kappa2 = vols[:, 2] * vols[:, 0] / vols[:, 1] ** 2
        if level >= 4:
            # the oriented 4-volume is resolvable: give kappa2 its sign
            kappa2 = kappa2 * np.where(dets < 0.0, -1.0, 1.0)
    if level >= 3:
        kappa3 = vols[:, 3] * vols[:, 1] / vols[:, 2] ** 2
    return FrenetSamples(kappa1=kappa1, kappa2=kappa2, kappa3=kappa3)


def is_constant_curvature(samples: FrenetSamples, tol: float = 1e-3) -> bool:
    """Whether every emitted curvature level is constant along the curve."""
    arrays = [a for a in (samples.kappa1, samples.kappa2, samples.kappa3)
              if a is not None]
    if len(samples.kappa1) < 5:
        raise InsufficientSamplesError(
            f"need at least 5 interior samples, got {len(samples.kappa1)}")
    for a in arrays:
        mean = float(np.mean(a))
        if float(np.max(np.abs(a - mean))) > tol * (1.0 + abs(mean)):
            return False
    return True
