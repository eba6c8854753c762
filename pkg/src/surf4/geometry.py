"""Pointwise differential geometry of parametrized surfaces in R^4.

Everything here works on the order-2 jet of the parametrization at a single
point: the first fundamental form, an oriented orthonormal normal frame, the
three oriented-area coefficients L, M, N extracted from the second fundamental
tensor, the Weingarten-type map they induce, the scalar invariants k and kappa,
the Gauss curvature, and the asymptotic / principal direction fields. All
functions are pure; tolerances enter only through an explicit Tolerances
bundle.

Conventions. A tangent direction (lambda, mu) stands for the vector
lambda z_u + mu z_v. The normal frame {e1, e2} is orthonormal and oriented so
that det[z_u, z_v, e1, e2] > 0; L, M, N are invariant under rotations of such
a frame and flip sign together when the orientation flips, so every quantity
built from them is well defined once the orientation rule is fixed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Tuple, Union

import numpy as np


class GeometryError(Exception):
    """Base class for pointwise geometry failures."""


class DegenerateSurfaceError(GeometryError):
    """The parametrization is singular at the point (EG - F^2 ~ 0)."""


class UndefinedConjugateError(GeometryError):
    """Conjugacy does not determine a direction (flat or degenerate input)."""


class NumericInconsistencyError(GeometryError):
    """A quantity violated an identity beyond numerical tolerance."""


class ZeroDirectionError(GeometryError):
    """A tangent direction must have a nonzero coefficient pair."""


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used by classification and root extraction.

    eps_reg bounds sqrt(EG - F^2) from below; eps_flat tests max(|L|,|M|,|N|)
    for flatness; eps_cls separates the sign classes of k; eps_disc decides
    when a quadratic discriminant (coefficients normalized to unit maximum)
    counts as zero.
    """

    eps_reg: float = 1e-12
    eps_flat: float = 1e-9
    eps_cls: float = 1e-9
    eps_disc: float = 1e-10


DEFAULT_TOLERANCES = Tolerances()


class PointClass(enum.Enum):
    FLAT = "Flat"
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"


class _AllDirections:
    """Marker: every tangent direction satisfies the equation."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "AllDirections"


ALL_DIRECTIONS = _AllDirections()


# ---------------------------------------------------------------------------
# value types

@dataclass(frozen=True)
class SurfaceJet:
    """Position and partial derivatives of the parametrization at a point."""

    u: float
    v: float
    z: np.ndarray
    z_u: np.ndarray
    z_v: np.ndarray
    z_uu: np.ndarray
    z_uv: np.ndarray
    z_vv: np.ndarray


@dataclass(frozen=True)
class FirstForm:
    E: float
    F: float
    G: float
    W: float  # sqrt(EG - F^2)

    def value(self, d: "TangentDirection") -> float:
        """I(d) = E lambda^2 + 2F lambda mu + G mu^2."""
        return (self.E * d.lam * d.lam + 2.0 * self.F * d.lam * d.mu
                + self.G * d.mu * d.mu)

    def inner(self, d1: "TangentDirection", d2: "TangentDirection") -> float:
        return (self.E * d1.lam * d2.lam
                + self.F * (d1.lam * d2.mu + d1.mu * d2.lam)
                + self.G * d1.mu * d2.mu)


@dataclass(frozen=True)
class NormalFrame:
    e1: np.ndarray
    e2: np.ndarray


@dataclass(frozen=True)
class SecondFormCoeffs:
    """Second fundamental tensor components and the L, M, N coefficients.

    c[i, j, m] = <z_ij, e_m> for i, j indexing (u, v) and m indexing (e1, e2).
    L, M, N are the three 2x2 oriented areas of column pairs of c divided by
    W, with the doubling of the outer two kept exactly as defined:
    L = 2 Delta1 / W, M = Delta2 / W, N = 2 Delta3 / W.
    """

    c: np.ndarray  # shape (2, 2, 2), symmetric in the first two indices
    L: float
    M: float
    N: float


@dataclass(frozen=True)
class TangentDirection:
    """Projective tangent direction (lambda : mu) in the chart basis."""

    lam: float
    mu: float

    def canonical(self) -> "TangentDirection":
        """Scale so max(|lam|, |mu|) = 1 and the first nonzero is positive."""
        m = max(abs(self.lam), abs(self.mu))
        if m == 0.0:
            raise ZeroDirectionError("zero tangent direction")
        lam, mu = self.lam / m, self.mu / m
        if lam < 0.0 or (lam == 0.0 and mu < 0.0):
            lam, mu = -lam, -mu
        return TangentDirection(lam + 0.0, mu + 0.0)


@dataclass(frozen=True)
class WeingartenMap:
    """Components of the map gamma in the basis (z_u, z_v)."""

    g11: float  # gamma_1^1
    g12: float  # gamma_1^2
    g21: float  # gamma_2^1
    g22: float  # gamma_2^2

    def apply(self, d: TangentDirection) -> TangentDirection:
        return TangentDirection(self.g11 * d.lam + self.g21 * d.mu,
                                self.g12 * d.lam + self.g22 * d.mu)

    def det(self) -> float:
        return self.g11 * self.g22 - self.g12 * self.g21

    def trace(self) -> float:
        return self.g11 + self.g22


@dataclass(frozen=True)
class PointInvariants:
    k: float
    kappa: float
    gauss: float
    point_class: PointClass
    nu1: float
    nu2: float


@dataclass(frozen=True)
class FormBundle:
    """Everything pointwise analysis needs, computed once from a jet."""

    jet: SurfaceJet
    first: FirstForm
    frame: NormalFrame
    second: SecondFormCoeffs


# ---------------------------------------------------------------------------
# forms and frame

def first_form(jet: SurfaceJet,
               tol: Tolerances = DEFAULT_TOLERANCES) -> FirstForm:
    """Coefficients of the induced metric, with the regularity check.

    Raises DegenerateSurfaceError unless E > 0, G > 0 and
    EG - F^2 > eps_reg^2.
    """
    E = float(jet.z_u @ jet.z_u)
    F = float(jet.z_u @ jet.z_v)
    G = float(jet.z_v @ jet.z_v)
    disc = E * G - F * F
    if not (math.isfinite(disc) and E > 0.0 and G > 0.0
            and disc > tol.eps_reg ** 2):
        raise DegenerateSurfaceError(
            f"parametrization degenerate: E={E!r} G={G!r} EG-F^2={disc!r}")
    return FirstForm(E, F, G, math.sqrt(disc))


def normal_frame(jet: SurfaceJet,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> NormalFrame:
    """Orthonormal basis of the normal plane, positively oriented.

    Gram-Schmidt over the standard basis of R^4, pivoting on the largest
    residual after projecting out the tangent plane; e2 is flipped if needed
    so that det[z_u, z_v, e1, e2] > 0.
    """
    t1 = jet.z_u / np.linalg.norm(jet.z_u)
    t2 = jet.z_v - (jet.z_v @ t1) * t1
    nt2 = np.linalg.norm(t2)
    if nt2 <= tol.eps_reg:
        raise DegenerateSurfaceError("tangent vectors are parallel")
    t2 = t2 / nt2

    basis = [t1, t2]
    normals = []
    for _ in range(2):
        best, best_norm = None, -1.0
        for i in range(4):
            r = np.zeros(4)
            r[i] = 1.0
            for b in basis:
                r = r - (r @ b) * b
            n = np.linalg.norm(r)
            if n > best_norm:
                best, best_norm = r, n
        if best_norm <= tol.eps_reg:
            raise DegenerateSurfaceError("normal plane collapsed")
        e = best / best_norm
        basis.append(e)
        normals.append(e)

    e1, e2 = normals
    if np.linalg.det(np.column_stack([jet.z_u, jet.z_v, e1, e2])) < 0.0:
        e2 = -e2
    return NormalFrame(e1, e2)


def second_form_coeffs(jet: SurfaceJet, frame: NormalFrame,
                       ff: FirstForm) -> SecondFormCoeffs:
    """Normal components of the second derivatives and the L, M, N areas."""
    c = np.empty((2, 2, 2))
    seconds = ((0, 0, jet.z_uu), (0, 1, jet.z_uv), (1, 1, jet.z_vv))
    for i, j, z in seconds:
        for m, e in enumerate((frame.e1, frame.e2)):
            c[i, j, m] = c[j, i, m] = float(z @ e)

    delta1 = c[0, 0, 0] * c[0, 1, 1] - c[0, 1, 0] * c[0, 0, 1]
    delta2 = c[0, 0, 0] * c[1, 1, 1] - c[1, 1, 0] * c[0, 0, 1]
    delta3 = c[0, 1, 0] * c[1, 1, 1] - c[1, 1, 0] * c[0, 1, 1]
    return SecondFormCoeffs(
        c=c,
        L=2.0 * delta1 / ff.W,
        M=delta2 / ff.W,
        N=2.0 * delta3 / ff.W,
    )


def form_bundle(jet: SurfaceJet,
                tol: Tolerances = DEFAULT_TOLERANCES) -> FormBundle:
    ff = first_form(jet, tol)
    frame = normal_frame(jet, tol)
    return FormBundle(jet, ff, frame, second_form_coeffs(jet, frame, ff))


# ---------------------------------------------------------------------------
# Weingarten-type map and scalar invariants

def weingarten(ff: FirstForm, sfc: SecondFormCoeffs) -> WeingartenMap:
    """The map gamma with -g(gamma X, X) = L l^2 + 2M l m + N m^2."""
    E, F, G = ff.E, ff.F, ff.G
    L, M, N = sfc.L, sfc.M, sfc.N
    d = E * G - F * F
    return WeingartenMap(
        g11=(F * M - G * L) / d,
        g12=(F * L - E * M) / d,
        g21=(F * N - G * M) / d,
        g22=(F * M - E * N) / d,
    )


def invariants(ff: FirstForm, sfc: SecondFormCoeffs) -> Tuple[float, float]:
    """The two scalar invariants (k, kappa) of the point."""
    d = ff.E * ff.G - ff.F * ff.F
    k = (sfc.L * sfc.N - sfc.M * sfc.M) / d
    kappa = (ff.E * sfc.N + ff.G * sfc.L - 2.0 * ff.F * sfc.M) / (2.0 * d)
    return k, kappa


def gauss_curvature(jet: SurfaceJet, ff: FirstForm) -> float:
    """Gauss curvature of the induced metric.

    Uses the normal components of the second derivatives directly (projection
    off the tangent plane), so no normal frame enters:
    K = (<s11, s22> - <s12, s12>) / (EG - F^2).
    """
    gram = np.array([[ff.E, ff.F], [ff.F, ff.G]])

    def normal_part(z):
        rhs = np.array([z @ jet.z_u, z @ jet.z_v])
        a, b = np.linalg.solve(gram, rhs)
        return z - a * jet.z_u - b * jet.z_v

    s11 = normal_part(jet.z_uu)
    s12 = normal_part(jet.z_uv)
    s22 = normal_part(jet.z_vv)
    return float((s11 @ s22 - s12 @ s12) / (ff.W * ff.W))


# ---------------------------------------------------------------------------
# tangent direction functionals

def _check_nonzero(d: TangentDirection):
    if d.lam == 0.0 and d.mu == 0.0:
        raise ZeroDirectionError("zero tangent direction")


def second_form_bilinear(sfc: SecondFormCoeffs, d1: TangentDirection,
                         d2: TangentDirection) -> float:
    """The symmetric bilinear extension of L l^2 + 2M l m + N m^2."""
    return (sfc.L * d1.lam * d2.lam
            + sfc.M * (d1.lam * d2.mu + d1.mu * d2.lam)
            + sfc.N * d1.mu * d2.mu)


def zeta(ff: FirstForm, sfc: SecondFormCoeffs, d1: TangentDirection,
         d2: TangentDirection) -> float:
    """Normalized pairing of two tangent directions; zero iff conjugate."""
    _check_nonzero(d1)
    _check_nonzero(d2)
    return (second_form_bilinear(sfc, d1, d2)
            / math.sqrt(ff.value(d1)) / math.sqrt(ff.value(d2)))


def normal_curvature(ff: FirstForm, sfc: SecondFormCoeffs,
                     d: TangentDirection) -> float:
    """nu(d) = zeta(d, d), the ratio of the two quadratic forms at d."""
    _check_nonzero(d)
    return second_form_bilinear(sfc, d, d) / ff.value(d)


def orthogonal_tangent(ff: FirstForm, d: TangentDirection) -> TangentDirection:
    """The +90 degree rotation of d in the tangent plane, I-norm preserving.

    Returned uncanonicalized: the orientation of the rotation carries sign
    information used by the geodesic torsion.
    """
    _check_nonzero(d)
    return TangentDirection(-(ff.F * d.lam + ff.G * d.mu) / ff.W,
                            (ff.E * d.lam + ff.F * d.mu) / ff.W)


def geodesic_torsion(ff: FirstForm, sfc: SecondFormCoeffs,
                     d: TangentDirection) -> float:
    """alpha(d) = zeta(d, d_perp), expanded in closed form."""
    _check_nonzero(d)
    E, F, G = ff.E, ff.F, ff.G
    L, M, N = sfc.L, sfc.M, sfc.N
    lam, mu = d.lam, d.mu
    num = (lam * lam * (E * M - F * L)
           + lam * mu * (E * N - G * L)
           + mu * mu * (F * N - G * M))
    return num / (ff.W * ff.value(d))


def conjugate_direction(sfc: SecondFormCoeffs, d: TangentDirection,
                        tol: Tolerances = DEFAULT_TOLERANCES
                        ) -> TangentDirection:
    """The direction conjugate to d, canonical.

    Solves the pairing L l l' + M (l m' + m l') + N m m' = 0 for (l', m');
    the solution is proportional to (-(M l + N m), L l + M m). Raises
    UndefinedConjugateError when that pair vanishes (flat point, or d in the
    kernel of the pairing).
    """
    _check_nonzero(d)
    a = -(sfc.M * d.lam + sfc.N * d.mu)
    b = sfc.L * d.lam + sfc.M * d.mu
    scale = (max(abs(sfc.L), abs(sfc.M), abs(sfc.N))
             * max(abs(d.lam), abs(d.mu)))
    if math.hypot(a, b) <= tol.eps_flat * max(scale, 1.0):
        raise UndefinedConjugateError(
            "conjugate direction undefined for this input")
    return TangentDirection(a, b).canonical()


# ---------------------------------------------------------------------------
# direction equations

DirectionsResult = Union[List[TangentDirection], _AllDirections]


def _sorted_canonical(dirs) -> List[TangentDirection]:
    # quantized keys keep the order deterministic when two roots agree in a
    # component up to roundoff (e.g. canonical (1, 1) vs (1, -1) where one
    # lam lands on 1.0 and the other a few ulp below)
    def key(d: TangentDirection):
        return (round(d.lam / 1e-12), round(d.mu / 1e-12))

    return sorted((d.canonical() for d in dirs), key=key, reverse=True)


def _homogeneous_roots(A: float, B: float, C: float,
                       eps_disc: float) -> List[TangentDirection]:
    """Real roots of A l^2 + B l m + C m^2 = 0, raw (not canonical).

    Coefficients are normalized to unit maximum before the eps_disc zero
    tests, so the thresholds are scale-free. The identically-zero case is the
    caller's business; here at least one coefficient is nonzero.
    """
    scale = max(abs(A), abs(B), abs(C))
    a, b, c = A / scale, B / scale, C / scale
    if abs(a) <= eps_disc:
        if abs(b) <= eps_disc:
            # c m^2 = 0: the direction mu = 0, doubly
            return [TangentDirection(1.0, 0.0)] * 2
        # l (b m) = 0 after deflation: mu = 0 is one root
        return [TangentDirection(1.0, 0.0), TangentDirection(-c, b)]
    disc = b * b - 4.0 * a * c
    if abs(disc) <= eps_disc:
        return [TangentDirection(-b, 2.0 * a)] * 2
    if disc < 0.0:
        return []
    s = math.sqrt(disc)
    # |q| = (|b| + s) / 2 > 0 here, so both quotient forms are safe
    q = -0.5 * (b + math.copysign(s, b if b != 0.0 else 1.0))
    return [TangentDirection(q, a), TangentDirection(c, q)]


def asymptotic_directions(sfc: SecondFormCoeffs,
                          tol: Tolerances = DEFAULT_TOLERANCES
                          ) -> DirectionsResult:
    """Directions with L l^2 + 2M l m + N m^2 = 0, canonical, sorted.

    Count follows the sign of LN - M^2: positive none, negative two, zero one
    (double). At a flat point every direction qualifies and the marker is
    returned.
    """
    L, M, N = sfc.L, sfc.M, sfc.N
    if max(abs(L), abs(M), abs(N)) < tol.eps_flat:
        return ALL_DIRECTIONS
    roots = _sorted_canonical(_homogeneous_roots(L, 2.0 * M, N,
                                                 tol.eps_disc))
    # a double root is one direction: collapse the repeated entry
    if len(roots) == 2 and roots[0] == roots[1]:
        return roots[:1]
    return roots


def principal_directions(ff: FirstForm, sfc: SecondFormCoeffs,
                         tol: Tolerances = DEFAULT_TOLERANCES
                         ) -> DirectionsResult:
    """Directions of vanishing geodesic torsion, canonical, sorted.

    The equation (EM - FL) l^2 + (EN - GL) l m + (FN - GM) m^2 = 0 has two
    real roots counted with multiplicity whenever it is not identically zero;
    identically zero (the two forms are proportional) yields the marker.
    A negative discriminant beyond tolerance is a numeric inconsistency.
    """
    A = ff.E * sfc.M - ff.F * sfc.L
    B = ff.E * sfc.N - ff.G * sfc.L
    C = ff.F * sfc.N - ff.G * sfc.M
    scale_bound = (max(abs(ff.E), abs(ff.F), abs(ff.G))
                   * max(abs(sfc.L), abs(sfc.M), abs(sfc.N)))
    if max(abs(A), abs(B), abs(C)) <= tol.eps_flat * max(scale_bound, 1.0):
        return ALL_DIRECTIONS
    roots = _homogeneous_roots(A, B, C, tol.eps_disc)
    if not roots:
        raise NumericInconsistencyError(
            "principal direction equation produced complex roots")
    return _sorted_canonical(roots)


# ---------------------------------------------------------------------------
# classification

def classify_point(ff: FirstForm, sfc: SecondFormCoeffs,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> PointInvariants:
    """Scalar invariants, Gauss curvature, point class, and the two normal
    curvature extremes nu1 >= nu2 (roots of x^2 - 2 kappa x + k).

    Flatness is max(|L|, |M|, |N|) < eps_flat; otherwise the sign of k
    against eps_cls separates Elliptic / Parabolic / Hyperbolic.
    """
    k, kappa = invariants(ff, sfc)
    # <s_ij, s_kl> in the frame coordinates: sums over the two normal slots
    c = sfc.c
    gauss = float((c[0, 0] @ c[1, 1] - c[0, 1] @ c[0, 1])
                  / (ff.W * ff.W))

    if max(abs(sfc.L), abs(sfc.M), abs(sfc.N)) < tol.eps_flat:
        cls = PointClass.FLAT
    elif k > tol.eps_cls:
        cls = PointClass.ELLIPTIC
    elif k < -tol.eps_cls:
        cls = PointClass.HYPERBOLIC
    else:
        cls = PointClass.PARABOLIC

    disc = 4.0 * kappa * kappa - 4.0 * k
    if disc < 0.0:
        if disc < -tol.eps_disc:
            raise NumericInconsistencyError(
                f"kappa^2 - k = {disc / 4.0!r} < 0")
        disc = 0.0
    half = 0.5 * math.sqrt(disc)
    return PointInvariants(k=k, kappa=kappa, gauss=gauss, point_class=cls,
                           nu1=kappa + half, nu2=kappa - half)
