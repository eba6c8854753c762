"""Shared jet builders for the test suite."""

import numpy as np

from surf4.geometry import SurfaceJet


def plane_jet(u, v):
    """Affine plane z = (u, v, 0, 0): everything second-order vanishes."""
    zero = np.zeros(4)
    return SurfaceJet(u=u, v=v,
                      z=np.array([u, v, 0.0, 0.0]),
                      z_u=np.array([1.0, 0.0, 0.0, 0.0]),
                      z_v=np.array([0.0, 1.0, 0.0, 0.0]),
                      z_uu=zero, z_uv=zero, z_vv=zero)


def clifford_jet(u, v):
    """Product of two unit circles: z = (cos u, sin u, cos v, sin v)."""
    cu, su, cv, sv = np.cos(u), np.sin(u), np.cos(v), np.sin(v)
    zero = np.zeros(4)
    return SurfaceJet(u=u, v=v,
                      z=np.array([cu, su, cv, sv]),
                      z_u=np.array([-su, cu, 0.0, 0.0]),
                      z_v=np.array([0.0, 0.0, -sv, cv]),
                      z_uu=np.array([-cu, -su, 0.0, 0.0]),
                      z_uv=zero,
                      z_vv=np.array([0.0, 0.0, -cv, -sv]))


def graph_jet(phi_hess, psi_hess):
    """Graph z = (u, v, phi, psi) at a critical point of phi and psi.

    phi_hess and psi_hess are the (symmetric) Hessians; first derivatives of
    phi and psi vanish, so E = G = 1, F = 0 and the frame is (e3, e4).
    """
    (puu, puv), (_, pvv) = phi_hess
    (quu, quv), (_, qvv) = psi_hess
    return SurfaceJet(u=0.0, v=0.0,
                      z=np.zeros(4),
                      z_u=np.array([1.0, 0.0, 0.0, 0.0]),
                      z_v=np.array([0.0, 1.0, 0.0, 0.0]),
                      z_uu=np.array([0.0, 0.0, puu, quu]),
                      z_uv=np.array([0.0, 0.0, puv, quv]),
                      z_vv=np.array([0.0, 0.0, pvv, qvv]))


def random_regular_jet(rng, min_area=1e-2):
    """Random jet with comfortably independent tangent vectors."""
    while True:
        z_u = rng.standard_normal(4)
        z_v = rng.standard_normal(4)
        E = z_u @ z_u
        G = z_v @ z_v
        F = z_u @ z_v
        if E * G - F * F > min_area:
            break
    return SurfaceJet(u=0.0, v=0.0,
                      z=rng.standard_normal(4),
                      z_u=z_u, z_v=z_v,
                      z_uu=rng.standard_normal(4),
                      z_uv=rng.standard_normal(4),
                      z_vv=rng.standard_normal(4))
