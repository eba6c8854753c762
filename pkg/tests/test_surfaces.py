import json
import math

import numpy as np
import pytest

from conftest import clifford_jet
from surf4.geometry import PointClass, classify_point, form_bundle
from surf4.surfaces import (
    OutOfDomainError,
    RotationalParams,
    SurfaceSpecError,
    helix_frenet_closed_form,
    load_surface,
    make_rotational,
    resolve_surface,
    rotational_closed_form,
    surface_from_dict,
    surface_jet,
)


def close(got, want, rtol=1e-7, atol=1e-9):
    return abs(got - want) <= rtol * abs(want) + atol


def pipeline_point(defn, u, v):
    b = form_bundle(surface_jet(defn, u, v))
    inv = classify_point(b.first, b.second)
    return b, inv


def assert_report_matches(report, defn, u, v):
    b, inv = pipeline_point(defn, u, v)
    ff, sfc = b.first, b.second
    for got, want in ((ff.E, report.E), (ff.F, report.F), (ff.G, report.G),
                      (sfc.L, report.L), (sfc.M, report.M),
                      (sfc.N, report.N), (inv.k, report.k),
                      (inv.kappa, report.kappa), (inv.gauss, report.gauss)):
        assert close(got, want), (got, want, u, v)


# ---------------------------------------------------------------------------
# closed form against the numeric pipeline

def test_case1_is_flat_everywhere():
    for a in (0.5, 2.0, -3.0):
        params = RotationalParams("u", f"{a!r}*u", 1.3, 0.8)
        defn = make_rotational(params)
        for u in (0.5, 1.1, 2.0):
            report = rotational_closed_form(params, u)
            assert report.L == report.M == report.N == 0.0
            assert report.k == report.kappa == report.gauss == 0.0
            _, inv = pipeline_point(defn, u, 1.7)
            assert inv.point_class is PointClass.FLAT
            assert abs(inv.k) < 1e-12 and abs(inv.kappa) < 1e-12


def test_case2_signs_and_magnitudes():
    params = RotationalParams("u", "2*u+1", 1.0, 1.0)
    defn = make_rotational(params)
    for u in (0.5, 0.9, 1.4, 2.0):
        report = rotational_closed_form(params, u)
        assert report.k == 0.0
        assert report.L == 0.0 and report.M == 0.0
        # kappa = K = -1 / (5 G^2) on this profile
        want = -1.0 / (5.0 * report.G ** 2)
        assert close(report.kappa, want, rtol=1e-12, atol=0.0)
        assert close(report.gauss, want, rtol=1e-12, atol=0.0)
        assert_report_matches(report, defn, u, 2.5)


def test_case3_pinned_values():
    params = RotationalParams("u", "u^4", 1.0, 2.0)
    report = rotational_closed_form(params, 1.0)
    assert report.E == 17.0 and report.G == 5.0
    assert close(report.L, 144.0 / 85.0, rtol=1e-13, atol=0.0)
    assert report.N == 0.0
    assert abs(report.k) < 1e-15
    assert close(report.kappa, 72.0 / 1445.0, rtol=1e-13, atol=0.0)
    assert close(report.gauss, -36.0 / 425.0, rtol=1e-13, atol=0.0)

    defn = make_rotational(params)
    assert_report_matches(report, defn, 1.0, 0.9)
    _, inv = pipeline_point(defn, 1.0, 0.9)
    assert inv.point_class is PointClass.PARABOLIC
    assert abs(inv.nu2) < 1e-9  # one extreme normal curvature vanishes


def test_random_rotational_closed_form_matches_pipeline():
    rng = np.random.default_rng(101)
    checked = attempts = 0
    while checked < 60:
        attempts += 1
        assert attempts < 2000, "rotational sampler rejects everything"
        degree = int(rng.integers(1, 5))
        coeffs_f = [float(c) for c in rng.uniform(-2.0, 2.0, degree + 1)]
        coeffs_g = [float(c) for c in rng.uniform(-2.0, 2.0, degree + 1)]
        f_text = "+".join(f"{c!r}*u^{i}" for i, c in enumerate(coeffs_f))
        g_text = "+".join(f"{c!r}*u^{i}" for i, c in enumerate(coeffs_g))
        alpha, beta = rng.uniform(0.5, 3.0, 2)
        params = RotationalParams(f_text, g_text, float(alpha), float(beta))
        try:
            defn = make_rotational(params)
        except SurfaceSpecError:
            continue
        u = float(rng.uniform(0.5, 2.0))
        v = float(rng.uniform(0.0, 2.0 * math.pi))
        report = rotational_closed_form(params, u)
        assert report.F == 0.0 and report.M == 0.0
        assert_report_matches(report, defn, u, v)
        checked += 1


def test_rotational_constants_binding():
    params = RotationalParams("c*u", "u^2", 1.0, 1.0, constants={"c": 1.5})
    report = rotational_closed_form(params, 1.0)
    # f = 1.5u, f' = 1.5, g' = 2u: E = 1.5^2 + 4 at u = 1
    assert close(report.E, 6.25, rtol=1e-15, atol=0.0)
    defn = make_rotational(params)
    assert_report_matches(report, defn, 1.0, 0.3)


# ---------------------------------------------------------------------------
# helix closed form

def test_helix_pinned_triple():
    k1, k2, k3 = helix_frenet_closed_form(1.0, 1.0, 1.0, 2.0)
    assert close(k1, math.sqrt(17.0 / 5.0), rtol=1e-15, atol=0.0)
    assert close(k2, -6.0 / math.sqrt(85.0), rtol=1e-15, atol=0.0)
    assert close(k3, 2.0 * math.sqrt(5.0 / 17.0), rtol=1e-15, atol=0.0)


def test_helix_circle_reduction():
    # b = 0 collapses to a circle traversed at rate alpha
    k1, k2, _ = helix_frenet_closed_form(2.0, 0.0, 1.5, 0.7)
    assert close(k1, 1.5, rtol=1e-15, atol=0.0)
    assert k2 == 0.0
    with pytest.raises(SurfaceSpecError):
        helix_frenet_closed_form(0.0, 0.0, 1.0, 2.0)


# ---------------------------------------------------------------------------
# definitions, builtins, JSON

def test_clifford_builtin_matches_hand_jet():
    defn = resolve_surface("builtin:clifford")
    for u, v in ((0.0, 0.0), (0.7, 1.3), (3.1, 5.9)):
        got = surface_jet(defn, u, v)
        want = clifford_jet(u, v)
        for a, b in ((got.z, want.z), (got.z_u, want.z_u),
                     (got.z_v, want.z_v), (got.z_uu, want.z_uu),
                     (got.z_uv, want.z_uv), (got.z_vv, want.z_vv)):
            assert np.allclose(a, b, rtol=0.0, atol=1e-15)


def test_plane_builtin_is_flat():
    defn = resolve_surface("builtin:plane")
    _, inv = pipeline_point(defn, 12.0, -40.0)
    assert inv.point_class is PointClass.FLAT


def test_rotational_builtin_cases():
    defn = resolve_surface("builtin:rotational?case=3")
    params = RotationalParams("u", "1.0*u^4.0", 1.0, 2.0)
    want = make_rotational(params)
    for u, v in ((0.5, 0.0), (1.0, 2.0), (2.0, 6.0)):
        a, b = surface_jet(defn, u, v), surface_jet(want, u, v)
        assert np.allclose(a.z, b.z, rtol=0.0, atol=1e-15)
        assert np.allclose(a.z_uu, b.z_uu, rtol=0.0, atol=1e-15)

    defn = resolve_surface("builtin:rotational?case=2&umin=0.25&umax=3")
    assert defn.u_domain == (0.25, 3.0)

    defn = resolve_surface("builtin:rotational?f=u&g=u^2&alpha=2&beta=0.5")
    custom = make_rotational(RotationalParams("u", "u^2", 2.0, 0.5))
    j1, j2 = surface_jet(defn, 1.3, 1.0), surface_jet(custom, 1.3, 1.0)
    assert np.allclose(j1.z_v, j2.z_v, rtol=0.0, atol=1e-15)


def test_builtin_errors():
    for bad in ("builtin:torus",
                "builtin:plane?a=1",
                "builtin:rotational",
                "builtin:rotational?case=4",
                "builtin:rotational?case=1&junk=2",
                "builtin:rotational?case=1&a=zzz",
                "builtin:rotational?case=1&a=1&a=2"):
        with pytest.raises(SurfaceSpecError):
            resolve_surface(bad)


def test_json_surface_round_trip(tmp_path):
    data = {
        "name": "twisted",
        "components": ["u", "v", "u*v", "u^2-v^2"],
        "constants": {},
        "domain": {"u": [-1, 1], "v": [-1, 1]},
    }
    path = tmp_path / "twisted.json"
    path.write_text(json.dumps(data))
    defn = load_surface(str(path))
    assert defn.name == "twisted"
    jet = surface_jet(defn, 0.3, -0.2)
    assert np.allclose(jet.z, [0.3, -0.2, -0.06, 0.05], atol=1e-15)
    assert np.allclose(jet.z_u, [1.0, 0.0, -0.2, 0.6], atol=1e-15)
    assert np.allclose(jet.z_uv, [0.0, 0.0, 1.0, 0.0], atol=1e-15)
    assert np.allclose(jet.z_vv, [0.0, 0.0, 0.0, -2.0], atol=1e-15)


def test_json_constants_used(tmp_path):
    data = {
        "components": ["a*u", "v", "0", "0"],
        "constants": {"a": 0.5},
        "domain": {"u": [0, 1], "v": [0, 1]},
    }
    path = tmp_path / "scaled.json"
    path.write_text(json.dumps(data))
    defn = load_surface(str(path))
    assert surface_jet(defn, 1.0, 0.0).z_u[0] == 0.5
    assert defn.name == "scaled"


def test_json_schema_errors():
    good = {
        "components": ["u", "v", "0", "0"],
        "domain": {"u": [0, 1], "v": [0, 1]},
    }
    bad_cases = [
        {**good, "extra": 1},
        {"domain": good["domain"]},
        {**good, "components": ["u", "v", "0"]},
        {**good, "components": ["u", "v", "0", "sin("]},
        {**good, "components": ["u", "v", "0", "w"]},
        {**good, "constants": {"a": True}},
        {**good, "domain": {"u": [0, 1]}},
        {**good, "domain": {"u": [1, 0], "v": [0, 1]}},
        {**good, "name": 7},
        [],
    ]
    for data in bad_cases:
        with pytest.raises(SurfaceSpecError):
            surface_from_dict(data)
    surface_from_dict(good)


def test_load_surface_file_errors(tmp_path):
    with pytest.raises(SurfaceSpecError):
        load_surface(str(tmp_path / "missing.json"))
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(SurfaceSpecError):
        load_surface(str(path))


def test_out_of_domain():
    defn = resolve_surface("builtin:clifford")
    with pytest.raises(OutOfDomainError):
        surface_jet(defn, 7.0, 0.0)
    with pytest.raises(OutOfDomainError):
        surface_jet(defn, 1.0, -0.1)


def test_make_rotational_rejections():
    with pytest.raises(SurfaceSpecError):
        make_rotational(RotationalParams("v", "u", 1.0, 1.0))
    with pytest.raises(SurfaceSpecError):
        make_rotational(RotationalParams("u", "u", 0.0, 1.0))
    with pytest.raises(SurfaceSpecError):
        make_rotational(RotationalParams("1", "2", 1.0, 1.0))  # E = 0
    with pytest.raises(SurfaceSpecError):
        # profile leaves its domain of definition inside the chart
        make_rotational(RotationalParams("u", "ln(u-1)", 1.0, 1.0))
    with pytest.raises(SurfaceSpecError):
        make_rotational(RotationalParams("u", "u", 1.0, 1.0),
                        u_domain=(2.0, 0.5))
