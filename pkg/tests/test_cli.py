"""Command-line interface: formats, exit codes, tolerance plumbing."""

import json

import numpy as np
import pytest

from surf4.cli import CSV_HEADER, TRACE_CSV_HEADER, main
from surf4.verify import CheckResult


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = text.splitlines()
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        row = {}
        for name, cell in zip(header, cells):
            row[name] = cell if name == "class" else float(cell)
        rows.append(row)
    return header, rows


# analyze ------------------------------------------------------------------

def test_analyze_clifford_csv(capsys):
    code, out, _ = run(capsys, "analyze", "--surface", "builtin:clifford",
                       "--grid", "4x4")
    assert code == 0
    header, rows = parse_csv(out)
    assert ",".join(header) == CSV_HEADER
    assert len(rows) == 16
    for row in rows:
        assert abs(row["k"] + 1.0) < 1e-12
        assert abs(row["kappa"]) < 1e-12
        assert row["class"] == "Hyperbolic"
        assert abs(row["nu1"] - 1.0) < 1e-12
        assert abs(row["nu2"] + 1.0) < 1e-12


def test_analyze_csv_byte_stable(capsys):
    argv = ("analyze", "--surface", "builtin:rotational?case=3",
            "--grid", "5x7")
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.endswith("\n")


def test_analyze_case1_near_zero(capsys):
    code, out, _ = run(capsys, "analyze", "--surface",
                       "builtin:rotational?case=1&a=2", "--grid", "6x6")
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 36
    for row in rows:
        assert max(abs(row["k"]), abs(row["kappa"]), abs(row["K"])) < 1e-9
        assert row["class"] == "Flat"


def test_analyze_json_shape(capsys):
    code, out, _ = run(capsys, "analyze", "--surface", "builtin:clifford",
                       "--grid", "3x4", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["surface"] == "clifford"
    assert doc["grid"] == [3, 4]
    assert len(doc["rows"]) == 12
    assert list(doc["rows"][0]) == CSV_HEADER.split(",")


def test_analyze_out_file_matches_stdout(capsys, tmp_path):
    argv = ("analyze", "--surface", "builtin:clifford", "--grid", "3x3")
    _, out, _ = run(capsys, *argv)
    path = tmp_path / "report.csv"
    code, silent, _ = run(capsys, *argv, "--out", str(path))
    assert code == 0
    assert silent == ""
    assert path.read_text(encoding="utf-8") == out


def test_analyze_surface_file(capsys, tmp_path):
    spec = {
        "components": ["u", "v", "u*u - v*v", "2*u*v"],
        "domain": {"u": [-1.0, 1.0], "v": [-1.0, 1.0]},
    }
    path = tmp_path / "saddle.json"
    path.write_text(json.dumps(spec), encoding="utf-8")
    code, out, _ = run(capsys, "analyze", "--surface", str(path),
                       "--grid", "3x3", "--format", "json")
    assert code == 0
    assert json.loads(out)["surface"] == "saddle"


# input errors -------------------------------------------------------------

def test_bad_inputs_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json", encoding="utf-8")
    for argv in (
        ("analyze", "--surface", "builtin:clifford", "--grid", "1x4"),
        ("analyze", "--surface", "builtin:clifford", "--grid", "4"),
        ("analyze", "--surface", "builtin:nope", "--grid", "4x4"),
        ("analyze", "--surface", str(tmp_path / "missing.json"),
         "--grid", "4x4"),
        ("analyze", "--surface", str(bad), "--grid", "4x4"),
        ("analyze", "--surface", "builtin:clifford", "--grid", "4x4",
         "--tol", "eps_flat"),
        ("analyze", "--surface", "builtin:clifford", "--grid", "4x4",
         "--tol", "nope=1e-9"),
        ("analyze", "--surface", "builtin:clifford", "--grid", "4x4",
         "--tol", "eps_flat=-1"),
        ("trace", "--surface", "builtin:clifford", "--field", "principal",
         "--step", "0", "1", "1"),
        ("trace", "--surface", "builtin:clifford", "--field", "principal",
         "--steps", "0", "1", "1"),
        ("trace", "--surface", "builtin:clifford", "--field", "principal",
         "--frenet", "--format", "csv", "1", "1"),
        ("bogus",),
        (),
    ):
        code, _, err = run(capsys, *argv)
        assert code == 1, argv
        assert err != ""


def test_help_exits_zero(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0
    assert "analyze" in out


# directions ---------------------------------------------------------------

def test_directions_clifford(capsys):
    code, out, _ = run(capsys, "directions", "--surface", "builtin:clifford",
                       "0", "0")
    assert code == 0
    doc = json.loads(out)
    assert [e["direction"] for e in doc["asymptotic"]] == \
        [[1.0, 0.0], [0.0, 1.0]]
    assert [e["direction"] for e in doc["principal"]] == \
        [[1.0, 1.0], [1.0, -1.0]]
    for e in doc["asymptotic"]:
        assert abs(e["nu"]) < 1e-12
    for e in doc["principal"]:
        assert abs(e["alpha"]) < 1e-12


def test_directions_case3_double_root(capsys):
    code, out, _ = run(capsys, "directions", "--surface",
                       "builtin:rotational?case=3", "1", "0")
    assert code == 0
    doc = json.loads(out)
    assert [e["direction"] for e in doc["asymptotic"]] == [[0.0, 1.0]]
    assert [e["direction"] for e in doc["principal"]] == \
        [[1.0, 0.0], [0.0, 1.0]]


def test_directions_flat_point_exit_2(capsys):
    code, _, err = run(capsys, "directions", "--surface", "builtin:plane",
                       "1", "1")
    assert code == 2
    assert "flat point: all tangents" in err


def test_directions_out_of_domain_exit_2(capsys):
    code, _, err = run(capsys, "directions", "--surface", "builtin:clifford",
                       "100", "0")
    assert code == 2
    assert err != ""


# trace ----------------------------------------------------------------------

def test_trace_json_with_frenet(capsys):
    code, out, _ = run(capsys, "trace", "--surface",
                       "builtin:rotational?case=3", "--field", "asymptotic",
                       "--steps", "200", "--frenet", "1", "0")
    assert code == 0
    doc = json.loads(out)
    assert doc["status"] == "completed"
    assert doc["samples"] == 201
    params = np.asarray(doc["params"])
    assert np.max(np.abs(params[:, 0] - 1.0)) < 1e-6
    fr = doc["frenet"]
    assert fr["constant_curvature"] is True
    assert len(fr["kappa1"]) == 201 - 8
    assert fr["kappa2"] is not None and fr["kappa3"] is not None


def test_trace_csv_points(capsys):
    argv = ("trace", "--surface", "builtin:clifford", "--field", "principal",
            "--steps", "50", "--format", "csv", "1", "3")
    code, out, _ = run(capsys, *argv)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == TRACE_CSV_HEADER
    assert len(lines) == 52
    code2, out2, _ = run(capsys, *argv)
    assert out2 == out
    # diagonal line: u - v is constant along the trace
    _, rows = parse_csv(out)
    diffs = [row["u"] - row["v"] for row in rows]
    assert max(diffs) - min(diffs) < 1e-9


def test_trace_flat_seed_exit_2(capsys):
    code, _, err = run(capsys, "trace", "--surface", "builtin:plane",
                       "--field", "asymptotic", "0", "0")
    assert code == 2
    assert err != ""


# tolerance plumbing ---------------------------------------------------------

def test_env_tolerance_override(capsys, monkeypatch):
    monkeypatch.setenv("SURF4_TOL_EPS_FLAT", "10.0")
    code, _, err = run(capsys, "directions", "--surface", "builtin:clifford",
                       "0", "0")
    assert code == 2
    assert "flat point" in err


def test_cli_tolerance_beats_env(capsys, monkeypatch):
    monkeypatch.setenv("SURF4_TOL_EPS_FLAT", "10.0")
    code, out, _ = run(capsys, "directions", "--surface", "builtin:clifford",
                       "--tol", "eps_flat=1e-9", "0", "0")
    assert code == 0
    assert len(json.loads(out)["asymptotic"]) == 2


def test_unknown_env_tolerance_exit_1(capsys, monkeypatch):
    monkeypatch.setenv("SURF4_TOL_BOGUS", "1.0")
    code, _, err = run(capsys, "analyze", "--surface", "builtin:clifford",
                       "--grid", "3x3")
    assert code == 1
    assert "SURF4_TOL_BOGUS" in err


# verify ---------------------------------------------------------------------

def test_verify_motion_suite(capsys):
    code, out, _ = run(capsys, "verify", "motion")
    assert code == 0
    doc = json.loads(out)
    assert doc["suite"] == "motion"
    assert doc["seed"] == 42
    assert doc["passed"] is True
    names = [c["name"] for c in doc["checks"]]
    assert names == ["frame-rotation-invariance", "rigid-motion-invariance"]
    for c in doc["checks"]:
        assert c["passed"] is True
        assert c["error_vs_tolerance"] <= 1.0


def test_verify_failure_exits_3(capsys, monkeypatch):
    def fake(name, seed=42):
        return [CheckResult("a", True, 0.5, "fine"),
                CheckResult("b", False, 7.0, "broken")]

    monkeypatch.setattr("surf4.cli.run_suite", fake)
    code, out, _ = run(capsys, "verify", "oracle")
    assert code == 3
    doc = json.loads(out)
    assert doc["passed"] is False
    assert [c["passed"] for c in doc["checks"]] == [True, False]


def test_verify_unknown_suite_exit_1(capsys):
    code, _, err = run(capsys, "verify", "everything")
    assert code == 1
    assert err != ""
