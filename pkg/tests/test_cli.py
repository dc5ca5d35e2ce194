"""
Tests for the designlab command line.

run() is called in-process; JSON is read back from captured stdout.
"""

import json

import numpy as np
import pandas as pd
import pytest

from designlab.cli import EXIT_INVALID, EXIT_NOT_DESIGN, EXIT_OK, parse_command, run
from designlab.models.requests import HoggarRequest, OutputFormat

HOGGAR_ARGS = [
    "hoggar", "--n", "315", "--dim", "3", "--field", "H",
    "--angles", "0,g-,0.25,0.5,g+", "--counts", "10,32,160,80,32",
]


def _run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


@pytest.fixture
def mub_file(tmp_path, capsys):
    path = tmp_path / "mub_h2.json"
    assert run(["catalog", "mub", "--field", "H", "--out", str(path)]) == EXIT_OK
    capsys.readouterr()
    return path


# =============================================================================
# PARSING
# =============================================================================

def test_parse_command_builds_request():
    spec = parse_command(HOGGAR_ARGS + ["--t", "5", "--output", "table"])
    assert spec.subcommand == "hoggar"
    assert spec.output_format is OutputFormat.TABLE
    assert isinstance(spec.request, HoggarRequest)
    assert np.isclose(spec.request.angles[1], (3 - np.sqrt(5)) / 8)


def test_global_flags_before_subcommand():
    spec = parse_command(["--expect-design", "constants", "--field", "c", "--dim", "2", "--t", "1"])
    assert spec.expect_design
    assert spec.request.field.value == "C"


# =============================================================================
# CONSTANTS AND DIM
# =============================================================================

def test_constants_for_hoggar_lines(capsys):
    code, doc = _run_json(capsys, ["constants", "--field", "H", "--dim", "3", "--t", "5", "--n", "315"])
    assert code == EXIT_OK
    assert doc["c_t_exact"] == "1/42"
    assert np.isclose(doc["c_t"], 1 / 42)
    assert np.isclose(doc["bound"], 2362.5)
    assert doc["bound_exact"] == "4725/2"


def test_constants_table_output(capsys):
    code = run(["--output", "table", "constants", "--field", "H", "--dim", "2", "--t", "2"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "dim_homtt" in out and "20" in out


def test_dim_by_rank(capsys):
    code, doc = _run_json(capsys, ["dim", "--field", "H", "--dim", "2", "--t", "1"])
    assert code == EXIT_OK
    assert doc["rank"] == doc["formula"] == 6
    assert doc["matches"] is True


def test_kernel_test_passes(capsys):
    code, doc = _run_json(
        capsys, ["kernel-test", "--field", "C", "--dim", "2", "--t", "2", "--trials", "5", "--expect-design"]
    )
    assert code == EXIT_OK
    assert doc["passed"] is True
    assert doc["max_kernel_error"] < 1e-9


# =============================================================================
# HOGGAR
# =============================================================================

def test_hoggar_lines_are_a_five_design(capsys):
    code, doc = _run_json(capsys, HOGGAR_ARGS + ["--t", "5", "--expect-design"])
    assert code == EXIT_OK
    assert doc["is_design"] is True
    assert [row["r"] for row in doc["checks"]] == [1, 2, 3, 4, 5]
    assert np.isclose(doc["checks"][4]["rhs"], 7.5)


def test_hoggar_lines_are_not_a_six_design(capsys):
    code, doc = _run_json(capsys, HOGGAR_ARGS + ["--t", "6", "--expect-design"])
    assert code == EXIT_NOT_DESIGN
    assert doc["is_design"] is False


def test_hoggar_counts_must_sum_to_n_minus_one(capsys):
    code = run(["hoggar", "--n", "10", "--dim", "2", "--field", "H", "--t", "1",
                "--angles", "0,0.5", "--counts", "1,7"])
    assert code == EXIT_INVALID
    assert "n - 1" in capsys.readouterr().err


# =============================================================================
# CATALOG AND VERIFY
# =============================================================================

def test_catalog_to_stdout(capsys):
    code, doc = _run_json(capsys, ["catalog", "onb", "--field", "R", "--dim", "3"])
    assert code == EXIT_OK
    assert doc["field"] == "R" and doc["dim"] == 3
    assert len(doc["vectors"]) == 3


def test_catalog_writes_file(mub_file):
    doc = json.loads(mub_file.read_text(encoding="utf-8"))
    assert doc["field"] == "H"
    assert len(doc["vectors"]) == 10


def test_verify_mub_three_design(mub_file, capsys):
    code, doc = _run_json(capsys, ["verify", str(mub_file), "--t", "3", "--expect-design"])
    assert code == EXIT_OK
    assert doc["is_design"] is True
    assert np.isclose(doc["potential"], 20.0)


def test_verify_mub_four_design_fails(mub_file, capsys):
    code, doc = _run_json(capsys, ["verify", str(mub_file), "--t", "4", "--expect-design"])
    assert code == EXIT_NOT_DESIGN
    assert doc["is_design"] is False


def test_verify_without_expect_design_exits_zero(mub_file, capsys):
    code, _ = _run_json(capsys, ["verify", str(mub_file), "--t", "4"])
    assert code == EXIT_OK


def test_verify_missing_file(tmp_path, capsys):
    code = run(["verify", str(tmp_path / "missing.json"), "--t", "1"])
    assert code == EXIT_INVALID
    assert "not found" in capsys.readouterr().err


def test_verify_malformed_document(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"field": "H", "dim": 2, "vectors": [[[1, 0, 0]]]}), encoding="utf-8")
    assert run(["verify", str(path), "--t", "1"]) == EXIT_INVALID


def test_verify_undecodable_file(tmp_path, capsys):
    path = tmp_path / "binary.json"
    path.write_bytes(b"\xff\xfe{}")
    assert run(["verify", str(path), "--t", "1"]) == EXIT_INVALID
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "ConfigurationError" in captured.err


def test_verify_stored_six_lines(fixture_path, capsys):
    code, doc = _run_json(capsys, ["verify", str(fixture_path("six_lines_h2")), "--t", "2", "--expect-design"])
    assert code == EXIT_OK
    assert doc["is_design"] and doc["bessel_ok"] and doc["hoggar_ok"]


def test_verify_stored_seven_lines_at_search_tolerance(fixture_path, capsys):
    code, doc = _run_json(capsys, [
        "--expect-design", "verify", str(fixture_path("seven_lines_h2")), "--t", "2", "--tol", "1e-6",
    ])
    assert code == EXIT_NOT_DESIGN
    assert not doc["is_design"] and not doc["bessel_ok"] and not doc["hoggar_ok"]


# =============================================================================
# SEARCH
# =============================================================================

def test_search_writes_configuration_and_trajectory(tmp_path, capsys):
    out = tmp_path / "best.json"
    trajectory = tmp_path / "trajectory.csv"
    code, doc = _run_json(capsys, [
        "search", "--field", "C", "--dim", "2", "--n", "4", "--t", "2",
        "--restarts", "2", "--max-iters", "200", "--seed", "3",
        "--out", str(out), "--emit-trajectory", str(trajectory),
    ])
    assert code == EXIT_OK
    assert doc["rational_angles"]
    assert len(pd.read_csv(trajectory)) == doc["iterations"]

    code, report = _run_json(capsys, ["verify", str(out), "--t", "2"])
    assert code == EXIT_OK
    assert abs(report["potential"] - doc["report"]["potential"]) <= 1e-12 * doc["report"]["potential"]
    assert abs(report["bound"] - doc["report"]["bound"]) <= 1e-12 * doc["report"]["bound"]


# =============================================================================
# INVALID INPUT
# =============================================================================

@pytest.mark.parametrize("argv", [
    ["constants", "--dim", "2", "--t", "1"],
    ["constants", "--field", "O", "--dim", "2", "--t", "1"],
    ["constants", "--field", "H", "--dim", "0", "--t", "1"],
    ["catalog", "mub", "--field", "H", "--dim", "3"],
    ["search", "--field", "H", "--dim", "2", "--n", "0", "--t", "2"],
    ["kernel-test", "--field", "H", "--dim", "4", "--t", "1"],
    ["dim", "--field", "H", "--dim", "4", "--t", "1"],
    ["dim", "--field", "R", "--dim", "2", "--t", "6"],
    ["hoggar", "--n", "2", "--dim", "2", "--field", "C", "--t", "1", "--angles", "1", "--counts", "1"],
    ["--log-level", "LOUD", "constants", "--field", "H", "--dim", "2", "--t", "1"],
    [],
])
def test_invalid_input_exits_one(argv, capsys):
    assert run(argv) == EXIT_INVALID
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "designlab:" in captured.err
