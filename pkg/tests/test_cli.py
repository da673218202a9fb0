"""Command-line interface: exit codes, determinism, and report schemas."""

import json

import numpy as np
import pytest

from curvhom4.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_reports_descriptor(capsys):
    code, out, _ = _run(capsys, "build", "--variant", "diag", "--p", "1", "--sign", "+", "--delta", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["model"]["signature"] == "-+++"
    assert doc["model"]["einstein_case"] == "traceless_cube"
    assert doc["spectra"]["cdiag"] is True
    F = np.array(doc["model"]["f_matrix"])
    assert F.shape == (3, 3)
    assert abs(F[2, 2] - 1.0) < 1e-15


def test_build_neutral_descriptor(capsys):
    code, out, _ = _run(capsys, "build", "--variant", "diag", "--p", "1", "--sign", "+", "--delta", "-1")
    assert code == 0
    assert json.loads(out)["model"]["signature"] == "--++"


def test_build_rejects_zero_p(capsys):
    code, _, err = _run(capsys, "build", "--variant", "diag", "--p", "0")
    assert code == 2
    assert "nonzero" in err


def test_build_rejects_excluded_signature(capsys):
    code, _, err = _run(capsys, "build", "--variant", "diag", "--sign", "-", "--delta", "-1")
    assert code == 2
    assert "---+" in err or "pattern" in err


def test_unknown_variant_is_usage_error(capsys):
    code = main(["build", "--variant", "bogus"])
    capsys.readouterr()
    assert code == 2


def test_classify_cases(capsys):
    for args, want in [
        (("--variant", "diag", "--p", "1", "--sign", "+", "--delta", "1"), "petrov_ricci_flat_lorentz"),
        (("--variant", "diag", "--p", "1", "--sign", "+", "--delta", "-1"), "petrov_ricci_flat_neutral"),
        (("--variant", "diag", "--p", "1", "--sign", "-", "--delta", "1"), "petrov_ricci_flat_neutral"),
        (("--variant", "const", "--p", "1", "--delta", "1"), "constant_curvature"),
        (("--variant", "nondiag",), "not_cdiagonalizable"),
    ]:
        code, out, _ = _run(capsys, "classify", *args)
        assert code == 0
        assert json.loads(out)["classification"]["case"] == want


def test_classify_constant_curvature_value(capsys):
    code, out, _ = _run(capsys, "classify", "--variant", "const", "--p", "1", "--delta", "1")
    doc = json.loads(out)
    assert doc["classification"]["sectional_curvature"] == pytest.approx(-1.0)


def test_verify_exit_zero_and_deterministic(capsys):
    argv = ["verify", "--variant", "diag", "--p", "1/2", "--sign", "-", "--delta", "1", "--seed", "3"]
    code1 = main(list(argv))
    out1 = capsys.readouterr().out
    code2 = main(list(argv))
    out2 = capsys.readouterr().out
    assert code1 == 0 and code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["all_passed"] is True
    assert all(set(r) >= {"name", "passed", "max_abs_error"} for r in doc["checks"])


def test_verify_nondiag_marks_expected_false(capsys):
    code, out, _ = _run(capsys, "verify", "--variant", "nondiag")
    assert code == 0
    doc = json.loads(out)
    row = next(r for r in doc["checks"] if r["name"] == "curvature_operator_cdiag")
    assert row["passed"] and "expected-false" in row["note"]


def test_expmap_endpoint(capsys):
    code, out, _ = _run(capsys, "expmap", "--v", "1,0,0,0", "--y", "0,0,0,1")
    assert code == 0
    doc = json.loads(out)
    assert doc["expmap"]["endpoint"][3] == pytest.approx(np.e, abs=1e-10)
    assert doc["expmap"]["differential_deviation"] <= 1e-6


def test_expmap_constant_field(capsys):
    code, out, _ = _run(capsys, "expmap", "--v", "0,1,0,0", "--y", "0,0,0,1")
    doc = json.loads(out)
    assert doc["expmap"]["endpoint"] == [1.0, 0.0, 0.0, 1.0]


def test_expmap_trajectory(capsys):
    code, out, _ = _run(capsys, "expmap", "--v", "1,0,0,0", "--y", "0,0,0,1", "--trajectory", "4")
    doc = json.loads(out)
    traj = doc["expmap"]["trajectory"]
    assert len(traj) == 5
    assert traj[0] == [0.0, 0.0, 0.0, 0.0, 1.0]
    assert traj[-1][0] == 1.0
    assert traj[2][4] == pytest.approx(np.exp(0.5), abs=1e-12)


def test_expmap_rejects_bad_point(capsys):
    code, _, err = _run(capsys, "expmap", "--v", "1,0,0,0", "--y", "0,0,0,-1")
    assert code == 2
    assert "positive" in err


def test_expmap_rejects_malformed_vector(capsys):
    code, _, _ = _run(capsys, "expmap", "--v", "1,0,0")
    assert code == 2


def test_text_format(capsys):
    code, out, _ = _run(capsys, "classify", "--variant", "diag", "--format", "text")
    assert code == 0
    assert "classification: petrov_ricci_flat_lorentz" in out


def test_reversed_orientation(capsys):
    code, out, _ = _run(
        capsys, "classify", "--variant", "diag", "--sign", "-", "--delta", "1",
        "--orientation", "-1",
    )
    assert code == 0
    assert json.loads(out)["classification"]["case"] == "petrov_ricci_flat_neutral"
