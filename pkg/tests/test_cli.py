import json

import pytest
from typer.testing import CliRunner

from seqspace.cli import app, run

runner = CliRunner()


def invoke(*args: str):
    return runner.invoke(app, list(args))


def test_transform_csv_rational():
    result = invoke(
        "transform", "--lambda", "n+1", "--x", "list:1,0,0;tail=zero",
        "--N", "5", "--mode", "rational", "--format", "csv",
    )  # fmt: skip
    assert result.exit_code == 0
    assert result.stdout == "n,y\n0,1\n1,1/2\n2,1/3\n3,1/4\n4,1/5\n5,1/6\n"


def test_transform_csv_float_uses_lf():
    result = invoke("transform", "--lambda", "n+1", "--x", "1", "--N", "3", "--format", "csv")
    assert result.exit_code == 0
    assert result.stdout == "n,y\n0,1.0\n1,1.0\n2,1.0\n3,1.0\n"
    assert "\r" not in result.stdout


def test_transform_inverse_round_trip_through_files(tmp_path):
    y_file = tmp_path / "out" / "y.csv"
    first = invoke(
        "transform", "--lambda", "n^2+1", "--x", "list:3,-1,1/2,7;tail=zero",
        "--N", "8", "--mode", "rational", "--format", "csv", "--out", str(y_file),
    )  # fmt: skip
    assert first.exit_code == 0
    assert y_file.exists()
    second = invoke(
        "inverse", "--lambda", "n^2+1", "--y", f"@{y_file}",
        "--N", "8", "--mode", "rational", "--format", "csv",
    )  # fmt: skip
    assert second.exit_code == 0
    assert second.stdout == "n,x\n0,3\n1,-1\n2,1/2\n3,7\n4,0\n5,0\n6,0\n7,0\n8,0\n"


def test_soperator_check_reports_zero_residuals():
    result = invoke(
        "soperator", "--lambda", "n+1", "--x", "list:1,5,2;tail=repeat",
        "--N", "20", "--mode", "rational", "--check", "--format", "json",
    )  # fmt: skip
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["residuals"] == {
        "difference_form": {"num": 0, "den": 1},
        "increment_form": {"num": 0, "den": 1},
    }
    assert data["S"][0] == {"num": 0, "den": 1}


def test_paranorm_basel():
    result = invoke("paranorm", "--x", "1/(n+1)", "--p", "2", "--N", "100000", "--format", "json")
    assert result.exit_code == 0
    report = json.loads(result.stdout)["report"]
    assert abs(report["estimate"] - 1.28255) < 1e-4
    assert report["verdict"]["tag"] == "ConvergentNumeric"


def test_member_json():
    result = invoke(
        "member", "--space", "ell_lambda", "--lambda", "n+1", "--p", "2",
        "--x", "list:1,0,0;tail=zero", "--N", "100000", "--format", "json",
    )  # fmt: skip
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["verdict"]["tag"] == "ConvergentNumeric"
    assert abs(data["estimate"] - 1.28255) < 1e-4


def test_member_c0_of_constant():
    result = invoke(
        "member", "--space", "c0_lambda", "--lambda", "n+1", "--x", "1", "--format", "json"
    )
    assert result.exit_code == 0
    assert json.loads(result.stdout)["verdict"]["tag"] == "DivergentNumeric"


def test_witness():
    result = invoke("witness", "--lambda", "n+1", "--N", "10000", "--format", "json")
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["c0_lambda"] == "ConvergentNumeric"
    assert data["ell_lambda"] == "DivergentNumeric"
    assert data["partial_sum"] >= 9.787
    assert data["tail_max"] < 2e-4


def test_thm4_and_thm5():
    four = invoke("thm4", "--x", "list:1;tail=zero", "--N", "100000", "--format", "json")
    assert four.exit_code == 0
    assert json.loads(four.stdout)["consistent"] is True
    five = invoke("thm5", "--x", "list:1;tail=zero", "--p", "1/2", "--format", "json")
    assert five.exit_code == 0
    assert json.loads(five.stdout)["report"]["case"] == "ii"


def test_dual_with_identity_residuals():
    result = invoke(
        "dual", "--which", "beta", "--a", "1/(n+1)^2", "--p", "2",
        "--x", "list:1,2,3", "--N", "50", "--mode", "rational", "--format", "json",
    )  # fmt: skip
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["residuals"] == {"D": {"num": 0, "den": 1}, "B": {"num": 0, "den": 1}}
    assert data["report"]["which"] == "beta"


def test_dual_rejects_unknown_kind():
    result = invoke("dual", "--which", "delta", "--a", "1")
    assert result.exit_code == 2


def test_tilde_csv():
    result = invoke(
        "tilde", "--A", "identity", "--lambda", "n+1",
        "--N", "3", "--mode", "rational", "--format", "csv",
    )  # fmt: skip
    assert result.exit_code == 0
    assert result.stdout == "n,k,value\n0,0,1\n1,0,-1\n1,1,2\n2,1,-2\n2,2,3\n3,2,-3\n3,3,4\n"


def test_tilde_identity_residual():
    result = invoke(
        "tilde", "--A", "triangle:1/(n+1)", "--x", "list:2,-3,1/7",
        "--N", "10", "--mode", "rational", "--format", "json",
    )  # fmt: skip
    assert result.exit_code == 0
    assert json.loads(result.stdout)["identity_residual"] == {"num": 0, "den": 1}


def test_condition_json():
    result = invoke(
        "condition", "--id", "4.12", "--A", "identity", "--p", "1", "--q", "2", "--format", "json"
    )
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["verdict"]["tag"] == "DivergentNumeric"
    assert [pt["N"] for pt in data["witness_curve"]] == [10, 100, 1000]


def test_classify_json_is_deterministic():
    args = (
        "classify", "--A", "zero", "--lambda", "n+1", "--p", "2", "--q", "2",
        "--target", "lq", "--N", "1000", "--format", "json",
    )  # fmt: skip
    first, second = invoke(*args), invoke(*args)
    assert first.exit_code == 0
    assert first.stdout == second.stdout
    data = json.loads(first.stdout)
    assert data["combined"]["tag"] == "ConvergentNumeric"
    assert [c["id"] for c in data["conditions"]] == ["4.6", "4.7", "4.8", "4.19"]


def test_classify_table():
    result = invoke("classify", "--A", "identity", "--p", "1", "--q", "2", "--target", "linfq")
    assert result.exit_code == 0
    assert "4.17" in result.stdout
    assert "combined" in result.stdout


def test_validate():
    ok = invoke("validate", "--lambda", "n+1", "--N", "1000", "--format", "json")
    assert ok.exit_code == 0
    assert json.loads(ok.stdout)["report"]["ok"] is True
    bad = invoke("validate", "--lambda", "1", "--N", "10")
    assert bad.exit_code == 2


@pytest.mark.parametrize(
    "args",
    [
        ["transform", "--lambda", "1", "--x", "1", "--N", "5"],
        ["transform", "--lambda", "n+1", "--x", "1/(n+1", "--N", "5"],
        ["transform", "--lambda", "n+1", "--x", "log(n+2)", "--mode", "rational"],
        ["transform", "--lambda", "n+1", "--x", "1", "--mode", "decimal"],
        ["transform", "--lambda", "n+1", "--x", "1", "--N", "0"],
        ["paranorm", "--x", "1", "--p", "1+1/(n+1)"],
        ["classify", "--A", "zero", "--target", "lp"],
        ["condition", "--id", "4.99"],
        ["tilde", "--A", "@matrix.csv"],
        ["transform", "--lambda", "n+1", "--x", "1", "--threshold", "speed=3"],
    ],
)
def test_input_errors_exit_2(args):
    result = invoke(*args)
    assert result.exit_code == 2
    assert "error:" in result.output


def test_syntax_error_reports_offset():
    result = invoke("transform", "--lambda", "n+1", "--x", "n + m", "--N", "5")
    assert result.exit_code == 2
    assert "byte 4" in result.output


def test_run_returns_exit_codes(capsys):
    assert run(["validate", "--lambda", "n+1", "--N", "10", "--format", "csv"]) == 0
    assert "ok,True" in capsys.readouterr().out
    assert run(["validate", "--lambda", "1", "--N", "10"]) == 2


@pytest.mark.parametrize(
    "args",
    [
        ["transform", "--lambda", "n+1", "--x", "1/(n+1)", "--N", "50"],
        ["inverse", "--lambda", "n^2+1", "--y", "list:1,1/2,1/3", "--N", "20", "--mode", "rational"],
        ["soperator", "--lambda", "n+1", "--x", "list:1,5,2;tail=repeat", "--N", "20", "--check"],
        ["paranorm", "--x", "1/(n+1)", "--p", "2", "--N", "1000"],
        ["member", "--space", "c0_lambda", "--lambda", "n+1", "--x", "1", "--N", "1000"],
        ["witness", "--lambda", "n+1", "--N", "1000"],
        ["thm4", "--x", "list:1;tail=zero", "--N", "1000"],
        ["thm5", "--x", "list:1;tail=zero", "--p", "1/2", "--N", "1000"],
        ["dual", "--which", "alpha", "--a", "1/(n+1)^2", "--p", "2", "--N", "1000"],
        ["tilde", "--A", "identity", "--lambda", "n+1", "--N", "10", "--x", "list:2,-3"],
        ["condition", "--id", "4.9", "--A", "identity", "--p", "1", "--q", "2"],
        ["classify", "--A", "identity", "--p", "1", "--q", "2", "--target", "cq", "--N", "200"],
    ],
)
def test_json_output_is_byte_identical(args):
    first = invoke(*args, "--format", "json")
    second = invoke(*args, "--format", "json")
    assert first.exit_code == 0, first.output
    assert first.stdout == second.stdout


def test_malformed_environment_exits_2(monkeypatch):
    monkeypatch.setenv("SEQSPACE_THREADS", "lots")
    result = invoke("validate", "--lambda", "n+1", "--N", "10")
    assert result.exit_code == 2
    assert "SEQSPACE_THREADS" in result.output
    assert run(["validate", "--lambda", "n+1", "--N", "10"]) == 2
