"""Command-line surface: parsing, exit codes, output round trips."""

import csv
import json
from fractions import Fraction

import pytest

from polydiff.cli import EXIT_DATA, EXIT_OK, EXIT_VERIFY, build_parser, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_models_list():
    args = build_parser().parse_args(["models", "list"])
    assert args.command == "models"


def test_parse_spectrum_plan():
    args = build_parser().parse_args(
        ["spectrum", "--model", "deltoid", "--param", "p=-1/2",
         "--degree", "8", "--format", "json"]
    )
    assert args.model == "deltoid" and args.degree == 8


def test_parse_admissible_plan():
    args = build_parser().parse_args(
        ["admissible", "--factor", "1-x^2-y^2", "--witness", "0,0"]
    )
    assert args.factor == ["1-x^2-y^2"]


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args(["frobnicate"])
    assert excinfo.value.code == 2


def test_models_list_json(capsys):
    code, out, _ = run_cli(capsys, "models", "list", "--format", "json")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert any(row["name"] == "deltoid" for row in payload)


def test_spectrum_json_roundtrip(capsys):
    code, out, _ = run_cli(
        capsys, "spectrum", "--model", "jacobi1d", "--param", "a=2", "--param", "b=1",
        "--degree", "4", "--format", "json",
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["params"] == {"a": "2", "b": "1"}
    # rationals string-encoded, exactly re-parseable: -n(n+a+b-1) at n = 3
    assert Fraction(payload["degrees"][3]["eigenvalues"][0]) == Fraction(-15)


def test_unknown_model_is_data_error(capsys):
    code, _, err = run_cli(capsys, "spectrum", "--model", "nope", "--degree", "2")
    assert code == EXIT_DATA
    assert "unknown model" in err


def test_bad_parameter_is_data_error(capsys):
    code, _, err = run_cli(
        capsys, "spectrum", "--model", "deltoid", "--param", "p=-2", "--degree", "2"
    )
    assert code == EXIT_DATA


def test_malformed_polynomial_is_data_error(capsys):
    code, _, err = run_cli(capsys, "admissible", "--factor", "x?+1", "--witness", "0,0")
    assert code == EXIT_DATA


def test_admissible_negative_reports_no_solution(capsys):
    code, out, _ = run_cli(
        capsys, "admissible", "--factor", "1-x^4-y^4", "--witness", "0,0",
        "--format", "json",
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["dimension"] == 0
    assert payload["message"] == "no elliptic solution"


def test_verify_single_fast_model(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--model", "gaussian_plane", "--format", "json",
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["summary"]["failed"] == 0


def test_verify_inadmissible_measure(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--model", "nodal_cubic", "--measure", "det^-1/2",
        "--format", "json",
    )
    assert code == EXIT_VERIFY
    payload = json.loads(out)
    assert payload["admissible"] is False


def test_verify_admissible_measure(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--model", "deltoid", "--measure", "det^-1/2",
        "--format", "json",
    )
    assert code == EXIT_OK


def test_curvature_json(capsys):
    code, out, _ = run_cli(
        capsys, "curvature", "--model", "swallowtail", "--format", "json"
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["constant"] is True
    assert abs(payload["mean"] - 2.0) < 1e-9


def test_orthogonality_command(capsys):
    code, out, _ = run_cli(
        capsys, "orthogonality", "--model", "square", "--degree", "4",
        "--format", "json",
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["symmetry_defect"] < 1e-10


def test_boundary_points_csv(tmp_path, capsys):
    out_path = tmp_path / "pts.csv"
    code, _, _ = run_cli(
        capsys, "boundary-points", "--model", "deltoid", "-n", "64",
        "--out", str(out_path),
    )
    assert code == EXIT_OK
    with open(out_path) as handle:
        rows = list(csv.DictReader(handle))
    assert rows
    from polydiff.catalog import get_model

    factor = get_model("deltoid").boundary.factors[0]
    for row in rows[:32]:
        value = factor.eval_float([[float(row["x"]), float(row["y"])]])[0]
        assert abs(value) < 1e-6


def test_output_file_roundtrip(tmp_path, capsys):
    out_path = tmp_path / "spec.json"
    code, _, _ = run_cli(
        capsys, "spectrum", "--model", "disk", "--degree", "3",
        "--format", "json", "--out", str(out_path),
    )
    assert code == EXIT_OK
    payload = json.loads(out_path.read_text())
    assert payload["model"] == "disk"
