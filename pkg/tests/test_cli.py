import csv
import json
from fractions import Fraction

import pytest

from subordkit import cli, report


def _run(argv, capsys):
    code = cli.run(argv)
    return code, capsys.readouterr()


def test_means_eval_harmonic(capsys):
    code, out = _run(["means-eval", "--t", "0.5", "--x", "1", "--y", "3", "--mean", "harmonic"],
                     capsys)
    assert code == 0
    assert json.loads(out.out)["value"] == 1.5


def test_janowski_check_validated_tuple(capsys):
    code, out = _run(["janowski", "check", "--A", "3/8", "--B", "0", "--D", "1",
                      "--E", "123/128"], capsys)
    data = json.loads(out.out)
    assert code == 0
    assert data["conditions"]["quad"]["E"] == "123/128"
    assert data["conditions"]["cond4"]["margin"] == "1/2048"
    assert data["final_bound"]["margin"] == "1/3071"


def test_janowski_check_inapplicable_bound_exits_one(capsys):
    code, out = _run(["janowski", "check", "--A", "1/2", "--B", "0", "--D", "1", "--E", "1/2"],
                     capsys)
    assert code == 1
    assert json.loads(out.out)["final_bound"]["applicable"] is False


def test_janowski_scan_round_trip(capsys):
    code, out = _run(["janowski", "scan", "--grid",
                      '{"A": ["3/8"], "B": ["0"], "D": ["1"], "E": ["15/16", "123/128"]}'], capsys)
    data = json.loads(out.out)
    assert code == 0
    es = [Fraction(q["E"]) for q in data["feasible"]]
    assert es == [Fraction(15, 16), Fraction(123, 128)]


def test_config_errors_exit_two(capsys):
    assert cli.run(["admissibility", "--case", "bogus"]) == 2
    assert cli.run(["janowski", "check", "--E", "2"]) == 2
    assert cli.run(["threshold", "--alpha", "0.25", "--rho", "0.1"]) == 2
    assert cli.run(["verify-paper", "--config", '{"grids": {"nope": 1}}']) == 2
    assert cli.run([]) == 2


def test_runtime_error_exits_three(capsys):
    # f = z sqrt(1 - 2z) is normalised but hits the principal branch cut at z = 0.75
    f = json.dumps({"op": "product", "args": [{"op": "identity"},
                    {"op": "sqrt1p", "args": [{"op": "affine", "args": [{"op": "identity"}],
                                               "params": {"a": 0.0, "b": -2.0}}]}]})
    assert cli.run(["apply", "--corollary", "fz39", "--f", f, "--params", '{"gamma": 1}']) == 3
    # the default parameters (α = ρ = 0) make a threshold branch degenerate: config error
    assert cli.run(["apply", "--corollary", "fz39", "--f", '{"op": "identity"}']) == 2


def test_threshold_point_report(capsys):
    code, out = _run(["threshold", "--alpha", "0.25", "--rho", "0.5", "--x", "1", "--my", "-2",
                      "--theorem", "29"], capsys)
    data = json.loads(out.out)
    assert code == 0 and data["point"]["beta"] == pytest.approx(0.625)


def test_threshold_oracle_exit_code(capsys):
    assert cli.run(["threshold", "--alpha", "0.25", "--rho", "0.5", "--oracle", "--nx", "50",
                    "--nmy", "50"]) == 0
    assert cli.run(["threshold", "--alpha", "0.75", "--rho", "0.3", "--theorem", "29",
                    "--oracle", "--nx", "50", "--nmy", "50"]) == 1


def test_apply_identity(capsys):
    code, out = _run(["apply", "--corollary", "starlike36", "--f", '{"op": "identity"}',
                      "--params", '{"alpha": "1/4", "rho": "1/2"}'], capsys)
    assert code == 0 and json.loads(out.out)["verdict"] == "conclusion-holds"


def test_export_sigmoid_boundary_csv(tmp_path):
    assert cli.run(["export", "boundary", "--domain", "sigmoid", "--out", str(tmp_path)]) == 0
    raw = (tmp_path / "boundary-sigmoid.csv").read_bytes()
    assert b"\r" not in raw
    rows = list(csv.reader(raw.decode("utf-8").splitlines()))
    assert rows[0] == ["theta", "re", "im"]
    assert len(rows) - 1 == 4096
    assert float(rows[1][1]) == pytest.approx(1.4621171572600098, abs=0)


def test_export_admissibility_json_schema(tmp_path):
    assert cli.run(["export", "admissibility", "--case", "sqrt", "--format", "json",
                    "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "admissibility-sqrt.json").read_text())
    assert set(data) == {"case", "reports"}
    for rep in data["reports"]:
        assert {"case", "omega", "samples", "min_re_psi", "violations",
                "boundary_contacts", "excluded"} <= set(rep)


def test_admissibility_exit_codes_and_csv(tmp_path):
    assert cli.run(["admissibility", "--case", "sqrt", "--theta-n", "64", "--out",
                    str(tmp_path), "--csv"]) == 0
    assert (tmp_path / "admissibility-sqrt-sigmoid.csv").exists()
    assert cli.run(["admissibility", "--case", "sigmoid", "--theta-n", "64",
                    "--out", str(tmp_path)]) == 1


def test_subcheck_small_budget(tmp_path):
    assert cli.run(["subcheck", "--t", "0.5", "--domain", "halfplane", "--budget", "20",
                    "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "subcheck.json").read_text())
    assert data["violations"] == [] and 0 < data["premise_rate"] <= 1
    assert "grids" in data


def test_subcheck_hypo_gate(tmp_path):
    theta = '{"op": "affine", "args": [{"op": "identity"}], "params": {"a": 1.0, "b": 0.5}}'
    phi = '{"op": "constant", "params": {"value": 5.0}}'
    assert cli.run(["subcheck", "--theta", theta, "--phi", phi, "--domain", "exp",
                    "--budget", "5", "--hypo", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "subcheck.json").read_text())
    assert data["hypo_check"]["holds"]


def test_canonical_json_encoding():
    text = report.dumps({"b": float("inf"), "a": Fraction(3, 8), "c": 1 + 2j})
    assert text == '{\n  "a": "3/8",\n  "b": "inf",\n  "c": [\n    1.0,\n    2.0\n  ]\n}\n'


def test_case_provenance_enforced():
    with pytest.raises(ValueError):
        report.Case("x", 1, {}, 0, "guess", 0, 0, True)


def test_bad_numeric_inputs_exit_two(capsys):
    assert cli.run(["means-eval", "--t", "2", "--x", "1", "--y", "2"]) == 2
    assert cli.run(["export", "boundary", "--domain", "sqrt", "--resolution", "3"]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_export_coarse_boundary_near_corner(tmp_path):
    # few samples put refinement points right next to the corner, where the
    # boundary values carry cancellation error
    assert cli.run(["export", "boundary", "--domain", "sqrt", "--resolution", "8",
                    "--out", str(tmp_path)]) == 0
