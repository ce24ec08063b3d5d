import csv
import io
import json
import math

import pytest

from stieltjes.cli import run
from stieltjes.crossval import CrossReport, verify_family
from stieltjes.orthopoly import PolynomialFamily


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_zeros_csv():
    code, out, _ = call("zeros", "--family", "hermite", "--n", "2", "--format", "csv")
    assert code == 0
    table = rows(out)
    assert table[0] == ["k", "x"]
    xs = [float(r[1]) for r in table[1:]]
    # sqrt(0.5) is the correctly rounded value; 1/sqrt(2) is one ulp below it
    assert xs == [-math.sqrt(0.5), math.sqrt(0.5)]
    assert table[1][1] == "-0.70710678118654757"
    assert "\r" not in out


def test_csv_uses_17_significant_digits():
    _, out, _ = call("zeros", "--family", "jacobi", "--p", "1", "--q", "2", "--n", "3")
    for _, x in rows(out)[1:]:
        digits = x.lstrip("-").replace(".", "").split("e")[0].lstrip("0")
        assert len(digits) <= 17 and "," not in x


def test_verify_exit_zero():
    code, out, err = call("verify", "--family", "jacobi", "--p", "1", "--q", "1", "--n", "10", "--tol", "1e-9")
    assert code == 0 and "PASS" in err
    table = rows(out)
    assert table[0] == ["subject", "n", "dev_zeros_eq", "dev_eq_nodes", "min_hess_eig", "J", "pass"]
    assert table[1][-1] == "true"


def test_verify_failure_exit_one():
    code, _, err = call("verify", "--family", "laguerre", "--m", "1", "--n", "30", "--tol", "1e-300")
    assert code == 1 and "FAIL" in err


def test_quantize_prints_j(tmp_path):
    code, out, _ = call("quantize", "--model", "oscillator", "--n", "3", "--output", str(tmp_path / "q.csv"))
    assert code == 0 and out.strip() == "J=3.000000000"


def test_quantize_curve_override():
    code, out, err = call("quantize", "--model", "coulomb", "--l", "0", "--n", "2",
                          "--center", "4.5", "--semi-real", "4", "--semi-imag", "2")
    assert code == 0 and "J=2.000000000" in err


def test_quantize_bad_curve_is_numerical_failure():
    code, _, err = call("quantize", "--model", "coulomb", "--l", "0", "--n", "2",
                        "--center", "3", "--semi-real", "10", "--semi-imag", "5")
    assert code == 3 and "fixed pole" in err


@pytest.mark.parametrize("argv", [
    ["zeros", "--family", "jacobi", "--n", "3"],
    ["zeros", "--family", "hermite"],
    ["zeros", "--family", "laguerre", "--m", "-2", "--n", "3"],
    ["verify", "--model", "oscillator", "--n", "2"],
    ["sweep", "--family", "hermite", "--n-lo", "0", "--n-hi", "3"],
    ["sweep", "--family", "hermite", "--n-lo", "5", "--n-hi", "201"],
    ["spectrum", "--model", "coulomb", "--n", "1"],
    ["nosuch"],
    ["zeros", "--family", "hermite", "--n", "two"],
    [],
])
def test_usage_errors_exit_two(argv):
    code, _, err = call(*argv)
    assert code == 2 and "usage error" in err


def test_every_subcommand_runs(tmp_path):
    cases = [
        ["zeros", "--family", "laguerre", "--m", "1", "--n", "4"],
        ["equilibrium", "--family", "jacobi", "--p", "0.6", "--q", "0.6", "--n", "5"],
        ["field", "--family", "laguerre", "--m", "0"],
        ["field", "--model", "coulomb", "--l", "1", "--n", "2"],
        ["spectrum", "--model", "oscillator", "--n-lo", "1", "--n-hi", "4"],
        ["riccati", "--model", "coulomb", "--l", "2", "--n", "3"],
        ["quantize", "--model", "coulomb", "--l", "1", "--n", "5"],
        ["nodes", "--model", "coulomb", "--l", "0", "--n", "3"],
        ["verify-model", "--model", "coulomb", "--l", "1", "--n", "3"],
        ["sweep", "--model", "oscillator", "--n-lo", "1", "--n-hi", "5"],
    ]
    for argv in cases:
        for fmt in ("csv", "json"):
            code, out, _ = call(*argv, "--format", fmt)
            assert code == 0, argv
            if fmt == "json":
                json.loads(out)
            else:
                assert rows(out)[0]


def test_field_csv_values():
    _, out, _ = call("field", "--family", "jacobi", "--p", "0.5", "--q", "0.5")
    table = rows(out)
    assert table[0] == ["term", "location", "strength"]
    poles = [(float(r[1]), float(r[2])) for r in table if r[0] == "pole"]
    assert poles == [(1.0, -0.5), (-1.0, -0.5)]


def test_json_report_round_trip():
    code, out, _ = call("verify", "--family", "jacobi", "--p", "1", "--q", "2", "--n", "7", "--format", "json")
    assert code == 0
    assert CrossReport.from_json(out) == verify_family(PolynomialFamily.jacobi(1, 2), 7)


def test_config_file_overrides_flags(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "zeros", "family": "hermite", "n": 3}))
    code, out, _ = call("zeros", "--family", "laguerre", "--m", "1", "--n", "9", "--config", str(cfg))
    assert code == 0 and len(rows(out)) == 4
    code, out, _ = call("--config", str(cfg))
    assert code == 0 and len(rows(out)) == 4
    cfg.write_text(json.dumps({"command": "zeros", "bogus": 1}))
    assert call("--config", str(cfg))[0] == 2


def test_output_dir_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("STIELTJES_OUTPUT_DIR", str(tmp_path / "out"))
    code, out, _ = call("spectrum", "--model", "oscillator", "--n", "2")
    assert code == 0 and out.startswith("oscillator")
    data = (tmp_path / "out" / "spectrum.csv").read_text()
    assert rows(data)[1][:2] == ["2", "2.5"]
    code, out, _ = call("spectrum", "--model", "oscillator", "--n", "2", "--output", "-")
    assert rows(out)[0][0] == "n"


def test_sweep_parallel_matches_serial():
    base = ["sweep", "--family", "jacobi", "--p", "1", "--q", "2", "--n-lo", "1", "--n-hi", "6"]
    _, serial, _ = call(*base)
    _, parallel, _ = call(*base, "--jobs", "2")
    assert serial == parallel
