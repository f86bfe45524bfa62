"""Command-line interface: exit codes, output formats, and file handling."""

import json
import subprocess
import sys

import pytest

from numerkit import analytic, ratecurve
from numerkit.cli import main
from numerkit.model import Esop, product_to_dict

VASICEK_CFG = {"vasicek": {"theta": 0.5, "mu_r": 0.05, "sigma_r": 0.01,
                           "lambda": 0.0, "r0": 0.03},
               "maturities": [1.0, 5.0]}


def _esop_dict(beta=0.85):
    return product_to_dict(Esop(beta=beta, t_reset=0.5, maturity=1.0,
                                sigma=0.2, rate=0.05, spot=100.0))


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


class TestDispatch:
    def test_help(self, capsys):
        assert main(["-h"]) == 0
        assert "usage: numerkit" in capsys.readouterr().out

    def test_no_command(self, capsys):
        assert main([]) == 64
        assert "usage: numerkit" in capsys.readouterr().err

    def test_unknown_command(self, capsys):
        assert main(["frobnicate"]) == 64

    def test_bad_flag_value(self, tmp_path, capsys):
        spec = _write(tmp_path, "esop.json", _esop_dict())
        assert main(["price", "--input", spec, "--method", "bisection"]) == 2


class TestPrice:
    def test_analytic_json(self, tmp_path, capsys):
        spec = _write(tmp_path, "esop.json", _esop_dict())
        assert main(["price", "--input", spec]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["product"]["type"] == "esop"
        product = Esop(beta=0.85, t_reset=0.5, maturity=1.0, sigma=0.2,
                       rate=0.05, spot=100.0)
        assert payload["quote"]["value"] == pytest.approx(
            analytic.esop_price(product), rel=1e-12)
        assert payload["quote"]["method"] == "analytic"

    def test_quadrature_close_to_analytic(self, tmp_path, capsys):
        spec = _write(tmp_path, "esop.json", _esop_dict())
        assert main(["price", "--input", spec, "--method", "quadrature"]) == 0
        value = json.loads(capsys.readouterr().out)["quote"]["value"]
        product = Esop(beta=0.85, t_reset=0.5, maturity=1.0, sigma=0.2,
                       rate=0.05, spot=100.0)
        assert value == pytest.approx(analytic.esop_price(product), rel=1e-6)

    def test_monte_carlo_quote_carries_seed(self, tmp_path, capsys):
        spec = _write(tmp_path, "esop.json", _esop_dict())
        rc = main(["price", "--input", spec, "--method", "monte_carlo",
                   "--paths", "4000", "--seed", "17"])
        assert rc == 0
        quote = json.loads(capsys.readouterr().out)["quote"]
        assert quote["seed"] == 17
        assert quote["std_error"] > 0.0

    def test_csv_format(self, tmp_path, capsys):
        spec = _write(tmp_path, "esop.json", _esop_dict())
        assert main(["price", "--input", spec, "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "product,method,value,std_error,seed"
        assert lines[1].startswith("esop,analytic,")

    def test_output_file(self, tmp_path, capsys):
        spec = _write(tmp_path, "esop.json", _esop_dict())
        out = tmp_path / "quote.json"
        assert main(["price", "--input", spec, "--output", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text())["quote"]["method"] == "analytic"

    def test_invalid_spec_lists_violations(self, tmp_path, capsys):
        spec = _write(tmp_path, "bad.json", _esop_dict(beta=2.0))
        assert main(["price", "--input", spec]) == 2
        assert "beta must lie in [0, 1]" in capsys.readouterr().err

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["price", "--input", str(path)]) == 2

    def test_missing_input(self, capsys):
        assert main(["price"]) == 2
        assert "--input is required" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["price", "--input", str(tmp_path / "absent.json")]) == 2


class TestVerify:
    FAST = ["--grid-nodes", "64", "--time-steps", "16", "--paths", "4000"]

    def test_single_product_passes(self, tmp_path, capsys):
        spec = _write(tmp_path, "esop.json", _esop_dict(beta=0.0))
        assert main(["verify", "--input", spec, *self.FAST]) == 0
        suite = json.loads(capsys.readouterr().out)
        assert suite["all_passed"] is True
        assert suite["summary"]["products"] == 1
        assert suite["reports"][0]["label"] == "esop"

    def test_impossible_tolerance_exits_three(self, tmp_path, capsys):
        spec = _write(tmp_path, "esop.json", _esop_dict())
        rc = main(["verify", "--input", spec, *self.FAST, "--tol", "1e-15"])
        assert rc == 3
        suite = json.loads(capsys.readouterr().out)
        assert suite["all_passed"] is False

    def test_csv_format(self, tmp_path, capsys):
        spec = _write(tmp_path, "esop.json", _esop_dict(beta=0.0))
        rc = main(["verify", "--input", spec, "--format", "csv", *self.FAST])
        assert rc == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "product,method,value,std_error,seed"
        assert len(lines) == 6

    def test_invalid_product(self, tmp_path, capsys):
        spec = _write(tmp_path, "bad.json", _esop_dict(beta=2.0))
        assert main(["verify", "--input", spec, *self.FAST]) == 2


class TestReduce:
    def test_loadings_exchange(self, tmp_path, capsys):
        cfg = {"loadings": [[0.2], [0.3]], "maturity": 2.0,
               "payoff": {"kind": "exchange", "asset": 1, "against": 0}}
        path = _write(tmp_path, "problem.json", cfg)
        assert main(["reduce", "--input", path]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["dim"] == 1
        # (sigma_1 - sigma_0)^2 for perfectly correlated single-factor loadings
        assert payload["b_matrix"][0][0] == pytest.approx(0.01, abs=1e-15)
        assert payload["psd"] is True
        assert payload["maturity"] == 2.0

    def test_covariance_csv(self, tmp_path, capsys):
        cfg = {"covariance": [[0.04, 0.03], [0.03, 0.09]],
               "payoff": {"kind": "relative_call", "asset": 1,
                          "strike_ratio": 1.1}}
        path = _write(tmp_path, "problem.json", cfg)
        assert main(["reduce", "--input", path, "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "i,j,b"
        assert lines[1] == "0,0,%.17g" % 0.07

    def test_three_assets(self, tmp_path, capsys):
        cfg = {"covariance": [[0.04, 0.0, 0.0], [0.0, 0.09, 0.0],
                              [0.0, 0.0, 0.01]],
               "payoff": {"kind": "max"}}
        path = _write(tmp_path, "problem.json", cfg)
        assert main(["reduce", "--input", path]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["dim"] == 2
        assert payload["psd"] is True

    def test_unknown_payoff_kind(self, tmp_path, capsys):
        cfg = {"covariance": [[0.04]], "payoff": {"kind": "butterfly"}}
        path = _write(tmp_path, "problem.json", cfg)
        assert main(["reduce", "--input", path]) == 2

    def test_index_out_of_range(self, tmp_path, capsys):
        cfg = {"covariance": [[0.04, 0.0], [0.0, 0.09]],
               "payoff": {"kind": "exchange", "asset": 5}}
        path = _write(tmp_path, "problem.json", cfg)
        assert main(["reduce", "--input", path]) == 2

    def test_missing_matrix(self, tmp_path, capsys):
        path = _write(tmp_path, "problem.json", {"payoff": {"kind": "max"}})
        assert main(["reduce", "--input", path]) == 2


class TestCurve:
    def test_json_values(self, tmp_path, capsys):
        path = _write(tmp_path, "curve.json", VASICEK_CFG)
        assert main(["curve", "--input", path]) == 0
        rows = json.loads(capsys.readouterr().out)["curve"]
        model = ratecurve.VasicekModel(theta=0.5, mu_r=0.05, sigma_r=0.01,
                                       lam=0.0, r0=0.03)
        assert [r["maturity"] for r in rows] == [1.0, 5.0]
        for row in rows:
            assert row["bond_price"] == pytest.approx(
                ratecurve.bond_price(model, 0.03, 0.0, row["maturity"]),
                rel=1e-15)
            assert row["sigma_p"] == pytest.approx(
                ratecurve.sigma_p(model, 0.0, row["maturity"]), rel=1e-15)

    def test_csv_header(self, tmp_path, capsys):
        path = _write(tmp_path, "curve.json", VASICEK_CFG)
        assert main(["curve", "--input", path, "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "maturity,bond_price,sigma_p"
        assert len(lines) == 3

    def test_missing_block(self, tmp_path, capsys):
        path = _write(tmp_path, "curve.json", {"maturities": [1.0]})
        assert main(["curve", "--input", path]) == 2

    def test_negative_maturity(self, tmp_path, capsys):
        cfg = dict(VASICEK_CFG, maturities=[-1.0])
        path = _write(tmp_path, "curve.json", cfg)
        assert main(["curve", "--input", path]) == 2


class TestConsoleEntry:
    def test_module_invocation(self, tmp_path):
        path = _write(tmp_path, "curve.json", VASICEK_CFG)
        proc = subprocess.run(
            [sys.executable, "-m", "numerkit.cli", "curve", "--input", path],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["curve"]
