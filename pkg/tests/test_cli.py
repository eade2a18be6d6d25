"""CLI subcommands: simulate, calibrate, optimal-interval."""

import json
import math

import pytest

from conftest import make_scenario_doc
from tnsim.cli import main

HEADER = "period,miner_revenue_usd,energy_or_hashrate,asic_efficiency,electricity_cost\n"


def write_scenario(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


class TestSimulate:
    def test_writes_trajectory_figures_and_metadata(self, tmp_path, scenario_doc):
        scenario = write_scenario(tmp_path, scenario_doc)
        out = tmp_path / "run"
        code = main(["simulate", "--scenario", str(scenario), "--out", str(out)])
        assert code == 0
        assert (out / "trajectory.csv").exists()
        assert (out / "run.json").exists()
        for name in ("dt_signal.png", "hashrate.png", "rewards.png", "neutrality.png"):
            assert (out / name).stat().st_size > 0

    def test_json_format(self, tmp_path, scenario_doc):
        scenario = write_scenario(tmp_path, scenario_doc)
        out = tmp_path / "run"
        code = main(
            ["simulate", "--scenario", str(scenario), "--out", str(out),
             "--format", "json", "--no-figures"]
        )
        assert code == 0
        doc = json.loads((out / "trajectory.json").read_text())
        assert doc["version"] == 1
        assert len(doc["records"]) == scenario_doc["horizon_epochs"]

    def test_two_runs_are_byte_identical(self, tmp_path, scenario_doc):
        scenario = write_scenario(tmp_path, scenario_doc)
        for name in ("a", "b"):
            main(["simulate", "--scenario", str(scenario), "--out",
                  str(tmp_path / name), "--no-figures"])
        assert (tmp_path / "a" / "trajectory.csv").read_bytes() == (
            tmp_path / "b" / "trajectory.csv"
        ).read_bytes()

    def test_invalid_scenario_exits_2_with_report(self, tmp_path, capsys):
        doc = make_scenario_doc(**{"controller.tau": 7.0})
        scenario = write_scenario(tmp_path, doc)
        code = main(
            ["simulate", "--scenario", str(scenario), "--out", str(tmp_path / "x")]
        )
        assert code == 2
        report = json.loads(capsys.readouterr().err)
        assert any(e["field"] == "controller.tau" for e in report["errors"])

    def test_missing_file_exits_1(self, tmp_path):
        code = main(
            ["simulate", "--scenario", str(tmp_path / "none.json"), "--out",
             str(tmp_path / "x")]
        )
        assert code == 1


class TestCalibrate:
    def test_fits_and_writes_model(self, tmp_path):
        rows = [
            "%d,%f,%f,%f,%f"
            % (t, 1e5 + 31 * t, 90.0 + 7 * t, 1e6 + 900 * t * t, 0.05 + 0.001 * t)
            for t in range(30)
        ]
        data = tmp_path / "cal.csv"
        data.write_text(HEADER + "\n".join(rows) + "\n")
        out = tmp_path / "model.json"
        assert main(["calibrate", "--data", str(data), "--out", str(out)]) == 0
        model = json.loads(out.read_text())
        assert model["model"] == "log_regression"
        assert len(model["alphas"]) == 4
        assert model["rows"] == 30

    def test_bad_csv_exits_2(self, tmp_path, capsys):
        data = tmp_path / "cal.csv"
        data.write_text("period,nope\n1,2\n")
        assert main(["calibrate", "--data", str(data), "--out",
                     str(tmp_path / "m.json")]) == 2
        assert "errors" in json.loads(capsys.readouterr().err)


class TestOptimalInterval:
    def curves_doc(self):
        return {
            "environmental": {"kind": "power_law", "scale": 1.0, "exponent": 1.0,
                               "direction": "increasing"},
            "security": {"kind": "power_law", "scale": 100.0, "exponent": -1.0,
                          "direction": "decreasing"},
            "domain": [1.0, 50.0],
            "grid": 4096,
            "chain": {"blocks_per_epoch": 64, "hash_scale": 1.0},
        }

    def test_prints_interval_with_dt_mapping(self, tmp_path, capsys):
        curves = tmp_path / "curves.json"
        curves.write_text(json.dumps(self.curves_doc()))
        assert main(["optimal-interval", "--curves", str(curves)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert abs(out["n_low"] - 10.0) < 0.05  # sqrt(100)
        assert out["dt_upper"] == pytest.approx(out["n_high"] / 64)

    def test_out_dir_writes_json_and_figure(self, tmp_path):
        curves = tmp_path / "curves.json"
        curves.write_text(json.dumps(self.curves_doc()))
        out = tmp_path / "interval"
        assert main(["optimal-interval", "--curves", str(curves), "--out",
                     str(out)]) == 0
        result = json.loads((out / "interval.json").read_text())
        assert math.isclose(result["min_total_cost"], 20.0, rel_tol=1e-4)
        assert (out / "interval.png").stat().st_size > 0

    def test_bad_curves_exit_2(self, tmp_path, capsys):
        curves = tmp_path / "curves.json"
        curves.write_text(json.dumps({"environmental": {"kind": "nope"}}))
        assert main(["optimal-interval", "--curves", str(curves)]) == 2
        assert "error" in json.loads(capsys.readouterr().err)
