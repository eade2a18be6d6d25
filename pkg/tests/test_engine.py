"""Scenario runs: composition, determinism, exports and validation."""

import json

import pytest

from conftest import make_scenario_doc
from tnsim.engine import (
    TRAJECTORY_COLUMNS,
    export_trajectory,
    load_trajectory_json,
    run_simulation,
    trajectory_to_csv_bytes,
    trajectory_to_json_bytes,
)
from tnsim.scenario import (
    ScenarioValidationError,
    scenario_from_json_dict,
    scenario_to_json_dict,
)

TICKS = 1_000_000


def run_doc(doc):
    return run_simulation(scenario_from_json_dict(doc))


class TestRunSimulation:
    def test_zero_horizon_gives_empty_trajectory(self):
        records = run_doc(make_scenario_doc(horizon_epochs=0))
        assert records == []

    def test_constant_inputs_inside_interval_stay_unconstrained(self):
        # equilibrium N = e*P/c = 30000*5/150 = 1000; D/T centers on
        # N/m = 15.625, inside [10, 20], so no bound ever activates
        records = run_doc(make_scenario_doc(horizon_epochs=6, seed=3))
        assert len(records) == 6
        assert all(r.mode == "unconstrained" for r in records)
        assert all(r.bound is None for r in records)

    def test_exchange_rate_step_triggers_ceiling(self):
        # N sits just under the upper bound; e doubles from epoch 10 and
        # pushes equilibrium hashrate to 2x, so a ceiling must appear by
        # epoch 12 at the latest
        doc = make_scenario_doc(
            horizon_epochs=13,
            seed=5,
            **{
                "paths.exchange_rate": [[0, 30000.0], [9, 60000.0]],
                "paths.unit_hash_cost": [[0, 125.0]],  # N0 = 1200, bound at 1280
            },
        )
        records = run_doc(doc)
        assert any(r.mode == "ceiling" for r in records[9:12])

    def test_neutrality_holds_on_every_record(self):
        # drive the controller hard so caps and floors both fire
        doc = make_scenario_doc(
            horizon_epochs=10,
            seed=7,
            **{"controller.dt_upper": 12.0, "controller.dt_lower": 11.0},
        )
        records = run_doc(doc)
        assert any(r.mode != "unconstrained" for r in records)
        for r in records:
            assert r.agg_sp_targeted == r.agg_sp_nakamoto

    def test_difficulty_returns_to_target_after_hashrate_shock(self):
        # 10x exchange-rate step from epoch 4; the clamp limits D to 4x per
        # epoch and elapsed time is back within 5% of target by the third
        # epoch after the shock
        doc = make_scenario_doc(
            horizon_epochs=7,
            seed=13,
            **{
                "chain.blocks_per_epoch": 2016,
                "controller.dt_upper": 1e6,
                "controller.dt_lower": 1e-6,
                "paths.exchange_rate": [[0, 30000.0], [3, 300000.0]],
                "workload.txs_per_block": 0,
            },
        )
        records = run_doc(doc)
        target_ticks = 2016 * 600.0 * TICKS
        ratios = [r.elapsed_ticks / target_ticks for r in records]
        # per-epoch difficulty correction never exceeds the clamp factor
        for prev, cur in zip(records, records[1:]):
            change = cur.difficulty / prev.difficulty
            assert 0.25 - 1e-12 <= change <= 4.0 + 1e-12
        assert abs(ratios[5] - 1.0) <= 0.05  # epoch 6: two epochs after shock
        assert abs(ratios[6] - 1.0) <= 0.05

    def test_halving_schedule_reduces_coinbase(self):
        doc = make_scenario_doc(
            horizon_epochs=4,
            **{
                "workload.halving_interval_epochs": 2,
                "workload.txs_per_block": 0,
            },
        )
        records = run_doc(doc)
        assert records[0].median_total_reward == 5_0000_0000
        assert records[2].median_total_reward == 2_5000_0000


class TestDeterminism:
    def test_same_seed_byte_identical_exports(self, scenario_doc):
        a = run_doc(scenario_doc)
        b = run_doc(scenario_doc)
        assert trajectory_to_csv_bytes(a) == trajectory_to_csv_bytes(b)
        assert trajectory_to_json_bytes(a) == trajectory_to_json_bytes(b)

    def test_different_seed_differs(self, scenario_doc):
        a = run_doc(scenario_doc)
        b = run_doc(make_scenario_doc(seed=12))
        assert trajectory_to_csv_bytes(a) != trajectory_to_csv_bytes(b)


class TestExports:
    def test_csv_shape(self, tmp_path, scenario_doc):
        records = run_doc(make_scenario_doc(horizon_epochs=1))
        path = tmp_path / "t.csv"
        export_trajectory(records, "csv", path)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(TRAJECTORY_COLUMNS)
        assert len(lines) == 2

    def test_empty_csv_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            export_trajectory([], "csv", tmp_path / "t.csv")

    def test_json_round_trip(self, tmp_path, scenario_doc):
        records = run_doc(scenario_doc)
        path = tmp_path / "t.json"
        export_trajectory(records, "json", path)
        assert load_trajectory_json(path) == records

    def test_double_export_is_byte_identical(self, tmp_path, scenario_doc):
        records = run_doc(scenario_doc)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        export_trajectory(records, "csv", p1)
        export_trajectory(records, "csv", p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_unknown_format_rejected(self, tmp_path, scenario_doc):
        with pytest.raises(ValueError):
            export_trajectory(run_doc(scenario_doc), "xml", tmp_path / "t.xml")


class TestScenarioValidation:
    def test_errors_are_aggregated(self):
        doc = make_scenario_doc(
            **{
                "controller.tau": 1.5,
                "workload.txs_per_block": -1,
                "paths.exchange_rate": [[1, 100.0]],
            }
        )
        with pytest.raises(ScenarioValidationError) as exc:
            scenario_from_json_dict(doc)
        fields = {e["field"] for e in exc.value.errors}
        assert "controller.tau" in fields
        assert "workload.txs_per_block" in fields
        assert "paths.exchange_rate" in fields

    def test_inverted_bounds_rejected(self):
        doc = make_scenario_doc(
            **{"controller.dt_upper": 5.0, "controller.dt_lower": 10.0}
        )
        with pytest.raises(ScenarioValidationError) as exc:
            scenario_from_json_dict(doc)
        assert any("dt_lower" in e["field"] for e in exc.value.errors)

    def test_interval_block_derives_bounds(self):
        doc = make_scenario_doc()
        del doc["controller"]["dt_upper"]
        del doc["controller"]["dt_lower"]
        doc["controller"]["interval"] = {
            "environmental": {"kind": "power_law", "scale": 1.0, "exponent": 1.0,
                               "direction": "increasing"},
            "security": {"kind": "power_law", "scale": 1e6, "exponent": -1.0,
                          "direction": "decreasing"},
            "domain": [100.0, 5000.0],
            "tolerance": 50.0,
        }
        scenario = scenario_from_json_dict(doc)
        assert scenario.interval_result is not None
        # sqrt(1e6) = 1000 sits inside the derived hashrate band
        assert scenario.interval_result.n_low < 1000 < scenario.interval_result.n_high
        m = scenario.chain.blocks_per_epoch
        assert scenario.controller.dt_upper == pytest.approx(
            scenario.interval_result.n_high / m
        )
        assert scenario.controller.n_upper == scenario.interval_result.n_high

    def test_interval_block_fills_nash_guard_bounds(self):
        doc = make_scenario_doc()
        del doc["controller"]["dt_upper"]
        del doc["controller"]["dt_lower"]
        doc["controller"]["nash_guard_enabled"] = True
        doc["controller"]["interval"] = {
            "environmental": {"kind": "power_law", "scale": 1.0, "exponent": 1.0,
                               "direction": "increasing"},
            "security": {"kind": "power_law", "scale": 1e6, "exponent": -1.0,
                          "direction": "decreasing"},
            "domain": [100.0, 5000.0],
            "tolerance": 50.0,
        }
        scenario = scenario_from_json_dict(doc)
        assert scenario.controller.nash_guard_enabled
        assert scenario.controller.n_upper == scenario.interval_result.n_high
        assert scenario.controller.n_lower == scenario.interval_result.n_low

    def test_price_feedback_changes_cost_path(self):
        # with feedback on, the hashrate jump feeds back into unit cost and
        # damps the post-step hashrate relative to the no-feedback run
        base = make_scenario_doc(
            horizon_epochs=6,
            seed=2,
            **{"paths.exchange_rate": [[0, 30000.0], [2, 90000.0]]},
        )
        fb = make_scenario_doc(
            horizon_epochs=6,
            seed=2,
            **{
                "paths.exchange_rate": [[0, 30000.0], [2, 90000.0]],
                "market.electricity_price_feedback": {
                    "enabled": True,
                    "elasticity": 2.0,  # cost grows with the demand ratio
                },
            },
        )
        plain = run_doc(base)
        damped = run_doc(fb)
        assert damped[-1].hashrate_model < plain[-1].hashrate_model

    def test_series_lookup_uses_latest_segment(self):
        doc = make_scenario_doc(
            horizon_epochs=8,
            **{"paths.exchange_rate": [[0, 1.0], [3, 2.0], [6, 3.0]]},
        )
        scenario = scenario_from_json_dict(doc)
        values = [scenario.exchange_rate.value_at(i) for i in range(8)]
        assert values == [1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0, 3.0]

    def test_round_trip_document(self, scenario_doc):
        scenario = scenario_from_json_dict(scenario_doc)
        doc2 = scenario_to_json_dict(scenario)
        assert scenario_from_json_dict(doc2) == scenario
        assert json.dumps(doc2, sort_keys=True)  # serializable
