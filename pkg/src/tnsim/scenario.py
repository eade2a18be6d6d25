"""Scenario documents: the versioned JSON schema for simulation runs.

A scenario fixes everything a run needs: chain constants, controller
tuning, the hashrate model, epoch-grain exogenous time-paths (piecewise
constant), the synthetic transaction workload, the initial ledger and the
RNG seed. Validation aggregates every problem into one report so a bad
document is rejected with a full list of field errors.

Schema sketch (version 1):

    {
      "version": 1,
      "horizon_epochs": 20,
      "seed": 7,
      "chain": {"blocks_per_epoch": 144, "target_block_interval": 600,
                 "clamp_factor": 4, "hash_scale": 1,
                 "initial_difficulty": null},
      "controller": {"tau": 0.9, "gamma": 0.9,
                      "dt_upper": 8.0, "dt_lower": 4.0,
                      "nash_guard_enabled": false},
      "market": {"model": "closed_form", "competition_margin": 0,
                  "electricity_price": 0.05,
                  "alphas": null,
                  "electricity_price_feedback": {"enabled": false,
                                                   "elasticity": -2.06}},
      "paths": {"exchange_rate": [[0, 30000.0]],
                 "unit_hash_cost": [[0, 100.0]],
                 "asic_efficiency": [[0, 1e9]]},
      "workload": {"txs_per_block": 3, "fee_mean": 50000,
                    "amount_fraction": [0.01, 0.2],
                    "coinbase_initial": 500000000,
                    "halving_interval_epochs": null,
                    "miner_address": "miner"},
      "ledger": {"balances": {"alice": 6000000000, "bob": 4000000000}}
    }

Time-path series are lists of [from_epoch, value] segments, 0-indexed from
the first simulated epoch; the first segment must start at epoch 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .chain import ChainParams
from .controller import ControllerParams
from .costs import (
    ELECTRICITY_DEMAND_ELASTICITY,
    CostModelError,
    IntervalResult,
    curve_from_json_dict,
    optimal_interval,
)
from .market import HashrateModel

SCHEMA_VERSION = 1


class ScenarioValidationError(Exception):
    """Scenario document rejected; .errors is a machine-readable report."""

    def __init__(self, errors: list[dict]):
        super().__init__("; ".join(e["field"] + ": " + e["message"] for e in errors))
        self.errors = errors


@dataclass(frozen=True)
class Series:
    """Piecewise-constant epoch series: [(from_epoch, value), ...]."""

    segments: tuple[tuple[int, float], ...]

    def value_at(self, epoch: int) -> float:
        value = self.segments[0][1]
        for start, v in self.segments:
            if start <= epoch:
                value = v
            else:
                break
        return value


@dataclass(frozen=True)
class WorkloadConfig:
    txs_per_block: int = 0
    fee_mean: float = 50_000.0
    amount_fraction: tuple[float, float] = (0.01, 0.2)
    coinbase_initial: int = 500_000_000
    halving_interval_epochs: int | None = None
    miner_address: str = "miner"

    def coinbase_at(self, epoch_index: int) -> int:
        """Coinbase for a 1-indexed epoch, halving on schedule if set."""
        if not self.halving_interval_epochs:
            return self.coinbase_initial
        return self.coinbase_initial >> ((epoch_index - 1) // self.halving_interval_epochs)

    def expected_total_reward(self, epoch_index: int) -> int:
        return self.coinbase_at(epoch_index) + int(
            round(self.txs_per_block * self.fee_mean)
        )


@dataclass(frozen=True)
class MarketConfig:
    model: HashrateModel
    competition_margin: float = 0.0
    electricity_price: float = 0.0
    price_feedback_enabled: bool = False
    price_feedback_elasticity: float = ELECTRICITY_DEMAND_ELASTICITY


@dataclass(frozen=True)
class Scenario:
    horizon_epochs: int
    seed: int
    chain: ChainParams
    controller: ControllerParams
    market: MarketConfig
    exchange_rate: Series
    unit_hash_cost: Series
    asic_efficiency: Series
    workload: WorkloadConfig
    initial_balances: dict[str, int] = field(default_factory=dict)
    initial_difficulty: float | None = None
    interval_result: IntervalResult | None = None  # set when bounds came from curves


def _err(errors: list[dict], fieldname: str, message: str) -> None:
    errors.append({"field": fieldname, "message": message})


def _get_number(doc, key, errors, fieldname, *, positive=False, default=None):
    value = doc.get(key, default)
    if value is None:
        _err(errors, fieldname, "required")
        return None
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        _err(errors, fieldname, "must be a number")
        return None
    if positive and value <= 0:
        _err(errors, fieldname, "must be positive")
        return None
    return value


def _parse_series(raw, horizon, errors, fieldname) -> Series | None:
    if not isinstance(raw, list) or not raw:
        _err(errors, fieldname, "must be a non-empty list of [from_epoch, value]")
        return None
    segments: list[tuple[int, float]] = []
    for i, seg in enumerate(raw):
        if (
            not isinstance(seg, (list, tuple))
            or len(seg) != 2
            or not isinstance(seg[0], int)
            or isinstance(seg[0], bool)
            or not isinstance(seg[1], (int, float))
        ):
            _err(errors, f"{fieldname}[{i}]", "must be [int_epoch, number]")
            return None
        segments.append((seg[0], float(seg[1])))
    if segments[0][0] != 0:
        _err(errors, fieldname, "first segment must start at epoch 0")
        return None
    starts = [s for s, _ in segments]
    if any(b <= a for a, b in zip(starts, starts[1:])):
        _err(errors, fieldname, "segment starts must strictly increase")
        return None
    if any(v <= 0 for _, v in segments):
        _err(errors, fieldname, "series values must be positive")
        return None
    if horizon is not None and starts[-1] >= horizon > 0:
        _err(errors, fieldname, "segment starts past the horizon")
        return None
    return Series(segments=tuple(segments))


def scenario_from_json_dict(doc: dict) -> Scenario:
    """Parse and fully validate a scenario document.

    Raises ScenarioValidationError carrying every field error found.
    """
    errors: list[dict] = []
    if not isinstance(doc, dict):
        raise ScenarioValidationError([{"field": "", "message": "must be an object"}])
    if doc.get("version") != SCHEMA_VERSION:
        _err(errors, "version", f"must be {SCHEMA_VERSION}")

    horizon = doc.get("horizon_epochs")
    if not isinstance(horizon, int) or isinstance(horizon, bool) or horizon < 0:
        _err(errors, "horizon_epochs", "must be a non-negative integer")
        horizon = None
    seed = doc.get("seed")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        _err(errors, "seed", "must be a non-negative integer")
        seed = 0

    chain_doc = doc.get("chain") or {}
    m = chain_doc.get("blocks_per_epoch", 2016)
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        _err(errors, "chain.blocks_per_epoch", "must be a positive integer")
        m = 1
    t_star = _get_number(
        chain_doc, "target_block_interval", errors,
        "chain.target_block_interval", positive=True, default=600.0,
    )
    clamp = _get_number(
        chain_doc, "clamp_factor", errors, "chain.clamp_factor",
        positive=True, default=4.0,
    )
    if clamp is not None and clamp <= 1:
        _err(errors, "chain.clamp_factor", "must be > 1")
        clamp = 4.0
    kappa = _get_number(
        chain_doc, "hash_scale", errors, "chain.hash_scale",
        positive=True, default=1.0,
    )
    initial_difficulty = chain_doc.get("initial_difficulty")
    if initial_difficulty is not None and (
        not isinstance(initial_difficulty, (int, float))
        or isinstance(initial_difficulty, bool)
        or initial_difficulty < 1
    ):
        _err(errors, "chain.initial_difficulty", "must be a number >= 1 or null")
        initial_difficulty = None

    ctrl_doc = doc.get("controller") or {}
    tau = _get_number(ctrl_doc, "tau", errors, "controller.tau", default=0.9)
    gamma = _get_number(ctrl_doc, "gamma", errors, "controller.gamma", default=0.9)
    for name, value in (("tau", tau), ("gamma", gamma)):
        if value is not None and not 0 < value < 1:
            _err(errors, f"controller.{name}", "must lie in (0, 1)")

    # D/T bounds come either explicitly or from a cost-curve interval search.
    interval_doc = ctrl_doc.get("interval")
    interval_result: IntervalResult | None = None
    interval_bounds: tuple[float, float] | None = None  # (n_low, n_high)
    if interval_doc is not None and ("dt_upper" in ctrl_doc or "dt_lower" in ctrl_doc):
        _err(errors, "controller.interval",
             "give either explicit dt bounds or an interval block, not both")
        interval_doc = None
    if interval_doc is not None:
        try:
            env = curve_from_json_dict(interval_doc["environmental"])
            sec = curve_from_json_dict(interval_doc["security"])
            domain = interval_doc["domain"]
            interval_result = optimal_interval(
                env, sec, (float(domain[0]), float(domain[1])),
                grid=int(interval_doc.get("grid", 10_000)),
                tolerance=float(interval_doc.get("tolerance", 0.0)),
            )
        except (CostModelError, KeyError, TypeError, ValueError, IndexError) as exc:
            _err(errors, "controller.interval", f"invalid interval block: {exc}")
        else:
            if interval_result.n_low >= interval_result.n_high:
                _err(errors, "controller.interval",
                     "interval collapsed to a point; increase tolerance")
            else:
                interval_bounds = (interval_result.n_low, interval_result.n_high)
        dt_upper = dt_lower = None
        if interval_bounds is not None and kappa is not None:
            scale = kappa * m
            dt_lower = interval_bounds[0] / scale
            dt_upper = interval_bounds[1] / scale
    else:
        dt_upper = _get_number(
            ctrl_doc, "dt_upper", errors, "controller.dt_upper", positive=True
        )
        dt_lower = _get_number(
            ctrl_doc, "dt_lower", errors, "controller.dt_lower", positive=True
        )
    if dt_upper is not None and dt_lower is not None and dt_lower >= dt_upper:
        _err(errors, "controller.dt_lower", "must be < dt_upper")
        dt_upper = dt_lower = None
    nash_guard = bool(ctrl_doc.get("nash_guard_enabled", False))
    n_upper = ctrl_doc.get("n_upper")
    n_lower = ctrl_doc.get("n_lower")
    if interval_bounds is not None:
        if n_lower is None:
            n_lower = max(1.0, interval_bounds[0])
        if n_upper is None:
            n_upper = max(1.0, interval_bounds[1])
    for name, value in (("n_upper", n_upper), ("n_lower", n_lower)):
        if value is not None and (
            not isinstance(value, (int, float)) or isinstance(value, bool) or value < 1
        ):
            _err(errors, f"controller.{name}", "must be a number >= 1 or null")
    if nash_guard and (n_upper is None or n_lower is None):
        _err(errors, "controller.n_upper", "required when nash_guard_enabled")

    market_doc = doc.get("market") or {}
    model_kind = market_doc.get("model", "closed_form")
    model = None
    if model_kind == "closed_form":
        model = HashrateModel(kind="closed_form")
    elif model_kind == "log_regression":
        alphas = market_doc.get("alphas")
        if (
            not isinstance(alphas, list)
            or len(alphas) != 4
            or not all(isinstance(a, (int, float)) for a in alphas)
        ):
            _err(errors, "market.alphas", "log_regression requires 4 numbers")
        else:
            model = HashrateModel(
                kind="log_regression", alphas=tuple(float(a) for a in alphas)
            )
    else:
        _err(errors, "market.model", "must be closed_form or log_regression")
    phi = market_doc.get("competition_margin", 0.0)
    if not isinstance(phi, (int, float)) or isinstance(phi, bool) or phi < 0:
        _err(errors, "market.competition_margin", "must be a non-negative number")
        phi = 0.0
    elec_price = market_doc.get("electricity_price", 0.0)
    if not isinstance(elec_price, (int, float)) or elec_price < 0:
        _err(errors, "market.electricity_price", "must be a non-negative number")
        elec_price = 0.0
    feedback_doc = market_doc.get("electricity_price_feedback") or {}
    feedback_enabled = bool(feedback_doc.get("enabled", False))
    elasticity = feedback_doc.get("elasticity", ELECTRICITY_DEMAND_ELASTICITY)
    if not isinstance(elasticity, (int, float)) or elasticity == 0:
        _err(errors, "market.electricity_price_feedback.elasticity",
             "must be a nonzero number")
        elasticity = ELECTRICITY_DEMAND_ELASTICITY

    paths_doc = doc.get("paths") or {}
    series = {}
    for name in ("exchange_rate", "unit_hash_cost", "asic_efficiency"):
        series[name] = _parse_series(
            paths_doc.get(name), horizon, errors, f"paths.{name}"
        )

    wl_doc = doc.get("workload") or {}
    txs = wl_doc.get("txs_per_block", 0)
    if not isinstance(txs, int) or isinstance(txs, bool) or txs < 0:
        _err(errors, "workload.txs_per_block", "must be a non-negative integer")
        txs = 0
    fee_mean = wl_doc.get("fee_mean", 50_000.0)
    if not isinstance(fee_mean, (int, float)) or fee_mean < 0:
        _err(errors, "workload.fee_mean", "must be a non-negative number")
        fee_mean = 0.0
    frac = wl_doc.get("amount_fraction", [0.01, 0.2])
    if (
        not isinstance(frac, (list, tuple))
        or len(frac) != 2
        or not all(isinstance(f, (int, float)) for f in frac)
        or not 0 < frac[0] <= frac[1] < 1
    ):
        _err(errors, "workload.amount_fraction", "must be [lo, hi] with 0<lo<=hi<1")
        frac = (0.01, 0.2)
    coinbase = wl_doc.get("coinbase_initial", 500_000_000)
    if not isinstance(coinbase, int) or isinstance(coinbase, bool) or coinbase < 0:
        _err(errors, "workload.coinbase_initial", "must be a non-negative integer")
        coinbase = 0
    halving = wl_doc.get("halving_interval_epochs")
    if halving is not None and (
        not isinstance(halving, int) or isinstance(halving, bool) or halving < 1
    ):
        _err(errors, "workload.halving_interval_epochs",
             "must be a positive integer or null")
        halving = None
    miner_address = wl_doc.get("miner_address", "miner")
    if not isinstance(miner_address, str) or not miner_address:
        _err(errors, "workload.miner_address", "must be a non-empty string")
        miner_address = "miner"

    ledger_doc = doc.get("ledger") or {}
    balances_doc = ledger_doc.get("balances", {})
    balances: dict[str, int] = {}
    if not isinstance(balances_doc, dict):
        _err(errors, "ledger.balances", "must be an object of address -> Satoshi")
    else:
        for addr, amount in balances_doc.items():
            if not isinstance(amount, int) or isinstance(amount, bool) or amount < 0:
                _err(errors, f"ledger.balances.{addr}",
                     "must be a non-negative integer")
            else:
                balances[str(addr)] = amount
    if txs > 0 and len(balances) < 2:
        _err(errors, "ledger.balances",
             "need at least 2 funded addresses for a transaction workload")

    if errors:
        raise ScenarioValidationError(errors)

    return Scenario(
        horizon_epochs=horizon,
        seed=seed,
        chain=ChainParams(
            blocks_per_epoch=m,
            target_block_interval=float(t_star),
            clamp_factor=float(clamp),
            hash_scale=float(kappa),
        ),
        controller=ControllerParams(
            tau=float(tau),
            gamma=float(gamma),
            dt_upper=float(dt_upper),
            dt_lower=float(dt_lower),
            nash_guard_enabled=nash_guard,
            n_upper=float(n_upper) if n_upper is not None else None,
            n_lower=float(n_lower) if n_lower is not None else None,
        ),
        market=MarketConfig(
            model=model,
            competition_margin=float(phi),
            electricity_price=float(elec_price),
            price_feedback_enabled=feedback_enabled,
            price_feedback_elasticity=float(elasticity),
        ),
        exchange_rate=series["exchange_rate"],
        unit_hash_cost=series["unit_hash_cost"],
        asic_efficiency=series["asic_efficiency"],
        workload=WorkloadConfig(
            txs_per_block=txs,
            fee_mean=float(fee_mean),
            amount_fraction=(float(frac[0]), float(frac[1])),
            coinbase_initial=coinbase,
            halving_interval_epochs=halving,
            miner_address=miner_address,
        ),
        initial_balances=balances,
        initial_difficulty=(
            float(initial_difficulty) if initial_difficulty is not None else None
        ),
        interval_result=interval_result,
    )


def scenario_to_json_dict(s: Scenario) -> dict:
    """Inverse of scenario_from_json_dict (canonical field order)."""
    return {
        "version": SCHEMA_VERSION,
        "horizon_epochs": s.horizon_epochs,
        "seed": s.seed,
        "chain": {
            "blocks_per_epoch": s.chain.blocks_per_epoch,
            "target_block_interval": s.chain.target_block_interval,
            "clamp_factor": s.chain.clamp_factor,
            "hash_scale": s.chain.hash_scale,
            "initial_difficulty": s.initial_difficulty,
        },
        "controller": {
            "tau": s.controller.tau,
            "gamma": s.controller.gamma,
            "dt_upper": s.controller.dt_upper,
            "dt_lower": s.controller.dt_lower,
            "nash_guard_enabled": s.controller.nash_guard_enabled,
            "n_upper": s.controller.n_upper,
            "n_lower": s.controller.n_lower,
        },
        "market": {
            "model": s.market.model.kind,
            "alphas": list(s.market.model.alphas) if s.market.model.alphas else None,
            "competition_margin": s.market.competition_margin,
            "electricity_price": s.market.electricity_price,
            "electricity_price_feedback": {
                "enabled": s.market.price_feedback_enabled,
                "elasticity": s.market.price_feedback_elasticity,
            },
        },
        "paths": {
            "exchange_rate": [list(seg) for seg in s.exchange_rate.segments],
            "unit_hash_cost": [list(seg) for seg in s.unit_hash_cost.segments],
            "asic_efficiency": [list(seg) for seg in s.asic_efficiency.segments],
        },
        "workload": {
            "txs_per_block": s.workload.txs_per_block,
            "fee_mean": s.workload.fee_mean,
            "amount_fraction": list(s.workload.amount_fraction),
            "coinbase_initial": s.workload.coinbase_initial,
            "halving_interval_epochs": s.workload.halving_interval_epochs,
            "miner_address": s.workload.miner_address,
        },
        "ledger": {"balances": dict(sorted(s.initial_balances.items()))},
    }


def load_scenario(path: str | Path) -> Scenario:
    with Path(path).open() as fh:
        return scenario_from_json_dict(json.load(fh))
