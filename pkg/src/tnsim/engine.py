"""Scenario runner: composes chain, market, controller and ledger per epoch.

Each epoch: (1) the hashrate model maps the expected miner reward (capped
or floored by the controller state entering the epoch) and current market
conditions to a hashrate; (2) block times are sampled at the difficulty in
effect; (3) every block settles a synthetic transaction workload, pays the
miner the capped reward, and offsets the difference through the ledger's
pool/remainder accounts; (4) the epoch closes: difficulty retargets and the
controller steps on the epoch's D/T statistic.

A plain counterfactual ledger (miner always paid the full total reward) is
replayed alongside; the run aborts if aggregate spending potential ever
diverges from it, so every emitted record carries a verified neutrality
pair. Runs are deterministic: one seeded generator drives both block times
and the workload.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chain import (
    BlockRecord,
    ChainState,
    adjust_difficulty,
    append_block,
    estimate_hashrate,
    sample_epoch_ticks,
)
from .controller import ControllerState, apply_cap, controller_step, scale_fees
from .ledger import (
    BlockSettlement,
    LedgerState,
    Transaction,
    aggregate_spending_potential,
    apply_nakamoto_baseline,
    apply_reward_delta,
    compute_shares,
    plan_transactions,
    rounding_assignment,
    settle_transactions,
)
from .market import SATOSHI_PER_BTC, MarketState, model_hashrate
from .scenario import Scenario

TRAJECTORY_COLUMNS = (
    "epoch",
    "D",
    "T",
    "DT",
    "N_est",
    "N_model",
    "mode",
    "bound",
    "median_total_reward",
    "median_miner_reward",
    "xi_mean",
    "agg_sp_targeted",
    "agg_sp_nakamoto",
    "pool",
    "remainder",
)


class SimulationError(Exception):
    pass


class NeutralityViolation(SimulationError):
    """Aggregate spending potential diverged from the plain-ledger replay."""


@dataclass(frozen=True)
class TrajectoryRecord:
    """One epoch of observables. mode/bound are the controller state set at
    this epoch's close (in force for the next epoch)."""

    epoch: int
    difficulty: float
    elapsed_ticks: int
    d_over_t: float
    hashrate_estimate: float
    hashrate_model: float
    mode: str
    bound: int | None
    median_total_reward: int
    median_miner_reward: int
    xi_mean: float
    agg_sp_targeted: int
    agg_sp_nakamoto: int
    pool: int
    remainder: int


def _market_at(scenario: Scenario, epoch_index: int, cost_factor: float) -> MarketState:
    offset = epoch_index - 1  # series are 0-indexed from the first epoch
    return MarketState(
        exchange_rate=scenario.exchange_rate.value_at(offset),
        unit_hash_cost=scenario.unit_hash_cost.value_at(offset) * cost_factor,
        competition_margin=scenario.market.competition_margin,
        asic_efficiency=scenario.asic_efficiency.value_at(offset),
        electricity_price=scenario.market.electricity_price,
    )


def _workload_transactions(
    rng: np.random.Generator, ledger: LedgerState, scenario: Scenario
) -> tuple[Transaction, ...]:
    wl = scenario.workload
    if wl.txs_per_block == 0:
        return ()
    addrs = sorted(a for a, v in ledger.balances.items() if v > 0)
    if len(addrs) < 2:
        return ()
    weights = np.array([ledger.balances[a] for a in addrs], dtype=float)
    probs = weights / weights.sum()
    lo, hi = wl.amount_fraction
    txs = []
    for _ in range(wl.txs_per_block):
        si = int(rng.choice(len(addrs), p=probs))
        rj = int(rng.integers(0, len(addrs) - 1))
        if rj >= si:
            rj += 1
        fee = 1 + int(rng.exponential(wl.fee_mean))
        sender = addrs[si]
        available = (
            ledger.balances.get(sender, 0)
            + ledger.pool_shares.get(sender, 0)
            - ledger.remainder_shares.get(sender, 0)
            - fee
        )
        amount = max(1, int(available * rng.uniform(lo, hi)))
        txs.append(Transaction(sender=sender, recipient=addrs[rj], amount=amount, fee=fee))
    return tuple(txs)


def run_simulation(scenario: Scenario) -> list[TrajectoryRecord]:
    """Execute the scenario and return one record per epoch."""
    if scenario.horizon_epochs == 0:
        return []

    rng = np.random.default_rng(scenario.seed)
    params = scenario.chain
    chain = ChainState(params=params)
    ledger = LedgerState(balances=dict(scenario.initial_balances))
    baseline = dict(scenario.initial_balances)
    ctrl = ControllerState()
    records: list[TrajectoryRecord] = []

    n_reference: float | None = None
    n_prev: float | None = None
    difficulty = scenario.initial_difficulty
    timestamp = 0

    for q in range(1, scenario.horizon_epochs + 1):
        cost_factor = 1.0
        if scenario.market.price_feedback_enabled and n_prev and n_reference:
            cost_factor = (n_prev / n_reference) ** (
                1.0 / scenario.market.price_feedback_elasticity
            )
        market = _market_at(scenario, q, cost_factor)
        expected_total = scenario.workload.expected_total_reward(q)
        expected_miner = apply_cap(ctrl, expected_total)
        n_model = model_hashrate(
            scenario.market.model, market, expected_miner / SATOSHI_PER_BTC
        )
        if not n_model > 0:
            raise SimulationError(f"model hashrate not positive in epoch {q}")
        if n_reference is None:
            n_reference = n_model
        n_prev = n_model

        if difficulty is None:
            # start on target for the initial model hashrate
            difficulty = max(
                1.0, n_model * params.target_block_interval / params.hash_scale
            )

        ticks = sample_epoch_ticks(
            difficulty, n_model, params.blocks_per_epoch, rng, params.hash_scale
        )
        coinbase = scenario.workload.coinbase_at(q)
        miner = scenario.workload.miner_address
        xi_values: list[float] = []
        miner_rewards: list[int] = []

        for b in range(params.blocks_per_epoch):
            candidates = _workload_transactions(rng, ledger, scenario)
            valid, _ = plan_transactions(ledger, candidates)
            fees = [tx.fee for tx in valid]
            total = coinbase + sum(fees)
            miner_reward = apply_cap(ctrl, total)
            if total > 0:
                xi_values.append(scale_fees(coinbase, fees, miner_reward).xi)
            else:
                xi_values.append(0.0)
            settle_transactions(
                ledger,
                BlockSettlement(
                    transactions=candidates,
                    miner=miner,
                    total_reward=total,
                    miner_reward=miner_reward,
                ),
            )
            q_delta = miner_reward - total
            if (
                q_delta != 0
                or ledger.unassigned_pool > 0
                or ledger.unassigned_remainder > 0
            ):
                shares = compute_shares(ledger)
                apply_reward_delta(ledger, q_delta, shares)
                rounding_assignment(ledger, shares)
            apply_nakamoto_baseline(baseline, valid, miner, total)
            if aggregate_spending_potential(ledger) != sum(baseline.values()):
                raise NeutralityViolation(
                    f"aggregate mismatch at epoch {q} block {b + 1}"
                )

            timestamp += int(ticks[b])
            miner_rewards.append(miner_reward)
            append_block(
                chain,
                BlockRecord(
                    height=(q - 1) * params.blocks_per_epoch + b + 1,
                    timestamp=timestamp,
                    difficulty=difficulty,
                    coinbase=coinbase,
                    fees=tuple(fees),
                    miner_reward_paid=miner_reward,
                ),
            )

        stats = chain.epochs[-1]
        ctrl = controller_step(ctrl, scenario.controller, stats)
        records.append(
            TrajectoryRecord(
                epoch=q,
                difficulty=stats.difficulty_in_effect,
                elapsed_ticks=stats.elapsed_ticks,
                d_over_t=stats.d_over_t,
                hashrate_estimate=estimate_hashrate(stats, params),
                hashrate_model=n_model,
                mode=ctrl.mode.value,
                bound=ctrl.value,
                median_total_reward=stats.median_total_reward,
                median_miner_reward=statistics.median_low(miner_rewards),
                xi_mean=float(np.mean(xi_values)) if xi_values else 0.0,
                agg_sp_targeted=aggregate_spending_potential(ledger),
                agg_sp_nakamoto=sum(baseline.values()),
                pool=ledger.pool_total,
                remainder=ledger.remainder_total,
            )
        )
        difficulty = adjust_difficulty(stats, params)

    return records


def _record_to_row(r: TrajectoryRecord) -> list[str]:
    return [
        str(r.epoch),
        repr(r.difficulty),
        str(r.elapsed_ticks),
        repr(r.d_over_t),
        repr(r.hashrate_estimate),
        repr(r.hashrate_model),
        r.mode,
        "" if r.bound is None else str(r.bound),
        str(r.median_total_reward),
        str(r.median_miner_reward),
        repr(r.xi_mean),
        str(r.agg_sp_targeted),
        str(r.agg_sp_nakamoto),
        str(r.pool),
        str(r.remainder),
    ]


def _record_to_dict(r: TrajectoryRecord) -> dict:
    return {
        "epoch": r.epoch,
        "D": r.difficulty,
        "T": r.elapsed_ticks,
        "DT": r.d_over_t,
        "N_est": r.hashrate_estimate,
        "N_model": r.hashrate_model,
        "mode": r.mode,
        "bound": r.bound,
        "median_total_reward": r.median_total_reward,
        "median_miner_reward": r.median_miner_reward,
        "xi_mean": r.xi_mean,
        "agg_sp_targeted": r.agg_sp_targeted,
        "agg_sp_nakamoto": r.agg_sp_nakamoto,
        "pool": r.pool,
        "remainder": r.remainder,
    }


def _record_from_dict(d: dict) -> TrajectoryRecord:
    return TrajectoryRecord(
        epoch=d["epoch"],
        difficulty=d["D"],
        elapsed_ticks=d["T"],
        d_over_t=d["DT"],
        hashrate_estimate=d["N_est"],
        hashrate_model=d["N_model"],
        mode=d["mode"],
        bound=d["bound"],
        median_total_reward=d["median_total_reward"],
        median_miner_reward=d["median_miner_reward"],
        xi_mean=d["xi_mean"],
        agg_sp_targeted=d["agg_sp_targeted"],
        agg_sp_nakamoto=d["agg_sp_nakamoto"],
        pool=d["pool"],
        remainder=d["remainder"],
    )


def trajectory_to_csv_bytes(records: list[TrajectoryRecord]) -> bytes:
    """Bit-stable CSV: fixed column order, repr() floats, LF line endings."""
    if not records:
        raise ValueError("cannot export an empty trajectory to csv")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRAJECTORY_COLUMNS)
    for r in records:
        writer.writerow(_record_to_row(r))
    return out.getvalue().encode()


def trajectory_to_json_bytes(records: list[TrajectoryRecord]) -> bytes:
    doc = {"version": 1, "records": [_record_to_dict(r) for r in records]}
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode()


def export_trajectory(
    records: list[TrajectoryRecord], format: str, path: str | Path
) -> None:
    """Write the trajectory to disk in csv or json form."""
    if format == "csv":
        payload = trajectory_to_csv_bytes(records)
    elif format == "json":
        payload = trajectory_to_json_bytes(records)
    else:
        raise ValueError(f"unknown trajectory format: {format}")
    Path(path).write_bytes(payload)


def trajectory_from_json_bytes(payload: bytes) -> list[TrajectoryRecord]:
    doc = json.loads(payload)
    if doc.get("version") != 1:
        raise ValueError(f"unsupported trajectory version: {doc.get('version')}")
    return [_record_from_dict(d) for d in doc["records"]]


def load_trajectory_json(path: str | Path) -> list[TrajectoryRecord]:
    return trajectory_from_json_bytes(Path(path).read_bytes())
