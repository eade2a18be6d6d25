"""Simulator and control library for a reward-band hashrate-targeting PoW chain."""

from .chain import (
    BlockRecord,
    ChainParams,
    ChainState,
    EpochStats,
    adjust_difficulty,
    append_block,
    estimate_hashrate,
    hashrate_to_dt,
    sample_block_time,
)
from .controller import (
    ControllerParams,
    ControllerState,
    Mode,
    RewardAdjustment,
    apply_cap,
    controller_step,
    nash_adjustment_bound,
    scale_fees,
)
from .costs import CostCurve, IntervalResult, double_spend_profit, optimal_interval, per_hash_cost
from .engine import TrajectoryRecord, export_trajectory, run_simulation
from .ledger import (
    BlockSettlement,
    LedgerState,
    Transaction,
    aggregate_spending_potential,
    apply_reward_delta,
    compute_shares,
    rounding_assignment,
    settle_transactions,
    spending_potential,
)
from .market import (
    HashrateModel,
    MarketState,
    dynamic_profit,
    equilibrium_hashrate,
    hashrate_response,
    marginal_profit_wrt_hashrate,
    marginal_profit_wrt_reward,
    miner_profit,
    regression_hashrate,
)
from .scenario import Scenario, ScenarioValidationError, load_scenario, scenario_from_json_dict

__version__ = "0.1.0"

__all__ = [
    "BlockRecord",
    "BlockSettlement",
    "ChainParams",
    "ChainState",
    "ControllerParams",
    "ControllerState",
    "CostCurve",
    "EpochStats",
    "HashrateModel",
    "IntervalResult",
    "LedgerState",
    "MarketState",
    "Mode",
    "RewardAdjustment",
    "Scenario",
    "ScenarioValidationError",
    "TrajectoryRecord",
    "Transaction",
    "adjust_difficulty",
    "aggregate_spending_potential",
    "append_block",
    "apply_cap",
    "apply_reward_delta",
    "compute_shares",
    "controller_step",
    "double_spend_profit",
    "dynamic_profit",
    "equilibrium_hashrate",
    "estimate_hashrate",
    "export_trajectory",
    "hashrate_response",
    "hashrate_to_dt",
    "load_scenario",
    "marginal_profit_wrt_hashrate",
    "marginal_profit_wrt_reward",
    "miner_profit",
    "nash_adjustment_bound",
    "optimal_interval",
    "per_hash_cost",
    "regression_hashrate",
    "rounding_assignment",
    "run_simulation",
    "sample_block_time",
    "scale_fees",
    "scenario_from_json_dict",
    "settle_transactions",
    "spending_potential",
]
