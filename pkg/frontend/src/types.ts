/** Wire types mirroring the run service's JSON documents. */

export type SeriesSegments = Array<[number, number]>; // [from_epoch, value]

export interface ScenarioDocument {
  version: number;
  horizon_epochs: number;
  seed: number;
  chain: {
    blocks_per_epoch: number;
    target_block_interval: number;
    clamp_factor: number;
    hash_scale: number;
    initial_difficulty?: number | null;
  };
  controller: {
    tau: number;
    gamma: number;
    dt_upper: number;
    dt_lower: number;
    nash_guard_enabled?: boolean;
    n_upper?: number | null;
    n_lower?: number | null;
  };
  market: {
    model: "closed_form" | "log_regression";
    alphas?: number[] | null;
    competition_margin?: number;
    electricity_price?: number;
  };
  paths: {
    exchange_rate: SeriesSegments;
    unit_hash_cost: SeriesSegments;
    asic_efficiency: SeriesSegments;
  };
  workload: {
    txs_per_block: number;
    fee_mean: number;
    amount_fraction?: [number, number];
    coinbase_initial: number;
    halving_interval_epochs?: number | null;
    miner_address?: string;
  };
  ledger: { balances: Record<string, number> };
}

export interface TrajectoryRecord {
  epoch: number;
  D: number;
  T: number; // microticks
  DT: number;
  N_est: number;
  N_model: number;
  mode: "unconstrained" | "ceiling" | "floor";
  bound: number | null;
  median_total_reward: number;
  median_miner_reward: number;
  xi_mean: number;
  agg_sp_targeted: number;
  agg_sp_nakamoto: number;
  pool: number;
  remainder: number;
}

export type RunStatus = "running" | "done" | "failed";

export interface RunRecord {
  id: string;
  status: RunStatus;
  created?: string;
  completed?: string | null;
  scenario: ScenarioDocument;
  trajectory: { csv: string; json: string } | null;
  error: { type: string; message: string } | null;
}

export interface ValidationIssue {
  field: string;
  message: string;
}
