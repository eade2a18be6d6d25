/** Editable scenario draft with client-side validation state.
 *
 * The draft holds whatever the user typed (invalid values included) and a
 * field -> message error map recomputed on every edit; submission is only
 * allowed when the map is empty. Validation mirrors the service's schema
 * rules so a draft that passes here is accepted there.
 */

import type { ScenarioDocument, SeriesSegments, ValidationIssue } from "./types.js";

export interface ScenarioDraft {
  doc: ScenarioDocument;
  errors: Record<string, string>;
}

export function defaultDocument(): ScenarioDocument {
  return {
    version: 1,
    horizon_epochs: 12,
    seed: 7,
    chain: {
      blocks_per_epoch: 64,
      target_block_interval: 600,
      clamp_factor: 4,
      hash_scale: 1,
    },
    controller: { tau: 0.9, gamma: 0.9, dt_upper: 20, dt_lower: 10 },
    market: { model: "closed_form", competition_margin: 0 },
    paths: {
      exchange_rate: [[0, 30000]],
      unit_hash_cost: [[0, 150]],
      asic_efficiency: [[0, 1e9]],
    },
    workload: {
      txs_per_block: 2,
      fee_mean: 20000,
      coinbase_initial: 500_000_000,
      miner_address: "miner",
    },
    ledger: { balances: { alice: 6_000_000_000, bob: 4_000_000_000 } },
  };
}

function isCount(v: unknown): v is number {
  return typeof v === "number" && Number.isInteger(v) && v >= 0;
}

function isPositive(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v) && v > 0;
}

function checkSeries(
  name: string,
  segments: SeriesSegments,
  horizon: number,
  errors: Record<string, string>,
): void {
  const field = `paths.${name}`;
  if (!Array.isArray(segments) || segments.length === 0) {
    errors[field] = "needs at least one [from_epoch, value] segment";
    return;
  }
  const first = segments[0];
  if (!first || first[0] !== 0) {
    errors[field] = "first segment must start at epoch 0";
    return;
  }
  for (let i = 0; i < segments.length; i++) {
    const seg = segments[i]!;
    if (!isCount(seg[0]) || !isPositive(seg[1])) {
      errors[field] = `segment ${i + 1} must be [non-negative int, positive value]`;
      return;
    }
    if (i > 0 && seg[0] <= segments[i - 1]![0]) {
      errors[field] = "segment starts must strictly increase";
      return;
    }
  }
  const last = segments[segments.length - 1]!;
  if (horizon > 0 && last[0] >= horizon) {
    errors[field] = "segment starts past the horizon";
  }
}

export function validate(doc: ScenarioDocument): Record<string, string> {
  const errors: Record<string, string> = {};
  if (doc.version !== 1) errors["version"] = "must be 1";
  if (!isCount(doc.horizon_epochs)) {
    errors["horizon_epochs"] = "must be a non-negative integer";
  }
  if (!isCount(doc.seed)) errors["seed"] = "must be a non-negative integer";

  const ch = doc.chain;
  if (!Number.isInteger(ch.blocks_per_epoch) || ch.blocks_per_epoch < 1) {
    errors["chain.blocks_per_epoch"] = "must be a positive integer";
  }
  if (!isPositive(ch.target_block_interval)) {
    errors["chain.target_block_interval"] = "must be positive";
  }
  if (!(typeof ch.clamp_factor === "number" && ch.clamp_factor > 1)) {
    errors["chain.clamp_factor"] = "must be > 1";
  }
  if (!isPositive(ch.hash_scale)) errors["chain.hash_scale"] = "must be positive";

  const ctrl = doc.controller;
  for (const key of ["tau", "gamma"] as const) {
    const v = ctrl[key];
    if (!(typeof v === "number" && v > 0 && v < 1)) {
      errors[`controller.${key}`] = "must lie in (0, 1)";
    }
  }
  if (!isPositive(ctrl.dt_upper)) errors["controller.dt_upper"] = "must be positive";
  if (!isPositive(ctrl.dt_lower)) errors["controller.dt_lower"] = "must be positive";
  if (
    isPositive(ctrl.dt_upper) &&
    isPositive(ctrl.dt_lower) &&
    ctrl.dt_lower >= ctrl.dt_upper
  ) {
    errors["controller.dt_lower"] = "must be below dt_upper";
  }
  if (ctrl.nash_guard_enabled && (ctrl.n_upper == null || ctrl.n_lower == null)) {
    errors["controller.n_upper"] = "required when the deviation guard is on";
  }

  if (doc.market.model === "log_regression") {
    const alphas = doc.market.alphas;
    if (!Array.isArray(alphas) || alphas.length !== 4) {
      errors["market.alphas"] = "log_regression needs 4 coefficients";
    }
  }

  const horizon = isCount(doc.horizon_epochs) ? doc.horizon_epochs : 0;
  checkSeries("exchange_rate", doc.paths.exchange_rate, horizon, errors);
  checkSeries("unit_hash_cost", doc.paths.unit_hash_cost, horizon, errors);
  checkSeries("asic_efficiency", doc.paths.asic_efficiency, horizon, errors);

  const wl = doc.workload;
  if (!isCount(wl.txs_per_block)) {
    errors["workload.txs_per_block"] = "must be a non-negative integer";
  }
  if (!(typeof wl.fee_mean === "number" && wl.fee_mean >= 0)) {
    errors["workload.fee_mean"] = "must be a non-negative number";
  }
  if (!isCount(wl.coinbase_initial)) {
    errors["workload.coinbase_initial"] = "must be a non-negative integer (Satoshi)";
  }

  const balances = doc.ledger.balances;
  let funded = 0;
  for (const [addr, amount] of Object.entries(balances)) {
    if (!isCount(amount)) {
      errors[`ledger.balances.${addr}`] = "must be a non-negative integer (Satoshi)";
    } else if (amount > 0) {
      funded += 1;
    }
  }
  if (isCount(wl.txs_per_block) && wl.txs_per_block > 0 && funded < 2) {
    errors["ledger.balances"] = "need at least 2 funded addresses for transactions";
  }
  return errors;
}

export function makeDraft(doc?: ScenarioDocument): ScenarioDraft {
  const base = doc ?? defaultDocument();
  return { doc: base, errors: validate(base) };
}

/** Set a dotted-path field to a (possibly invalid) value and revalidate. */
export function editScenario(
  draft: ScenarioDraft,
  field: string,
  value: unknown,
): ScenarioDraft {
  const doc = structuredClone(draft.doc) as ScenarioDocument;
  const parts = field.split(".");
  let node: Record<string, unknown> = doc as unknown as Record<string, unknown>;
  for (const part of parts.slice(0, -1)) {
    if (typeof node[part] !== "object" || node[part] === null) {
      node[part] = {};
    }
    node = node[part] as Record<string, unknown>;
  }
  node[parts[parts.length - 1]!] = value;
  return { doc, errors: validate(doc) };
}

export function isValid(draft: ScenarioDraft): boolean {
  return Object.keys(draft.errors).length === 0;
}

export function issues(draft: ScenarioDraft): ValidationIssue[] {
  return Object.entries(draft.errors).map(([field, message]) => ({ field, message }));
}

/** The submittable document (deep copy, exactly what will be POSTed). */
export function toDocument(draft: ScenarioDraft): ScenarioDocument {
  return structuredClone(draft.doc) as ScenarioDocument;
}

/** Rebuild a draft from a run record's embedded scenario document. */
export function fromDocument(doc: ScenarioDocument): ScenarioDraft {
  return makeDraft(structuredClone(doc) as ScenarioDocument);
}
