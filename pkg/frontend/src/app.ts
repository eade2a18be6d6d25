/** DOM wiring for the scenario explorer.
 *
 * One form edits a ScenarioDraft (field-level inline errors, submit
 * disabled until valid); launching posts to the run service and polls at
 * 1s until the run finishes; chart panels render into the results pane.
 * The two most recent completed runs can be compared side by side.
 */

import { ApiClient, ApiError } from "./api.js";
import { renderCharts, renderComparison } from "./charts.js";
import {
  editScenario,
  isValid,
  makeDraft,
  toDocument,
  type ScenarioDraft,
} from "./draft.js";
import { launchAndPoll, type RunView } from "./poll.js";

const client = new ApiClient("");
let draft: ScenarioDraft = makeDraft();
const completedRuns: RunView[] = [];

const NUMBER_FIELDS: Array<[string, string]> = [
  ["horizon_epochs", "Horizon (epochs)"],
  ["seed", "Seed"],
  ["chain.blocks_per_epoch", "Blocks per epoch"],
  ["chain.target_block_interval", "Target block interval"],
  ["controller.tau", "tau (tighten)"],
  ["controller.gamma", "gamma (relax)"],
  ["controller.dt_upper", "D/T upper bound"],
  ["controller.dt_lower", "D/T lower bound"],
  ["workload.txs_per_block", "Transactions per block"],
  ["workload.fee_mean", "Mean fee (Satoshi)"],
  ["workload.coinbase_initial", "Coinbase (Satoshi)"],
];

const SERIES_FIELDS: Array<[keyof ScenarioDraft["doc"]["paths"], string]> = [
  ["exchange_rate", "Exchange rate (USD/BTC)"],
  ["unit_hash_cost", "Unit hash cost (USD)"],
  ["asic_efficiency", "ASIC efficiency (hashes/kWh)"],
];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text) node.textContent = text;
  return node;
}

function getPath(obj: unknown, path: string): unknown {
  let node: unknown = obj;
  for (const part of path.split(".")) {
    node = (node as Record<string, unknown>)[part];
  }
  return node;
}

function renderForm(): void {
  const form = document.getElementById("scenario-form")!;
  form.textContent = "";

  for (const [path, label] of NUMBER_FIELDS) {
    const row = el("div", { class: "field" });
    row.appendChild(el("label", {}, label));
    const input = el("input", { type: "text" }) as HTMLInputElement;
    input.value = String(getPath(draft.doc, path));
    input.addEventListener("input", () => {
      const parsed = input.value.trim() === "" ? NaN : Number(input.value);
      draft = editScenario(draft, path, parsed);
      renderErrors();
    });
    row.appendChild(input);
    row.appendChild(el("span", { class: "error", "data-error-for": path }));
    form.appendChild(row);
  }

  for (const [name, label] of SERIES_FIELDS) {
    const row = el("div", { class: "field series" });
    row.appendChild(el("label", {}, `${label} segments "epoch:value, ..."`));
    const input = el("input", { type: "text" }) as HTMLInputElement;
    input.value = draft.doc.paths[name].map(([e, v]) => `${e}:${v}`).join(", ");
    input.addEventListener("input", () => {
      const segments = input.value.split(",").map((part) => {
        const [e, v] = part.split(":");
        return [Number((e ?? "").trim()), Number((v ?? "").trim())] as [number, number];
      });
      draft = editScenario(draft, `paths.${name}`, segments);
      renderErrors();
    });
    row.appendChild(input);
    row.appendChild(el("span", { class: "error", "data-error-for": `paths.${name}` }));
    form.appendChild(row);
  }

  renderErrors();
}

function renderErrors(): void {
  for (const span of document.querySelectorAll<HTMLSpanElement>("[data-error-for]")) {
    const field = span.dataset["errorFor"]!;
    span.textContent = draft.errors[field] ?? "";
  }
  const launch = document.getElementById("launch") as HTMLButtonElement;
  launch.disabled = !isValid(draft);
  const summary = document.getElementById("validation-summary")!;
  const count = Object.keys(draft.errors).length;
  summary.textContent = count ? `${count} field error(s); fix before launching` : "";
}

function banner(message: string, retry?: () => void): void {
  const box = document.getElementById("banner")!;
  box.textContent = message;
  box.className = message ? "banner visible" : "banner";
  if (retry) {
    const btn = el("button", {}, "retry");
    btn.addEventListener("click", () => {
      banner("");
      retry();
    });
    box.appendChild(btn);
  }
}

function showPanels(view: RunView): void {
  const out = document.getElementById("panels")!;
  out.textContent = "";
  out.appendChild(el("h3", {}, `Run ${view.runId} (${view.status})`));
  for (const panel of renderCharts(view)) {
    const holder = el("div", { class: "panel" });
    holder.innerHTML = panel.svg;
    out.appendChild(holder);
  }
}

function showComparison(): void {
  if (completedRuns.length < 2) return;
  const [a, b] = completedRuns.slice(-2) as [RunView, RunView];
  const out = document.getElementById("panels")!;
  out.textContent = "";
  out.appendChild(el("h3", {}, `Comparing ${a.runId} vs ${b.runId}`));
  for (const row of renderComparison(a, b)) {
    const holder = el("div", { class: "compare-row" });
    const left = el("div", { class: "panel half" });
    left.innerHTML = row.left.svg;
    const right = el("div", { class: "panel half" });
    right.innerHTML = row.right.svg;
    holder.appendChild(left);
    holder.appendChild(right);
    out.appendChild(holder);
  }
}

async function launch(): Promise<void> {
  const launchBtn = document.getElementById("launch") as HTMLButtonElement;
  launchBtn.disabled = true;
  banner("");
  const status = document.getElementById("status")!;
  status.textContent = "running...";
  try {
    const view = await launchAndPoll(client, draft, { intervalMs: 1000 });
    if (view.serviceErrors) {
      // service validation report, surfaced verbatim
      banner(
        view.serviceErrors.map((e) => `${e.field}: ${e.message}`).join("; "),
      );
      status.textContent = "rejected";
      return;
    }
    if (view.status === "failed") {
      banner(`run failed: ${view.errorReport?.type}: ${view.errorReport?.message}`);
      status.textContent = "failed";
      return;
    }
    completedRuns.push(view);
    status.textContent = `done (${view.trajectory?.length ?? 0} epochs)`;
    showPanels(view);
    (document.getElementById("compare") as HTMLButtonElement).disabled =
      completedRuns.length < 2;
  } catch (err) {
    if (err instanceof ApiError && err.retryable) {
      banner(`network failure: ${err.message}`, () => void launch());
    } else {
      banner(String(err));
    }
    status.textContent = "error";
  } finally {
    launchBtn.disabled = !isValid(draft);
  }
}

export function start(): void {
  renderForm();
  document.getElementById("launch")!.addEventListener("click", () => void launch());
  document.getElementById("compare")!.addEventListener("click", showComparison);
  const exportBtn = document.getElementById("export")!;
  exportBtn.addEventListener("click", () => {
    const blob = new Blob([JSON.stringify(toDocument(draft), null, 2)], {
      type: "application/json",
    });
    const link = el("a", {
      href: URL.createObjectURL(blob),
      download: "scenario.json",
    });
    link.click();
  });
}

if (typeof document !== "undefined" && document.getElementById("scenario-form")) {
  start();
}
