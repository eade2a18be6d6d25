/** SVG chart panels over trajectory records.
 *
 * Panels are pure functions of the trajectory and scenario fields; the
 * only arithmetic here is pixel projection and label formatting. Each
 * panel exposes the series it plotted (field name + raw values) so tests
 * can assert that nothing beyond trajectory/scenario data is displayed.
 */

import { compact } from "./format.js";
import type { RunView } from "./poll.js";
import type { TrajectoryRecord } from "./types.js";

export interface PlottedSeries {
  label: string;
  field: string; // trajectory or scenario field the values came from
  values: number[];
}

export interface OverlaySpan {
  mode: "ceiling" | "floor";
  epoch: number;
}

export interface ChartPanel {
  title: string;
  svg: string;
  series: PlottedSeries[];
  overlays: OverlaySpan[];
}

const W = 640;
const H = 280;
const PAD = 44;

interface Scale {
  x: (epoch: number) => number;
  y: (value: number) => number;
}

function makeScale(epochs: number[], values: number[]): Scale {
  const xMin = Math.min(...epochs);
  const xMax = Math.max(...epochs);
  let yMin = Math.min(...values);
  let yMax = Math.max(...values);
  if (yMin === yMax) {
    yMin -= 1;
    yMax += 1;
  }
  const xSpan = Math.max(xMax - xMin, 1);
  return {
    x: (e) => PAD + ((e - xMin) / xSpan) * (W - 2 * PAD),
    y: (v) => H - PAD - ((v - yMin) / (yMax - yMin)) * (H - 2 * PAD),
  };
}

function polyline(
  epochs: number[],
  values: number[],
  scale: Scale,
  color: string,
  dashed = false,
): string {
  const points = epochs
    .map((e, i) => `${scale.x(e).toFixed(1)},${scale.y(values[i]!).toFixed(1)}`)
    .join(" ");
  const dash = dashed ? ' stroke-dasharray="6 4"' : "";
  return `<polyline fill="none" stroke="${color}" stroke-width="1.5"${dash} points="${points}"/>`;
}

function frame(title: string, yLow: number, yHigh: number, inner: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" role="img">` +
    `<rect width="${W}" height="${H}" fill="#fff"/>` +
    `<text x="${PAD}" y="18" font-size="13" font-weight="bold">${title}</text>` +
    `<text x="4" y="${H - PAD}" font-size="10">${compact(yLow)}</text>` +
    `<text x="4" y="${PAD}" font-size="10">${compact(yHigh)}</text>` +
    inner +
    `</svg>`
  );
}

function legend(entries: Array<[string, string]>): string {
  return entries
    .map(
      ([label, color], i) =>
        `<text x="${PAD + i * 150}" y="${H - 8}" font-size="11" fill="${color}">` +
        `${label}</text>`,
    )
    .join("");
}

export function emptyPanel(title: string): ChartPanel {
  const svg =
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}">` +
    `<rect width="${W}" height="${H}" fill="#fafafa"/>` +
    `<text x="${W / 2}" y="${H / 2}" text-anchor="middle" font-size="14">` +
    `no trajectory data</text></svg>`;
  return { title, svg, series: [], overlays: [] };
}

function overlaySpans(records: TrajectoryRecord[]): OverlaySpan[] {
  return records
    .filter((r) => r.mode !== "unconstrained")
    .map((r) => ({ mode: r.mode as "ceiling" | "floor", epoch: r.epoch }));
}

function overlayRects(records: TrajectoryRecord[], scale: Scale): string {
  return records
    .filter((r) => r.mode !== "unconstrained")
    .map((r) => {
      const color = r.mode === "ceiling" ? "#d62728" : "#1f77b4";
      const x0 = scale.x(r.epoch - 0.5);
      const x1 = scale.x(r.epoch + 0.5);
      return (
        `<rect x="${x0.toFixed(1)}" y="${PAD}" width="${(x1 - x0).toFixed(1)}"` +
        ` height="${H - 2 * PAD}" fill="${color}" opacity="0.12"` +
        ` data-mode="${r.mode}" data-epoch="${r.epoch}"/>`
      );
    })
    .join("");
}

/** D/T signal against the target band, active bound shaded per epoch. */
export function dtSignalPanel(
  records: TrajectoryRecord[],
  dtUpper: number,
  dtLower: number,
): ChartPanel {
  if (records.length === 0) return emptyPanel("Hashrate signal (D/T)");
  const epochs = records.map((r) => r.epoch);
  const dt = records.map((r) => r.DT);
  const all = [...dt, dtUpper, dtLower];
  const scale = makeScale(epochs, all);
  const upperLine = polyline(epochs, epochs.map(() => dtUpper), scale, "#d62728", true);
  const lowerLine = polyline(epochs, epochs.map(() => dtLower), scale, "#1f77b4", true);
  const svg = frame(
    "Hashrate signal (D/T) vs target band",
    Math.min(...all),
    Math.max(...all),
    overlayRects(records, scale) +
      polyline(epochs, dt, scale, "#333") +
      upperLine +
      lowerLine +
      legend([
        ["D/T", "#333"],
        ["upper bound", "#d62728"],
        ["lower bound", "#1f77b4"],
      ]),
  );
  return {
    title: "Hashrate signal (D/T)",
    svg,
    series: [
      { label: "D/T", field: "DT", values: dt },
      { label: "upper bound", field: "controller.dt_upper", values: [dtUpper] },
      { label: "lower bound", field: "controller.dt_lower", values: [dtLower] },
    ],
    overlays: overlaySpans(records),
  };
}

export function hashratePanel(records: TrajectoryRecord[]): ChartPanel {
  if (records.length === 0) return emptyPanel("Hashrate");
  const epochs = records.map((r) => r.epoch);
  const est = records.map((r) => r.N_est);
  const model = records.map((r) => r.N_model);
  const scale = makeScale(epochs, [...est, ...model]);
  const svg = frame(
    "Hashrate: estimated vs market model",
    Math.min(...est, ...model),
    Math.max(...est, ...model),
    polyline(epochs, est, scale, "#333") +
      polyline(epochs, model, scale, "#2ca02c", true) +
      legend([
        ["estimated (D/T)", "#333"],
        ["market model", "#2ca02c"],
      ]),
  );
  return {
    title: "Hashrate",
    svg,
    series: [
      { label: "estimated", field: "N_est", values: est },
      { label: "market model", field: "N_model", values: model },
    ],
    overlays: [],
  };
}

export function rewardsPanel(records: TrajectoryRecord[]): ChartPanel {
  if (records.length === 0) return emptyPanel("Rewards");
  const epochs = records.map((r) => r.epoch);
  const total = records.map((r) => r.median_total_reward);
  const miner = records.map((r) => r.median_miner_reward);
  const boundPoints = records.filter((r) => r.bound !== null);
  const boundValues = boundPoints.map((r) => r.bound as number);
  const everything = [...total, ...miner, ...boundValues];
  const scale = makeScale(epochs, everything);
  let boundLine = "";
  if (boundPoints.length > 0) {
    boundLine = polyline(
      boundPoints.map((r) => r.epoch),
      boundValues,
      scale,
      "#d62728",
      true,
    );
  }
  const svg = frame(
    "Median block rewards and active bound (Satoshi)",
    Math.min(...everything),
    Math.max(...everything),
    polyline(epochs, total, scale, "#333") +
      polyline(epochs, miner, scale, "#2ca02c") +
      boundLine +
      legend([
        ["median total", "#333"],
        ["median paid", "#2ca02c"],
        ["bound", "#d62728"],
      ]),
  );
  const series: PlottedSeries[] = [
    { label: "median total", field: "median_total_reward", values: total },
    { label: "median paid", field: "median_miner_reward", values: miner },
  ];
  if (boundPoints.length > 0) {
    series.push({ label: "bound", field: "bound", values: boundValues });
  }
  return { title: "Rewards", svg, series, overlays: overlaySpans(records) };
}

export function neutralityPanel(records: TrajectoryRecord[]): ChartPanel {
  if (records.length === 0) return emptyPanel("Monetary neutrality");
  const epochs = records.map((r) => r.epoch);
  const targeted = records.map((r) => r.agg_sp_targeted);
  const baseline = records.map((r) => r.agg_sp_nakamoto);
  const pool = records.map((r) => r.pool);
  const remainder = records.map((r) => r.remainder);
  const top = [...targeted, ...baseline];
  const scale = makeScale(epochs, top);
  const svg = frame(
    "Aggregate spending potential: targeted vs baseline",
    Math.min(...top),
    Math.max(...top),
    polyline(epochs, targeted, scale, "#333") +
      polyline(epochs, baseline, scale, "#d62728", true) +
      legend([
        ["targeted", "#333"],
        ["baseline", "#d62728"],
      ]),
  );
  return {
    title: "Monetary neutrality",
    svg,
    series: [
      { label: "targeted", field: "agg_sp_targeted", values: targeted },
      { label: "baseline", field: "agg_sp_nakamoto", values: baseline },
      { label: "pool", field: "pool", values: pool },
      { label: "remainder", field: "remainder", values: remainder },
    ],
    overlays: [],
  };
}

/** All four panels for a completed run; empty-state panel otherwise. */
export function renderCharts(view: RunView): ChartPanel[] {
  if (view.status !== "done" || !view.trajectory || view.trajectory.length === 0) {
    return [emptyPanel("Run")];
  }
  const records = view.trajectory;
  const ctrl = view.record.scenario.controller;
  return [
    dtSignalPanel(records, ctrl.dt_upper, ctrl.dt_lower),
    hashratePanel(records),
    rewardsPanel(records),
    neutralityPanel(records),
  ];
}

export interface ComparisonRow {
  title: string;
  left: ChartPanel;
  right: ChartPanel;
}

/** Two runs side by side, panel by panel. */
export function renderComparison(a: RunView, b: RunView): ComparisonRow[] {
  const left = renderCharts(a);
  const right = renderCharts(b);
  const rows: ComparisonRow[] = [];
  for (let i = 0; i < Math.max(left.length, right.length); i++) {
    const l = left[i] ?? emptyPanel("Run A");
    const r = right[i] ?? emptyPanel("Run B");
    rows.push({ title: l.title, left: l, right: r });
  }
  return rows;
}
