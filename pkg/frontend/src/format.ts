/** Display-only unit formatting; never protocol math. */

export const SATOSHI_PER_BTC = 100_000_000;
export const TICKS_PER_UNIT = 1_000_000;

export function satoshiToBtc(satoshi: number): string {
  return (satoshi / SATOSHI_PER_BTC).toFixed(8).replace(/\.?0+$/, "") || "0";
}

export function ticksToTimeUnits(ticks: number): number {
  return ticks / TICKS_PER_UNIT;
}

export function compact(value: number): string {
  const abs = Math.abs(value);
  if (abs >= 1e9) return (value / 1e9).toPrecision(3) + "G";
  if (abs >= 1e6) return (value / 1e6).toPrecision(3) + "M";
  if (abs >= 1e3) return (value / 1e3).toPrecision(3) + "k";
  if (abs >= 1 || value === 0) return value.toPrecision(3);
  return value.toExponential(2);
}
