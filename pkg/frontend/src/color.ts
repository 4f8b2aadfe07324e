/** Fixed diverging color scale for ratio heatmaps: [0, 2] centered at 1.
 *
 * Not data-driven, so panels from different runs stay comparable.  Blue
 * below 1 (conservative), white at 1 (calibrated), red above 1 (liberal).
 */

const LOW: [number, number, number] = [33, 102, 172]; // #2166ac
const MID: [number, number, number] = [247, 247, 247]; // #f7f7f7
const HIGH: [number, number, number] = [178, 24, 43]; // #b2182b

export const RATIO_DOMAIN: [number, number, number] = [0, 1, 2];

function hex(channel: number): string {
  return Math.round(channel).toString(16).padStart(2, "0");
}

function mix(a: [number, number, number], b: [number, number, number], t: number): string {
  const rgb = a.map((av, i) => av + (b[i] - av) * t);
  return `#${hex(rgb[0])}${hex(rgb[1])}${hex(rgb[2])}`;
}

export function ratioColor(value: number): string {
  const v = Math.min(2, Math.max(0, value));
  return v <= 1 ? mix(LOW, MID, v) : mix(MID, HIGH, v - 1);
}

/** Fixed 10-color line palette (first-appearance series order). */
export const SERIES_COLORS = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#ff7f0e",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
  "#bcbd22",
  "#17becf",
];
