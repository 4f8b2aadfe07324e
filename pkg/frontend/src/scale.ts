/** Deterministic axis scales and tick generation. */

export interface Scale {
  (value: number): number;
  ticks: number[];
  domain: [number, number];
}

/** Format a tick/coordinate value identically on every run. */
export function fmt(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    return value.toExponential(2).replace(/\.?0+e/, "e");
  }
  const text = value.toPrecision(6);
  return text.includes(".") ? text.replace(/\.?0+$/, "") : text;
}

/** SVG coordinates: fixed two decimals keeps output byte-stable. */
export function coord(value: number): string {
  return value.toFixed(2);
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const mult of [1, 2, 5, 10]) {
    if (mult * power >= raw) return mult * power;
  }
  return 10 * power;
}

/** Linear scale with 5% padding on each side of the data range. */
export function linearScale(
  lo: number,
  hi: number,
  rangeLo: number,
  rangeHi: number,
): Scale {
  if (hi < lo) [lo, hi] = [hi, lo];
  const pad = hi === lo ? (hi === 0 ? 1 : Math.abs(hi) * 0.05) : (hi - lo) * 0.05;
  const dLo = lo - pad;
  const dHi = hi + pad;
  const scale = ((value: number) =>
    rangeLo + ((value - dLo) / (dHi - dLo)) * (rangeHi - rangeLo)) as Scale;
  const step = niceStep(dHi - dLo, 5);
  const ticks: number[] = [];
  for (let t = Math.ceil(dLo / step) * step; t <= dHi + 1e-12 * step; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  scale.ticks = ticks;
  scale.domain = [dLo, dHi];
  return scale;
}

/** Log10 scale; ticks at decades. Domain padded by 5% in log space. */
export function logScale(lo: number, hi: number, rangeLo: number, rangeHi: number): Scale {
  if (lo <= 0 || hi <= 0) throw new Error("log scale needs positive data");
  if (hi < lo) [lo, hi] = [hi, lo];
  let l0 = Math.log10(lo);
  let l1 = Math.log10(hi);
  const pad = l1 === l0 ? 0.5 : (l1 - l0) * 0.05;
  l0 -= pad;
  l1 += pad;
  const scale = ((value: number) =>
    rangeLo + ((Math.log10(value) - l0) / (l1 - l0)) * (rangeHi - rangeLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(l0); e <= Math.floor(l1); e += 1) {
    ticks.push(Math.pow(10, e));
  }
  scale.ticks = ticks;
  scale.domain = [Math.pow(10, l0), Math.pow(10, l1)];
  return scale;
}
