/** Figure rendering: calibration lineplots, ratio heatmaps, power curves.
 *
 * Output is SVG assembled from pure string builders with fixed number
 * formatting and fixed series/facet ordering, so a given (spec, CSV) pair
 * renders to identical bytes on every run.  Axis ranges come from the data
 * with 5% padding (decade padding on log axes); the ratio color scale is
 * pinned to [0, 2] centered at 1.
 */

import { FiggenError, Table, distinct, num, parseCsv, requireColumns } from "./csv.js";
import { RATIO_DOMAIN, SERIES_COLORS, ratioColor } from "./color.js";
import { Scale, coord, fmt, linearScale, logScale } from "./scale.js";
import { document as svgDocument, el, text } from "./svg.js";

export type FigureKind = "lineplot" | "heatmap" | "power";

export interface FigureSpec {
  kind: FigureKind;
  inputCsv: string;
  output: string;
  x?: string;
  y?: string;
  value?: string;
  series?: string;
  facet?: string;
  title?: string;
  dpi?: number;
}

const PANEL_W = 340;
const PANEL_H = 260;
const MARGIN = { top: 40, right: 20, bottom: 48, left: 64 };
const BASE_DPI = 96;

interface Panel {
  label: string | null;
  rows: Record<string, string>[];
}

function facetPanels(table: Table, facet: string | undefined): Panel[] {
  if (!facet) return [{ label: null, rows: table.rows }];
  return distinct(table.rows, facet).map((value) => ({
    label: value,
    rows: table.rows.filter((row) => row[facet] === value),
  }));
}

function sortedNumeric(values: string[]): string[] {
  const parsed = values.map((v) => Number(v));
  if (parsed.every((v) => Number.isFinite(v))) {
    return [...values].sort((a, b) => Number(a) - Number(b));
  }
  return [...values].sort();
}

function panelTitle(template: string | undefined, fallback: string, label: string | null): string {
  if (template) return template.replace(/\{facet\}/g, label ?? "");
  return label === null ? fallback : `${fallback} - ${label}`;
}

function axis(
  xScale: Scale,
  yScale: Scale,
  x0: number,
  y0: number,
  xLabel: string,
  yLabel: string,
  xTickFmt: (t: number) => string = fmt,
): string[] {
  const parts: string[] = [];
  const [xLo, xHi] = [x0 + MARGIN.left, x0 + MARGIN.left + PANEL_W];
  const [yTop, yBot] = [y0 + MARGIN.top, y0 + MARGIN.top + PANEL_H];
  parts.push(
    el("line", { x1: coord(xLo), y1: coord(yBot), x2: coord(xHi), y2: coord(yBot), stroke: "#333" }),
  );
  parts.push(
    el("line", { x1: coord(xLo), y1: coord(yTop), x2: coord(xLo), y2: coord(yBot), stroke: "#333" }),
  );
  for (const tick of xScale.ticks) {
    const px = xScale(tick);
    parts.push(
      el("line", { x1: coord(px), y1: coord(yBot), x2: coord(px), y2: coord(yBot + 4), stroke: "#333" }),
    );
    parts.push(
      text(xTickFmt(tick), {
        x: coord(px),
        y: coord(yBot + 16),
        "font-size": 10,
        "text-anchor": "middle",
        fill: "#333",
      }),
    );
  }
  for (const tick of yScale.ticks) {
    const py = yScale(tick);
    parts.push(
      el("line", { x1: coord(xLo - 4), y1: coord(py), x2: coord(xLo), y2: coord(py), stroke: "#333" }),
    );
    parts.push(
      text(fmt(tick), {
        x: coord(xLo - 7),
        y: coord(py + 3),
        "font-size": 10,
        "text-anchor": "end",
        fill: "#333",
      }),
    );
  }
  parts.push(
    text(xLabel, {
      x: coord((xLo + xHi) / 2),
      y: coord(yBot + 34),
      "font-size": 11,
      "text-anchor": "middle",
      fill: "#111",
    }),
  );
  parts.push(
    text(yLabel, {
      x: coord(x0 + 14),
      y: coord((yTop + yBot) / 2),
      "font-size": 11,
      "text-anchor": "middle",
      fill: "#111",
      transform: `rotate(-90 ${coord(x0 + 14)} ${coord((yTop + yBot) / 2)})`,
    }),
  );
  return parts;
}

function guideLine(yScale: Scale, x0: number, y0: number): string {
  const py = yScale(1.0);
  return el("line", {
    class: "guide",
    x1: coord(x0 + MARGIN.left),
    y1: coord(py),
    x2: coord(x0 + MARGIN.left + PANEL_W),
    y2: coord(py),
    stroke: "#555",
    "stroke-dasharray": "5,4",
  });
}

interface SeriesData {
  label: string;
  points: [number, number][];
}

function seriesFromRows(
  rows: Record<string, string>[],
  xColumn: string,
  yColumn: string,
  seriesColumn: string | undefined,
  xTransform: (v: number) => number,
): SeriesData[] {
  const keys = seriesColumn ? sortedNumeric(distinct(rows, seriesColumn)) : [""];
  return keys.map((key) => {
    const subset = seriesColumn ? rows.filter((row) => row[seriesColumn] === key) : rows;
    const points: [number, number][] = [];
    for (const row of subset) {
      const xv = num(row, xColumn);
      const yv = num(row, yColumn);
      if (xv === null || yv === null) continue; // NA cells are skipped
      points.push([xTransform(xv), yv]);
    }
    points.sort((a, b) => a[0] - b[0]);
    return { label: key, points };
  });
}

function legend(labels: string[], x: number, y: number, title: string): string[] {
  if (labels.length <= 1) return [];
  const parts: string[] = [
    text(title, { x: coord(x), y: coord(y), "font-size": 10, fill: "#111" }),
  ];
  labels.forEach((label, i) => {
    const ly = y + 14 + i * 14;
    parts.push(
      el("line", {
        x1: coord(x),
        y1: coord(ly - 3),
        x2: coord(x + 16),
        y2: coord(ly - 3),
        stroke: SERIES_COLORS[i % SERIES_COLORS.length],
        "stroke-width": 2,
      }),
    );
    parts.push(
      text(label, { x: coord(x + 20), y: coord(ly), "font-size": 10, fill: "#333" }),
    );
  });
  return parts;
}

function renderLinePanels(
  panels: Panel[],
  spec: Required<Pick<FigureSpec, "x" | "y">> & FigureSpec,
  xTransform: (v: number) => number,
  xAxisLabel: string,
  logX: boolean,
  fallbackTitle: string,
): string {
  const width = panels.length * (PANEL_W + MARGIN.left + MARGIN.right);
  const height = PANEL_H + MARGIN.top + MARGIN.bottom;
  const body: string[] = [];
  let seriesLabels: string[] = [];

  panels.forEach((panel, index) => {
    const x0 = index * (PANEL_W + MARGIN.left + MARGIN.right);
    const series = seriesFromRows(panel.rows, spec.x, spec.y, spec.series, xTransform);
    const points = series.flatMap((s) => s.points);
    if (points.length === 0) {
      throw new FiggenError(`no data to plot in panel ${panel.label ?? "(all)"}`);
    }
    seriesLabels = series.map((s) => s.label);
    const xs = points.map((p) => p[0]);
    const ys = points.map((p) => p[1]).concat([1.0]); // keep the guide in range
    const xScale = (logX ? logScale : linearScale)(
      Math.min(...xs),
      Math.max(...xs),
      x0 + MARGIN.left,
      x0 + MARGIN.left + PANEL_W,
    );
    const yScale = linearScale(
      Math.min(...ys),
      Math.max(...ys),
      MARGIN.top + PANEL_H,
      MARGIN.top,
    );
    body.push(...axis(xScale, yScale, x0, 0, xAxisLabel, spec.y));
    body.push(guideLine(yScale, x0, 0));
    series.forEach((s, i) => {
      if (s.points.length === 0) return;
      const path = s.points
        .map((p) => `${coord(xScale(p[0]))},${coord(yScale(p[1]))}`)
        .join(" ");
      body.push(
        el("polyline", {
          class: "series",
          points: path,
          fill: "none",
          stroke: SERIES_COLORS[i % SERIES_COLORS.length],
          "stroke-width": 1.5,
        }),
      );
    });
    body.push(
      text(panelTitle(spec.title, fallbackTitle, panel.label), {
        x: coord(x0 + MARGIN.left + PANEL_W / 2),
        y: coord(MARGIN.top - 12),
        "font-size": 12,
        "text-anchor": "middle",
        fill: "#111",
      }),
    );
  });
  body.push(...legend(seriesLabels, width - 70, MARGIN.top, spec.series ?? ""));
  return finishDocument(width, height, body, spec.dpi);
}

function finishDocument(width: number, height: number, body: string[], dpi?: number): string {
  const scale = (dpi ?? BASE_DPI) / BASE_DPI;
  return svgDocument(Math.round(width * scale), Math.round(height * scale), [
    el("g", scale === 1 ? {} : { transform: `scale(${scale})` }, body),
  ]);
}

function renderLineplot(table: Table, spec: FigureSpec): string {
  const x = spec.x ?? "alpha";
  const y = spec.y ?? "alpha_hat_ratio";
  const series = spec.series ?? (table.columns.includes("nu") ? "nu" : undefined);
  const facet = spec.facet ?? (table.columns.includes("test") ? "test" : undefined);
  requireColumns(table, [x, y, ...(series ? [series] : []), ...(facet ? [facet] : [])]);
  if (table.rows.length === 0) throw new FiggenError("no data rows in CSV");
  const panels = facetPanels(table, facet);
  // the calibration lineplot is drawn against 1/alpha on a log axis
  return renderLinePanels(
    panels,
    { ...spec, x, y, series, facet },
    (v) => {
      if (v <= 0) throw new FiggenError(`nonpositive ${x} value cannot be inverted`);
      return 1 / v;
    },
    `1/${x}`,
    true,
    "calibration",
  );
}

function renderPower(table: Table, spec: FigureSpec): string {
  const x = spec.x ?? "effect_size";
  const y = spec.y ?? "power_ratio_vs_baseline";
  const series = spec.series ?? (table.columns.includes("test") ? "test" : undefined);
  const facet = spec.facet;
  requireColumns(table, [x, y, ...(series ? [series] : []), ...(facet ? [facet] : [])]);
  if (table.rows.length === 0) throw new FiggenError("no data rows in CSV");
  const panels = facetPanels(table, facet);
  return renderLinePanels(
    panels,
    { ...spec, x, y, series, facet },
    (v) => v,
    x,
    false,
    "relative power",
  );
}

function renderHeatmap(table: Table, spec: FigureSpec): string {
  const x = spec.x ?? "alpha";
  const y = spec.y ?? "nu";
  const value = spec.value ?? "alpha_hat_ratio";
  const facet = spec.facet ?? (table.columns.includes("test") ? "test" : undefined);
  requireColumns(table, [x, y, value, ...(facet ? [facet] : [])]);
  if (table.rows.length === 0) throw new FiggenError("no data rows in CSV");

  const panels = facetPanels(table, facet);
  const colorbarWidth = 56;
  const width = panels.length * (PANEL_W + MARGIN.left + MARGIN.right) + colorbarWidth;
  const height = PANEL_H + MARGIN.top + MARGIN.bottom;
  const body: string[] = [];

  panels.forEach((panel, index) => {
    const x0 = index * (PANEL_W + MARGIN.left + MARGIN.right);
    const xCats = sortedNumeric(distinct(panel.rows, x));
    const yCats = sortedNumeric(distinct(panel.rows, y));
    const cellW = PANEL_W / xCats.length;
    const cellH = PANEL_H / yCats.length;
    for (const row of panel.rows) {
      const v = num(row, value);
      if (v === null) continue;
      const cx = xCats.indexOf(row[x]);
      const cy = yCats.indexOf(row[y]);
      body.push(
        el("rect", {
          class: "cell",
          x: coord(x0 + MARGIN.left + cx * cellW),
          y: coord(MARGIN.top + (yCats.length - 1 - cy) * cellH),
          width: coord(cellW),
          height: coord(cellH),
          fill: ratioColor(v),
          stroke: "#ffffff",
          "stroke-width": 0.5,
        }),
      );
      body.push(
        text(fmt(v), {
          x: coord(x0 + MARGIN.left + (cx + 0.5) * cellW),
          y: coord(MARGIN.top + (yCats.length - 0.5 - cy) * cellH + 3),
          "font-size": 9,
          "text-anchor": "middle",
          fill: "#111",
        }),
      );
    }
    xCats.forEach((cat, i) => {
      body.push(
        text(fmt(Number(cat)), {
          x: coord(x0 + MARGIN.left + (i + 0.5) * cellW),
          y: coord(MARGIN.top + PANEL_H + 16),
          "font-size": 10,
          "text-anchor": "middle",
          fill: "#333",
        }),
      );
    });
    yCats.forEach((cat, i) => {
      body.push(
        text(cat, {
          x: coord(x0 + MARGIN.left - 7),
          y: coord(MARGIN.top + (yCats.length - 0.5 - i) * cellH + 3),
          "font-size": 10,
          "text-anchor": "end",
          fill: "#333",
        }),
      );
    });
    body.push(
      text(x, {
        x: coord(x0 + MARGIN.left + PANEL_W / 2),
        y: coord(MARGIN.top + PANEL_H + 34),
        "font-size": 11,
        "text-anchor": "middle",
        fill: "#111",
      }),
    );
    body.push(
      text(y, {
        x: coord(x0 + 14),
        y: coord(MARGIN.top + PANEL_H / 2),
        "font-size": 11,
        "text-anchor": "middle",
        fill: "#111",
        transform: `rotate(-90 ${coord(x0 + 14)} ${coord(MARGIN.top + PANEL_H / 2)})`,
      }),
    );
    body.push(
      text(panelTitle(spec.title, value, panel.label), {
        x: coord(x0 + MARGIN.left + PANEL_W / 2),
        y: coord(MARGIN.top - 12),
        "font-size": 12,
        "text-anchor": "middle",
        fill: "#111",
      }),
    );
  });

  // colorbar for the fixed [0, 2] scale
  const barX = width - colorbarWidth + 8;
  const steps = 40;
  const stepH = PANEL_H / steps;
  for (let i = 0; i < steps; i += 1) {
    const v = RATIO_DOMAIN[2] - ((i + 0.5) / steps) * (RATIO_DOMAIN[2] - RATIO_DOMAIN[0]);
    body.push(
      el("rect", {
        class: "colorbar",
        x: coord(barX),
        y: coord(MARGIN.top + i * stepH),
        width: coord(12),
        height: coord(stepH + 0.5),
        fill: ratioColor(v),
      }),
    );
  }
  for (const mark of RATIO_DOMAIN) {
    const py = MARGIN.top + PANEL_H * (1 - (mark - RATIO_DOMAIN[0]) / (RATIO_DOMAIN[2] - RATIO_DOMAIN[0]));
    body.push(
      text(fmt(mark), {
        x: coord(barX + 18),
        y: coord(py + 3),
        "font-size": 10,
        fill: "#333",
      }),
    );
  }
  return finishDocument(width, height, body, spec.dpi);
}

import { readFileSync, writeFileSync } from "node:fs";

/** Render the figure described by spec into spec.output; returns the SVG text. */
export function render(spec: FigureSpec): string {
  const table = parseCsv(readFileSync(spec.inputCsv, "utf-8"));
  let svg: string;
  switch (spec.kind) {
    case "lineplot":
      svg = renderLineplot(table, spec);
      break;
    case "heatmap":
      svg = renderHeatmap(table, spec);
      break;
    case "power":
      svg = renderPower(table, spec);
      break;
    default:
      throw new FiggenError(`unknown figure kind "${(spec as FigureSpec).kind}"`);
  }
  writeFileSync(spec.output, svg, "utf-8");
  return svg;
}
