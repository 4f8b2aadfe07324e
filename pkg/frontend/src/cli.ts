#!/usr/bin/env node
/** figgen: render harness CSVs to deterministic SVG figures.
 *
 *   figgen --kind heatmap --csv runs.csv --x alpha --y nu \
 *          --value alpha_hat_ratio --facet test --out fig.svg
 *
 * Kinds: lineplot (alpha_hat/alpha vs 1/alpha, log x, y=1 guide),
 * heatmap (fixed [0,2] color scale centered at 1), power (relative power
 * curves).  Exit codes: 0 success, 2 configuration error.
 */

import { FiggenError } from "./csv.js";
import { FigureKind, FigureSpec, render } from "./figures.js";

const FLAGS = new Set([
  "--kind",
  "--csv",
  "--x",
  "--y",
  "--value",
  "--series",
  "--facet",
  "--title",
  "--dpi",
  "--out",
]);

export function parseArgs(argv: string[]): FigureSpec {
  const opts: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!FLAGS.has(flag)) throw new FiggenError(`unknown flag ${flag}`);
    const value = argv[i + 1];
    if (value === undefined) throw new FiggenError(`missing value for ${flag}`);
    opts[flag.slice(2)] = value;
  }
  const kind = opts["kind"];
  if (!kind || !["lineplot", "heatmap", "power"].includes(kind)) {
    throw new FiggenError('--kind must be one of "lineplot", "heatmap", "power"');
  }
  if (!opts["csv"]) throw new FiggenError("--csv is required");
  if (!opts["out"]) throw new FiggenError("--out is required");
  const dpi = opts["dpi"] === undefined ? undefined : Number(opts["dpi"]);
  if (dpi !== undefined && (!Number.isFinite(dpi) || dpi <= 0)) {
    throw new FiggenError("--dpi must be a positive number");
  }
  return {
    kind: kind as FigureKind,
    inputCsv: opts["csv"],
    output: opts["out"],
    x: opts["x"],
    y: opts["y"],
    value: opts["value"],
    series: opts["series"],
    facet: opts["facet"],
    title: opts["title"],
    dpi,
  };
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    render(spec);
    process.stdout.write(`wrote ${spec.output}\n`);
    return 0;
  } catch (error) {
    if (error instanceof FiggenError) {
      process.stderr.write(`figgen: ${error.message}\n`);
      return 2;
    }
    if (error instanceof Error && "code" in error && error.code === "ENOENT") {
      process.stderr.write(`figgen: ${error.message}\n`);
      return 2;
    }
    throw error;
  }
}

import { fileURLToPath } from "node:url";

if (process.argv[1] && fileURLToPath(import.meta.url) === process.argv[1]) {
  process.exit(main(process.argv.slice(2)));
}
