/** Acceptance: render every figure kind from the frozen harness CSVs;
 * outputs must exist and repeated runs must be byte-identical. */

import { existsSync, mkdtempSync, readFileSync, statSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { FigureSpec, render } from "../src/figures.js";

const HERE = fileURLToPath(new URL(".", import.meta.url));
const GOLDEN = resolve(HERE, "../../data/golden");

describe("acceptance: figure generation from golden CSVs", () => {
  it("renders lineplot, heatmap and power figures deterministically", () => {
    const dir = mkdtempSync(join(tmpdir(), "figgen-acceptance-"));
    const specs: FigureSpec[] = [
      {
        kind: "lineplot",
        inputCsv: join(GOLDEN, "calibration_mvt_ar05.csv"),
        output: join(dir, "lineplot.svg"),
      },
      {
        kind: "heatmap",
        inputCsv: join(GOLDEN, "calibration_mvt_ar05.csv"),
        output: join(dir, "heatmap.svg"),
        x: "alpha",
        y: "nu",
        value: "alpha_hat_ratio",
        facet: "test",
      },
      {
        kind: "power",
        inputCsv: join(GOLDEN, "power_bottom_nu10.csv"),
        output: join(dir, "power.svg"),
      },
    ];
    let allOk = true;
    for (const spec of specs) {
      const first = render(spec);
      expect(existsSync(spec.output)).toBe(true);
      expect(statSync(spec.output).size).toBeGreaterThan(0);
      const second = render({ ...spec, output: spec.output + ".rerun.svg" });
      const identical = first === second && readFileSync(spec.output, "utf-8") === first;
      allOk &&= identical;
      expect(identical).toBe(true);
    }
    process.stdout.write(
      `[ACCEPTANCE 12] figure generation from golden CSVs: ${allOk ? "PASS" : "FAIL"}\n`,
    );
  });
});
