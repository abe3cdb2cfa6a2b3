/**
 * Batch figure generation from solver outputs.
 *
 *   pfwillmore-plots render --kind contours --out FIG.png CONTOUR.csv [...]
 *   pfwillmore-plots render --kind radius_law --out FIG.png SERIES.csv [--r0 0.15]
 *   pfwillmore-plots render --kind energy_series --out FIG.png SERIES.csv
 *   pfwillmore-plots render --kind heatmap --out FIG.png SNAPSHOT.pfwf
 *   pfwillmore-plots compare --out ERRORS.csv SERIES.csv [...] [--r0 0.15]
 *
 * Exit codes: 0 success, 1 usage or unreadable input.
 */

import { writeFileSync } from "node:fs";
import { compareRadiusLawFiles, DEFAULT_R0 } from "./compare.js";
import { readContour, readSeries, readSnapshot } from "./formats.js";
import {
  PLOT_KINDS,
  renderContours,
  renderEnergySeries,
  renderHeatmap,
  renderRadiusLaw,
  type PlotKind,
} from "./render.js";

interface Parsed {
  command: string;
  kind?: string;
  out?: string;
  r0: number;
  inputs: string[];
}

function parseArgs(argv: string[]): Parsed {
  const [command, ...rest] = argv;
  const parsed: Parsed = { command: command ?? "", r0: DEFAULT_R0, inputs: [] };
  for (let i = 0; i < rest.length; i++) {
    const arg = rest[i];
    if (arg === "--kind") parsed.kind = rest[++i];
    else if (arg === "--out") parsed.out = rest[++i];
    else if (arg === "--r0") parsed.r0 = Number(rest[++i]);
    else if (arg.startsWith("--")) throw new Error(`unknown option ${arg}`);
    else parsed.inputs.push(arg);
  }
  return parsed;
}

function runRender(parsed: Parsed): void {
  if (!parsed.out) throw new Error("render needs --out");
  if (!PLOT_KINDS.includes(parsed.kind as PlotKind)) {
    throw new Error(`--kind must be one of ${PLOT_KINDS.join(", ")}`);
  }
  if (parsed.inputs.length === 0) throw new Error("render needs at least one input file");
  let png: Buffer;
  switch (parsed.kind as PlotKind) {
    case "contours":
      png = renderContours(parsed.inputs.map(readContour));
      break;
    case "radius_law":
      png = renderRadiusLaw(readSeries(parsed.inputs[0]), parsed.r0);
      break;
    case "energy_series":
      png = renderEnergySeries(readSeries(parsed.inputs[0]));
      break;
    case "heatmap":
      png = renderHeatmap(readSnapshot(parsed.inputs[0]));
      break;
  }
  writeFileSync(parsed.out, png);
  console.log(`wrote ${parsed.out}`);
}

function runCompare(parsed: Parsed): void {
  if (!parsed.out) throw new Error("compare needs --out");
  if (parsed.inputs.length === 0) throw new Error("compare needs at least one series");
  const result = compareRadiusLawFiles(parsed.inputs, parsed.r0);
  writeFileSync(parsed.out, result.csv);
  console.log(
    `wrote ${parsed.out} (${result.rows.length} rows, monotone=${result.monotoneIncreasing})`,
  );
}

export function main(argv: string[]): number {
  try {
    const parsed = parseArgs(argv);
    if (parsed.command === "render") runRender(parsed);
    else if (parsed.command === "compare") runCompare(parsed);
    else throw new Error("usage: pfwillmore-plots <render|compare> ...");
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

process.exitCode = main(process.argv.slice(2));
