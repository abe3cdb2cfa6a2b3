/**
 * Readers for the solver's on-disk formats.
 *
 * - series CSV: header
 *   `t,R_est,E_perimeter,E_classical,E_mugnai,components,min_pair_distance,fp_iters`
 *   with empty cells for unrecorded observables;
 * - binary snapshots: little-endian "PFWF" magic, version 1, dims u8,
 *   points-per-axis u32, eps/alpha/time f64, flow u8, then the u and mu
 *   payloads as f64 row-major;
 * - contour CSV: `polyline_id,x,y` rows.
 */

import { readFileSync } from "node:fs";

export const SERIES_HEADER =
  "t,R_est,E_perimeter,E_classical,E_mugnai,components,min_pair_distance,fp_iters";

export interface SeriesPoint {
  t: number;
  rEst: number | null;
  ePerimeter: number | null;
  eClassical: number | null;
  eMugnai: number | null;
  components: number | null;
  minPairDistance: number | null;
  fpIters: number | null;
}

function optFloat(cell: string): number | null {
  return cell === "" ? null : Number(cell);
}

export function parseSeries(text: string, source = "<series>"): SeriesPoint[] {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0 || lines[0] !== SERIES_HEADER) {
    throw new Error(`${source}: missing or unexpected series header`);
  }
  return lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== 8) {
      throw new Error(`${source}: malformed row ${i + 2}: ${line}`);
    }
    const point: SeriesPoint = {
      t: Number(cells[0]),
      rEst: optFloat(cells[1]),
      ePerimeter: optFloat(cells[2]),
      eClassical: optFloat(cells[3]),
      eMugnai: optFloat(cells[4]),
      components: optFloat(cells[5]),
      minPairDistance: optFloat(cells[6]),
      fpIters: optFloat(cells[7]),
    };
    if (!Number.isFinite(point.t)) {
      throw new Error(`${source}: non-numeric time in row ${i + 2}`);
    }
    return point;
  });
}

export function readSeries(path: string): SeriesPoint[] {
  return parseSeries(readFileSync(path, "utf8"), path);
}

/** Linear interpolation of (t, value) samples onto a new time grid. */
export function resample(
  t: number[],
  values: number[],
  targetT: number[],
): number[] {
  if (t.length !== values.length || t.length === 0) {
    throw new Error("resample: empty or mismatched samples");
  }
  return targetT.map((x) => {
    if (x <= t[0]) return values[0];
    if (x >= t[t.length - 1]) return values[values.length - 1];
    let lo = 0;
    let hi = t.length - 1;
    while (hi - lo > 1) {
      const mid = (lo + hi) >> 1;
      if (t[mid] <= x) lo = mid;
      else hi = mid;
    }
    const w = (x - t[lo]) / (t[hi] - t[lo]);
    return values[lo] * (1 - w) + values[hi] * w;
  });
}

export type FlowKind = "classical" | "mugnai" | "allen_cahn";
const FLOW_NAMES: FlowKind[] = ["classical", "mugnai", "allen_cahn"];

export interface Snapshot {
  dims: number;
  points: number;
  eps: number;
  alpha: number;
  time: number;
  flow: FlowKind;
  /** row-major, length points^dims */
  u: Float64Array;
  mu: Float64Array;
}

const MAGIC = "PFWF";
const HEADER_BYTES = 4 + 4 + 1 + 4 + 8 + 8 + 8 + 1;

export function parseSnapshot(buf: Buffer, source = "<snapshot>"): Snapshot {
  if (buf.length < HEADER_BYTES) {
    throw new Error(`${source}: truncated header`);
  }
  if (buf.toString("ascii", 0, 4) !== MAGIC) {
    throw new Error(`${source}: bad magic`);
  }
  const version = buf.readUInt32LE(4);
  if (version !== 1) {
    throw new Error(`${source}: unsupported version ${version}`);
  }
  const dims = buf.readUInt8(8);
  const points = buf.readUInt32LE(9);
  const eps = buf.readDoubleLE(13);
  const alpha = buf.readDoubleLE(21);
  const time = buf.readDoubleLE(29);
  const flowCode = buf.readUInt8(37);
  const flow = FLOW_NAMES[flowCode];
  if (flow === undefined) {
    throw new Error(`${source}: unknown flow code ${flowCode}`);
  }
  const count = points ** dims;
  const expected = HEADER_BYTES + 2 * 8 * count;
  if (buf.length !== expected) {
    throw new Error(
      `${source}: expected ${expected} bytes for ${points}^${dims}, got ${buf.length}`,
    );
  }
  const u = new Float64Array(count);
  const mu = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    u[i] = buf.readDoubleLE(HEADER_BYTES + 8 * i);
    mu[i] = buf.readDoubleLE(HEADER_BYTES + 8 * (count + i));
  }
  return { dims, points, eps, alpha, time, flow, u, mu };
}

export function readSnapshot(path: string): Snapshot {
  return parseSnapshot(readFileSync(path), path);
}

export type Polyline = Array<[number, number]>;

export function parseContour(text: string, source = "<contour>"): Polyline[] {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0 || lines[0] !== "polyline_id,x,y") {
    throw new Error(`${source}: missing or unexpected contour header`);
  }
  const groups = new Map<number, Polyline>();
  for (const line of lines.slice(1)) {
    const [id, x, y] = line.split(",");
    const pid = Number(id);
    if (!groups.has(pid)) groups.set(pid, []);
    groups.get(pid)!.push([Number(x), Number(y)]);
  }
  return [...groups.keys()].sort((a, b) => a - b).map((pid) => groups.get(pid)!);
}

export function readContour(path: string): Polyline[] {
  return parseContour(readFileSync(path, "utf8"), path);
}
