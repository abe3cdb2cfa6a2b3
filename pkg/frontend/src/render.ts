/**
 * The four figure types rendered from solver outputs:
 *
 * - contours:      overlay of 1/2-level contour CSVs in the unit box
 * - radius_law:    measured R(t) from a series CSV vs the exact law
 * - energy_series: recorded energies vs time
 * - heatmap:       u of a snapshot as a grayscale-to-blue map
 *
 * All rendering is deterministic (fixed canvas, fixed color cycle, no
 * platform fonts); images are written as PNG.
 */

import { radiusLaw, DEFAULT_R0 } from "./compare.js";
import type { Polyline, SeriesPoint, Snapshot } from "./formats.js";
import { COLOR_CYCLE, formatTick, Raster, type Color } from "./png.js";

export const PLOT_KINDS = ["contours", "radius_law", "energy_series", "heatmap"] as const;
export type PlotKind = (typeof PLOT_KINDS)[number];

const W = 640;
const H = 480;
const MARGIN = { left: 64, right: 16, top: 16, bottom: 40 };
const BLACK: Color = [0, 0, 0];
const GRAY: Color = [176, 176, 176];

interface Frame {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
  px(x: number): number;
  py(y: number): number;
}

function frame(raster: Raster, x0: number, x1: number, y0: number, y1: number): Frame {
  const plotW = raster.width - MARGIN.left - MARGIN.right;
  const plotH = raster.height - MARGIN.top - MARGIN.bottom;
  const fx = (x: number) => MARGIN.left + ((x - x0) / (x1 - x0 || 1)) * plotW;
  const fy = (y: number) => MARGIN.top + (1 - (y - y0) / (y1 - y0 || 1)) * plotH;
  return { x0, x1, y0, y1, px: fx, py: fy };
}

function drawAxes(raster: Raster, f: Frame, ticks = 5): void {
  raster.rect(f.px(f.x0), f.py(f.y1), f.px(f.x1), f.py(f.y0), BLACK);
  for (let i = 0; i <= ticks; i++) {
    const x = f.x0 + ((f.x1 - f.x0) * i) / ticks;
    const y = f.y0 + ((f.y1 - f.y0) * i) / ticks;
    raster.line(f.px(x), f.py(f.y0), f.px(x), f.py(f.y0) + 4, BLACK);
    raster.text(f.px(x) - 10, f.py(f.y0) + 8, formatTick(x), BLACK, 1);
    raster.line(f.px(f.x0) - 4, f.py(y), f.px(f.x0), f.py(y), BLACK);
    raster.text(4, f.py(y) - 3, formatTick(y), BLACK, 1);
  }
}

function polylinePath(raster: Raster, f: Frame, pts: Polyline, color: Color): void {
  for (let i = 1; i < pts.length; i++) {
    raster.line(f.px(pts[i - 1][0]), f.py(pts[i - 1][1]), f.px(pts[i][0]), f.py(pts[i][1]), color);
  }
}

/** Contour overlay: one color per input file, axes spanning the unit box. */
export function renderContours(contourSets: Polyline[][]): Buffer {
  const raster = new Raster(W, H);
  const f = frame(raster, 0, 1, 0, 1);
  drawAxes(raster, f, 4);
  contourSets.forEach((polylines, which) => {
    const color = COLOR_CYCLE[which % COLOR_CYCLE.length];
    for (const pts of polylines) {
      polylinePath(raster, f, pts, color);
    }
  });
  return raster.png();
}

/** Measured radius vs the exact law (R0^4 + 2t)^(1/4). */
export function renderRadiusLaw(series: SeriesPoint[], r0: number = DEFAULT_R0): Buffer {
  const samples = series.filter((p) => p.rEst !== null);
  if (samples.length === 0) {
    throw new Error("series contains no radius samples");
  }
  const t1 = Math.max(...samples.map((p) => p.t));
  const values = samples.map((p) => p.rEst as number).concat(radiusLaw(t1, r0), r0);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const pad = 0.05 * (hi - lo || 1);
  const raster = new Raster(W, H);
  const f = frame(raster, 0, t1 || 1, lo - pad, hi + pad);
  drawAxes(raster, f);

  const lawPts: Polyline = [];
  for (let i = 0; i <= 256; i++) {
    const t = (t1 * i) / 256;
    lawPts.push([t, radiusLaw(t, r0)]);
  }
  polylinePath(raster, f, lawPts, COLOR_CYCLE[1]);
  polylinePath(raster, f, samples.map((p) => [p.t, p.rEst as number]), COLOR_CYCLE[0]);
  // legend swatches: measured (first), exact law (second)
  raster.fillRect(W - 120, 24, W - 104, 30, COLOR_CYCLE[0]);
  raster.fillRect(W - 120, 38, W - 104, 44, COLOR_CYCLE[1]);
  return raster.png();
}

/** Recorded energy columns vs time (whichever are present). */
export function renderEnergySeries(series: SeriesPoint[]): Buffer {
  const channels: Array<{ pick: (p: SeriesPoint) => number | null }> = [
    { pick: (p) => p.ePerimeter },
    { pick: (p) => p.eClassical },
    { pick: (p) => p.eMugnai },
  ];
  const present = channels.filter(({ pick }) => series.some((p) => pick(p) !== null));
  if (present.length === 0) {
    throw new Error("series contains no energy columns");
  }
  const t1 = Math.max(...series.map((p) => p.t));
  let lo = Infinity;
  let hi = -Infinity;
  for (const { pick } of present) {
    for (const p of series) {
      const v = pick(p);
      if (v !== null) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
  }
  const pad = 0.05 * (hi - lo || 1);
  const raster = new Raster(W, H);
  const f = frame(raster, 0, t1 || 1, lo - pad, hi + pad);
  drawAxes(raster, f);
  present.forEach(({ pick }, which) => {
    const pts: Polyline = series
      .filter((p) => pick(p) !== null)
      .map((p) => [p.t, pick(p) as number]);
    polylinePath(raster, f, pts, COLOR_CYCLE[which % COLOR_CYCLE.length]);
  });
  return raster.png();
}

function heatColor(v: number): Color {
  // 0 -> white, 1 -> deep blue through a fixed two-segment map
  const x = Math.max(0, Math.min(1, v));
  if (x < 0.5) {
    const w = x / 0.5;
    return [255 - 104 * w, 255 - 76 * w, 255 - 25 * w];
  }
  const w = (x - 0.5) / 0.5;
  return [151 - 120 * w, 179 - 60 * w, 230 - 50 * w];
}

/** 2D snapshot field as a heatmap (3D snapshots show the equatorial slice). */
export function renderHeatmap(snap: Snapshot): Buffer {
  const M = snap.points;
  let plane: Float64Array;
  if (snap.dims === 2) {
    plane = snap.u;
  } else if (snap.dims === 3) {
    plane = new Float64Array(M * M);
    const z = Math.floor(M / 2);
    for (let i = 0; i < M; i++) {
      for (let j = 0; j < M; j++) {
        plane[i * M + j] = snap.u[(i * M + j) * M + z];
      }
    }
  } else {
    throw new Error(`cannot render a ${snap.dims}D snapshot as a heatmap`);
  }
  const scale = Math.max(1, Math.floor(512 / M));
  const raster = new Raster(M * scale, M * scale);
  for (let i = 0; i < M; i++) {
    for (let j = 0; j < M; j++) {
      const color = heatColor(plane[i * M + j]);
      // x = row index i (first axis), drawn left-to-right; y = second axis,
      // drawn bottom-up
      raster.fillRect(
        i * scale,
        (M - 1 - j) * scale,
        i * scale + scale - 1,
        (M - 1 - j) * scale + scale - 1,
        color,
      );
    }
  }
  return raster.png();
}
