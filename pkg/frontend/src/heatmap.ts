/**
 * Scattered-chart heatmap rasterization: bundle layers -> RGBA pixels.
 *
 * Pure function of the bundle (no canvas dependency), one pixel per
 * histogram bin: VND counts darken toward blue, CND counts toward red,
 * overlap blends dark.  Row 0 is the top of the chart (y = 1).
 */
import type { SexitBundle } from "./types.js";

export interface HeatmapOptions {
  showVnd?: boolean;
  showCnd?: boolean;
  logScale?: boolean;
}

export interface HeatmapImage {
  width: number;
  height: number;
  pixels: Uint8ClampedArray;  // RGBA, row-major from the top
  vndAvailable: boolean;
  cndAvailable: boolean;
  vndMax: number;
  cndMax: number;
}

function maxCount(counts: number[][]): number {
  let m = 0;
  for (const row of counts) {
    for (const c of row) if (c > m) m = c;
  }
  return m;
}

function intensity(count: number, max: number, log: boolean): number {
  if (count <= 0 || max <= 0) return 0;
  return log ? Math.log1p(count) / Math.log1p(max) : count / max;
}

export function renderHeatmap(bundle: SexitBundle, opts: HeatmapOptions = {}): HeatmapImage {
  const n = bundle.n_grid;
  const vnd = bundle.layers.vnd;
  const cnd = bundle.layers.cnd;
  if (vnd.counts.length !== n || cnd.counts.length !== n) {
    throw new Error(`bundle layers are not ${n}x${n}`);
  }
  const log = opts.logScale ?? true;
  const vndMax = maxCount(vnd.counts);
  const cndMax = maxCount(cnd.counts);
  const showVnd = (opts.showVnd ?? true) && vndMax > 0;
  const showCnd = (opts.showCnd ?? true) && cndMax > 0;

  const pixels = new Uint8ClampedArray(n * n * 4);
  for (let iy = 0; iy < n; iy++) {
    const row = n - 1 - iy;             // chart y axis points up
    for (let ix = 0; ix < n; ix++) {
      const iv = showVnd ? intensity(vnd.counts[ix][iy], vndMax, log) : 0;
      const ic = showCnd ? intensity(cnd.counts[ix][iy], cndMax, log) : 0;
      const o = (row * n + ix) * 4;
      pixels[o] = Math.round(255 * (1 - iv));                 // vnd removes red
      pixels[o + 1] = Math.round(255 * (1 - Math.max(iv, ic)));
      pixels[o + 2] = Math.round(255 * (1 - ic));             // cnd removes blue
      pixels[o + 3] = 255;
    }
  }
  return {
    width: n, height: n, pixels,
    vndAvailable: vndMax > 0, cndAvailable: cndMax > 0,
    vndMax, cndMax,
  };
}
