/**
 * Pure chart geometry: curve overlays on the unit square and log-y BER
 * polylines with confidence bands.  All outputs are pixel-space points;
 * DOM/canvas code just draws them.
 */
import type { BerRow, ExitCurves } from "./types.js";

export interface Polyline {
  points: [number, number][];
}

/** Unit-square point -> pixel (row 0 at the top). */
export function unitToPixel(x: number, y: number, width: number, height: number):
  [number, number] {
  return [x * (width - 1), (1 - y) * (height - 1)];
}

/** VND curve plus the CND curve with swapped axes, ready to overlay. */
export function exitOverlay(curves: ExitCurves, width: number, height: number):
  { vnd: Polyline; cnd: Polyline } {
  const vnd: Polyline = { points: [] };
  const cnd: Polyline = { points: [] };
  for (let i = 0; i < curves.i_a.length; i++) {
    vnd.points.push(unitToPixel(curves.i_a[i], curves.i_e_vnd[i], width, height));
    cnd.points.push(unitToPixel(curves.i_e_cnd[i], curves.i_a[i], width, height));
  }
  return { vnd, cnd };
}

export interface BerPlotGeometry {
  line: Polyline;
  band: [number, number][];      // ci polygon: low edge then reversed high edge
  markers: { x: number; y: number; hollow: boolean }[];
  xTicks: { x: number; label: string }[];
  yTicks: { y: number; label: string }[];
}

export function berPlot(rows: BerRow[], width: number, height: number,
                        minBer = 1e-7): BerPlotGeometry {
  const drawn = rows.filter((r) => r.ber > 0 || r.ci_high > 0);
  if (drawn.length === 0) {
    return { line: { points: [] }, band: [], markers: [], xTicks: [], yTicks: [] };
  }
  const xs = drawn.map((r) => r.channel_param);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const xSpan = xMax - xMin || 1;
  const yTop = 0;   // log10(1)
  const floor = Math.log10(minBer);

  const px = (x: number) => ((x - xMin) / xSpan) * (width - 1);
  const py = (ber: number) => {
    const v = Math.log10(Math.max(ber, minBer));
    return ((yTop - v) / (yTop - floor)) * (height - 1);
  };

  const line: Polyline = { points: drawn.map((r) => [px(r.channel_param), py(r.ber)]) };
  const low = drawn.map((r) => [px(r.channel_param), py(Math.max(r.ci_low, minBer))] as [number, number]);
  const high = drawn.map((r) => [px(r.channel_param), py(r.ci_high)] as [number, number]);
  const band = [...low, ...high.reverse()];
  const markers = drawn.map((r) => ({
    x: px(r.channel_param), y: py(r.ber), hollow: r.undersampled,
  }));
  const xTicks = xs.map((x) => ({ x: px(x), label: `${x}` }));
  const yTicks: { y: number; label: string }[] = [];
  for (let e = 0; e >= floor; e--) {
    yTicks.push({ y: py(10 ** e), label: `1e${e}` });
  }
  return { line, band, markers, xTicks, yTicks };
}
