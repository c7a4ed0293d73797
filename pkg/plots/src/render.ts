import { readFileSync } from "node:fs";
import { basename } from "node:path";

import { Table, numericColumn, requireColumns } from "./csv.js";
import {
  Scale, el, fmtNum, linScale, linTicks, logScale, logTicks, px,
  rampColor, svgDoc, textEl,
} from "./svg.js";

export const FIGURE_KINDS = [
  "heatmap_triptych", "outage_vs_axis", "avg_rate_vs_rth", "outage_bars",
] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface ManifestOutput {
  path: string;
  kind?: string;
  metric?: string;
  bd_height_m?: number;
  coverage_radius_m?: number;
  axis?: string;
  environment?: string;
  code_rate?: number;
}

export interface Manifest {
  command?: string;
  config?: {
    scenario?: {
      room_width_m?: number;
      room_length_m?: number;
      led_xy_m?: [number, number][];
      dedicated_led_index?: number;
    };
  };
  outputs?: ManifestOutput[];
}

export function readManifest(path: string): Manifest {
  return JSON.parse(readFileSync(path, "utf-8")) as Manifest;
}

/** Find the manifest outputs entry describing a given CSV, by file name. */
export function outputEntry(manifests: Manifest[], csvPath: string): ManifestOutput | undefined {
  const name = basename(csvPath);
  for (const m of manifests) {
    const hit = (m.outputs ?? []).find(o => o.path === name);
    if (hit !== undefined) return hit;
  }
  return undefined;
}

function environmentOf(t: Table, manifests: Manifest[]): string {
  const entry = outputEntry(manifests, t.path);
  if (entry?.environment) return entry.environment;
  return basename(t.path).includes("mixed") ? "mixed" : "open";
}

const AXIS_LABELS: Record<string, string> = {
  bd_height: "BD height (m)",
  bd_orientation: "BD orientation (deg)",
  fov: "FoV semi-angle (deg)",
  code_rate: "code rate",
  rate_threshold: "rate threshold (bit/s)",
};

function axisLabel(t: Table): string {
  const i = t.header.indexOf("axis");
  const name = i >= 0 && t.rows.length > 0 ? t.rows[0][i] : "";
  return AXIS_LABELS[name] ?? name;
}

const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
const MIXED_DASH = "6 4";

// ---- shared axis furniture ----------------------------------------------

function xAxis(sc: Scale, ticks: number[], y0: number, label: string, xMid: number): string {
  let s = el("line", { x1: sc(ticks[0]), x2: sc(ticks[ticks.length - 1]), y1: y0, y2: y0, stroke: "#333" });
  for (const t of ticks) {
    s += el("line", { x1: sc(t), x2: sc(t), y1: y0, y2: y0 + 4, stroke: "#333" });
    s += textEl(sc(t), y0 + 16, fmtNum(t), { "text-anchor": "middle", "font-size": "10" });
  }
  s += textEl(xMid, y0 + 32, label, { "text-anchor": "middle", "font-size": "11" });
  return s;
}

function yAxis(sc: Scale, ticks: number[], x0: number, label: string, yMid: number): string {
  let s = el("line", { x1: x0, x2: x0, y1: sc(ticks[0]), y2: sc(ticks[ticks.length - 1]), stroke: "#333" });
  for (const t of ticks) {
    s += el("line", { x1: x0 - 4, x2: x0, y1: sc(t), y2: sc(t), stroke: "#333" });
    s += textEl(x0 - 6, sc(t) + 3, fmtNum(t), { "text-anchor": "end", "font-size": "10" });
  }
  s += `<g transform="translate(${px(x0 - 42)},${px(yMid)}) rotate(-90)">` +
    textEl(0, 0, label, { "text-anchor": "middle", "font-size": "11" }) + "</g>";
  return s;
}

function polyline(xs: number[], ys: number[], attrs: Record<string, string>): string {
  const pts = xs.map((x, i) => `${px(x)},${px(ys[i])}`).join(" ");
  return el("polyline", { points: pts, fill: "none", ...attrs });
}

interface LineSeries {
  x: number[];
  y: number[];
  color: string;
  dash?: string;
  label: string;
}

function legend(series: LineSeries[], x: number, y: number): string {
  let s = "";
  series.forEach((sr, i) => {
    const yy = y + i * 16;
    const attrs: Record<string, string> = { x1: px(x), x2: px(x + 26), y1: px(yy), y2: px(yy), stroke: sr.color, "stroke-width": "1.8" };
    if (sr.dash) attrs["stroke-dasharray"] = sr.dash;
    s += el("line", attrs);
    s += textEl(x + 32, yy + 3.5, sr.label, { "font-size": "10" });
  });
  return s;
}

// ---- heatmap triptych ----------------------------------------------------

interface HeatPanel {
  xs: number[];
  ys: number[];
  v: number[][];
  title: string;
  radius: number | undefined;
}

function heatPanel(t: Table, manifests: Manifest[]): HeatPanel {
  requireColumns(t, ["x_m", "y_m", "value"]);
  const x = numericColumn(t, "x_m");
  const y = numericColumn(t, "y_m");
  const v = numericColumn(t, "value");
  const xs = [...new Set(x)].sort((a, b) => a - b);
  const ys = [...new Set(y)].sort((a, b) => a - b);
  const xi = new Map(xs.map((c, i) => [c, i]));
  const yi = new Map(ys.map((c, i) => [c, i]));
  const grid: number[][] = xs.map(() => ys.map(() => NaN));
  for (let k = 0; k < v.length; k++) {
    grid[xi.get(x[k])!][yi.get(y[k])!] = v[k];
  }
  const entry = outputEntry(manifests, t.path);
  const title = entry?.bd_height_m !== undefined
    ? `h = ${fmtNum(entry.bd_height_m)} m`
    : basename(t.path).replace(/\.csv$/, "");
  return { xs, ys, v: grid, title, radius: entry?.coverage_radius_m };
}

export function renderHeatmapTriptych(tables: Table[], manifests: Manifest[]): string {
  const panels = tables.map(t => heatPanel(t, manifests));
  const scen = manifests.map(m => m.config?.scenario).find(s => s !== undefined);
  if (scen === undefined) {
    throw new Error("heatmap_triptych needs a manifest with a config.scenario section");
  }
  const roomW = scen.room_width_m ?? Math.max(...panels.flatMap(p => p.xs)) * 1.02;
  const roomL = scen.room_length_m ?? Math.max(...panels.flatMap(p => p.ys)) * 1.02;
  const leds = scen.led_xy_m ?? [];

  const PANEL_W = 220;
  const panelH = PANEL_W * (roomL / roomW);
  const GAP = 44;
  const M = { left: 50, top: 34, bottom: 46 };
  const cbX = M.left + panels.length * PANEL_W + (panels.length - 1) * GAP + 22;
  const width = Math.round(cbX + 14 + 56);
  const height = Math.round(M.top + panelH + M.bottom);

  const flat = panels.flatMap(p => p.v.flat()).filter(Number.isFinite);
  const vmin = Math.min(...flat);
  const vmax = Math.max(...flat);
  const span = vmax - vmin;
  const tcol = (v: number) => (span > 0 ? (v - vmin) / span : 0.5);

  let body = "";
  panels.forEach((p, pi) => {
    const x0 = M.left + pi * (PANEL_W + GAP);
    const sx = linScale(0, roomW, x0, x0 + PANEL_W);
    const sy = linScale(0, roomL, M.top + panelH, M.top); // room y grows upward
    const dx = p.xs.length > 1 ? p.xs[1] - p.xs[0] : roomW;
    const dy = p.ys.length > 1 ? p.ys[1] - p.ys[0] : roomL;
    let cells = "";
    for (let i = 0; i < p.xs.length; i++) {
      for (let j = 0; j < p.ys.length; j++) {
        if (!Number.isFinite(p.v[i][j])) continue;
        // +0.02 px bleed hides hairline seams between cells
        cells += el("rect", {
          x: sx(p.xs[i] - dx / 2), y: sy(p.ys[j] + dy / 2),
          width: dx * (PANEL_W / roomW) + 0.02, height: dy * (panelH / roomL) + 0.02,
          fill: rampColor(tcol(p.v[i][j])),
        });
      }
    }
    let overlay = "";
    if (p.radius !== undefined) {
      const rPx = p.radius * (PANEL_W / roomW);
      for (const [lx, ly] of leds) {
        overlay += el("circle", {
          cx: sx(lx), cy: sy(ly), r: rPx, class: "coverage",
          fill: "none", stroke: "white", "stroke-width": "1.2",
        });
        overlay += el("circle", { cx: sx(lx), cy: sy(ly), r: 1.6, fill: "white" });
      }
    }
    let frame = el("rect", {
      x: x0, y: M.top, width: PANEL_W, height: panelH,
      fill: "none", stroke: "#333",
    });
    frame += textEl(x0 + PANEL_W / 2, M.top - 8, p.title, { "text-anchor": "middle", "font-size": "11" });
    frame += xAxis(sx, linTicks(0, roomW, 5), M.top + panelH, pi === 0 ? "x (m)" : "", x0 + PANEL_W / 2);
    if (pi === 0) {
      frame += yAxis(sy, linTicks(0, roomL, 5), x0, "y (m)", M.top + panelH / 2);
    }
    body += `<g class="panel">` + cells + overlay + frame + "</g>\n";
  });

  // colorbar
  const N = 64;
  let cb = "";
  for (let i = 0; i < N; i++) {
    cb += el("rect", {
      x: cbX, y: M.top + panelH - ((i + 1) * panelH) / N,
      width: 14, height: panelH / N + 0.02, fill: rampColor((i + 0.5) / N),
    });
  }
  cb += el("rect", { x: cbX, y: M.top, width: 14, height: panelH, fill: "none", stroke: "#333" });
  cb += textEl(cbX + 18, M.top + panelH, fmtNum(vmin), { "font-size": "10" });
  cb += textEl(cbX + 18, M.top + 8, fmtNum(vmax), { "font-size": "10" });
  const metric = outputEntry(manifests, tables[0].path)?.metric;
  if (metric) {
    cb += textEl(cbX + 18, M.top + panelH / 2, metric, { "font-size": "10" });
  }
  body += `<g class="colorbar">` + cb + "</g>";

  return svgDoc(width, height, body);
}

// ---- outage vs swept axis ------------------------------------------------

function lineFigure(series: LineSeries[], opts: {
  xLabel: string; yLabel: string; xLog?: boolean; yLog?: boolean;
}): string {
  const W = 560, H = 360;
  const M = { left: 64, right: 16, top: 18, bottom: 48 };
  const x0 = M.left, x1 = W - M.right, y0 = H - M.bottom, y1 = M.top;

  const allX = series.flatMap(s => s.x);
  const xmin = Math.min(...allX), xmax = Math.max(...allX);
  const sx = opts.xLog ? logScale(xmin, xmax, x0, x1) : linScale(xmin, xmax, x0, x1);
  const xticks = opts.xLog ? logTicks(xmin, xmax) : linTicks(xmin, xmax, 7);

  let sy: Scale;
  let yticks: number[];
  let clampLo = -Infinity;
  if (opts.yLog) {
    const pos = series.flatMap(s => s.y).filter(v => v > 0);
    const lo = pos.length > 0 ? Math.pow(10, Math.floor(Math.log10(Math.min(...pos)))) : 1e-4;
    clampLo = Math.min(lo, 0.1); // keep at least one decade below 1
    sy = logScale(clampLo, 1, y0, y1);
    yticks = logTicks(clampLo, 1);
  } else {
    const hi = Math.max(...series.flatMap(s => s.y), 0) || 1;
    sy = linScale(0, hi * 1.08, y0, y1);
    yticks = linTicks(0, hi * 1.08, 6);
  }

  let body = "";
  for (const t of yticks) {
    body += el("line", { x1: x0, x2: x1, y1: sy(t), y2: sy(t), stroke: "#ddd" });
  }
  for (const s of series) {
    const ys = s.y.map(v => sy(Math.max(v, clampLo)));
    const xs = s.x.map(v => sx(v));
    const attrs: Record<string, string> = { class: "series", stroke: s.color, "stroke-width": "1.8" };
    if (s.dash) attrs["stroke-dasharray"] = s.dash;
    body += polyline(xs, ys, attrs);
    for (let i = 0; i < xs.length; i++) {
      body += el("circle", { cx: xs[i], cy: ys[i], r: 2.5, fill: s.color, class: "pt" });
    }
  }
  body += xAxis(sx, xticks, y0, opts.xLabel, (x0 + x1) / 2);
  body += yAxis(sy, yticks, x0, opts.yLabel, (y0 + y1) / 2);
  if (series.length > 1 || series[0].label !== "") {
    body += legend(series, x1 - 150, y1 + 12);
  }
  return svgDoc(W, H, body);
}

function sweepSeries(tables: Table[], manifests: Manifest[], yCol: string): LineSeries[] {
  const entries = tables.map(t => outputEntry(manifests, t.path));
  const rates = new Set(entries.filter(e => e?.code_rate !== undefined).map(e => e!.code_rate));
  return tables.map((t, i) => {
    requireColumns(t, ["axis", "value", yCol]);
    const env = environmentOf(t, manifests);
    let label = `${env} indoor`;
    if (rates.size > 1 && entries[i]?.code_rate !== undefined) {
      label += `, Rc = ${fmtNum(entries[i]!.code_rate!)}`;
    }
    return {
      x: numericColumn(t, "value"),
      y: numericColumn(t, yCol),
      color: SERIES_COLORS[i % SERIES_COLORS.length],
      dash: env === "mixed" ? MIXED_DASH : undefined,
      label,
    };
  });
}

export function renderOutageVsAxis(tables: Table[], manifests: Manifest[]): string {
  const series = sweepSeries(tables, manifests, "p_out_overall");
  return lineFigure(series, {
    xLabel: axisLabel(tables[0]),
    yLabel: "overall outage probability",
    yLog: true,
  });
}

export function renderAvgRateVsRth(tables: Table[], manifests: Manifest[]): string {
  const series = sweepSeries(tables, manifests, "avg_rate_bps");
  if (tables.length === 1) series[0].label = "";
  return lineFigure(series, {
    xLabel: axisLabel(tables[0]),
    yLabel: "average achievable rate (bit/s)",
    xLog: true,
  });
}

// ---- grouped outage bars -------------------------------------------------

export function renderOutageBars(tables: Table[], _manifests: Manifest[]): string {
  const t = tables[0];
  requireColumns(t, ["axis", "value", "p_out_vlc", "p_out_bc"]);
  const labels = numericColumn(t, "value").map(fmtNum);
  const vlc = numericColumn(t, "p_out_vlc");
  const bc = numericColumn(t, "p_out_bc");

  const W = 560, H = 360;
  const M = { left: 64, right: 16, top: 18, bottom: 48 };
  const x0 = M.left, x1 = W - M.right, y0 = H - M.bottom, y1 = M.top;
  const hi = Math.max(...vlc, ...bc, 1e-6) * 1.15;
  const sy = linScale(0, hi, y0, y1);

  const n = labels.length;
  const slot = (x1 - x0) / n;
  const barW = slot * 0.3;
  let body = "";
  const yticks = linTicks(0, hi, 6);
  for (const tk of yticks) {
    body += el("line", { x1: x0, x2: x1, y1: sy(tk), y2: sy(tk), stroke: "#ddd" });
  }
  for (let i = 0; i < n; i++) {
    const cx = x0 + (i + 0.5) * slot;
    body += el("rect", {
      x: cx - barW - 1, y: sy(vlc[i]), width: barW, height: y0 - sy(vlc[i]),
      fill: SERIES_COLORS[0], class: "bar bar-vlc",
    });
    body += el("rect", {
      x: cx + 1, y: sy(bc[i]), width: barW, height: y0 - sy(bc[i]),
      fill: SERIES_COLORS[3], class: "bar bar-bc",
    });
    body += textEl(cx, y0 + 16, labels[i], { "text-anchor": "middle", "font-size": "10" });
  }
  body += el("line", { x1: x0, x2: x1, y1: y0, y2: y0, stroke: "#333" });
  body += textEl((x0 + x1) / 2, y0 + 32, axisLabel(t), { "text-anchor": "middle", "font-size": "11" });
  body += yAxis(sy, yticks, x0, "outage probability", (y0 + y1) / 2);

  let lg = el("rect", { x: x1 - 120, y: y1 + 6, width: 12, height: 12, fill: SERIES_COLORS[0] });
  lg += textEl(x1 - 103, y1 + 16, "VLC hop", { "font-size": "10" });
  lg += el("rect", { x: x1 - 120, y: y1 + 24, width: 12, height: 12, fill: SERIES_COLORS[3] });
  lg += textEl(x1 - 103, y1 + 34, "BC hop", { "font-size": "10" });
  body += lg;

  return svgDoc(W, H, body);
}

export function render(kind: FigureKind, tables: Table[], manifests: Manifest[]): string {
  switch (kind) {
    case "heatmap_triptych": return renderHeatmapTriptych(tables, manifests);
    case "outage_vs_axis": return renderOutageVsAxis(tables, manifests);
    case "avg_rate_vs_rth": return renderAvgRateVsRth(tables, manifests);
    case "outage_bars": return renderOutageBars(tables, manifests);
  }
}
