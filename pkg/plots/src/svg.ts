// Small hand-rolled SVG toolkit: element builders, linear/log scales,
// tick generation, and a viridis-like color ramp. No drawing library;
// figures must render byte-identically for the same inputs.

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Pixel coordinate: fixed 2-decimal form so output is stable. */
export function px(v: number): string {
  return (Math.round(v * 100) / 100).toFixed(2);
}

/** Human-facing tick/label number, trimmed to 6 significant digits. */
export function fmtNum(v: number): string {
  if (v === 0) return "0";
  return String(Number(v.toPrecision(6)));
}

export function el(tag: string, attrs: Record<string, string | number>, body = ""): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? px(v) : esc(v)}"`)
    .join("");
  return body === "" ? `<${tag}${a}/>` : `<${tag}${a}>${body}</${tag}>`;
}

export function textEl(x: number, y: number, s: string, attrs: Record<string, string> = {}): string {
  return el("text", { x, y, ...attrs }, esc(s));
}

export type Scale = (v: number) => number;

export function linScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return v => r0 + ((v - d0) / span) * (r1 - r0);
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  if (d0 <= 0 || d1 <= 0) throw new Error("log scale needs a positive domain");
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return v => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0);
}

/** Round-number ticks (1/2/5 progression) covering [lo, hi]. */
export function linTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (mag * m >= raw) { step = mag * m; break; }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

/** Decade ticks 10^k inside [lo, hi]. */
export function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let k = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, k) <= hi * (1 + 1e-9); k++) {
    out.push(Math.pow(10, k));
  }
  return out.length > 0 ? out : [lo, hi];
}

// viridis control points, linearly interpolated
const RAMP: [number, number, number][] = [
  [68, 1, 84], [71, 44, 122], [59, 81, 139], [44, 113, 142],
  [33, 144, 141], [39, 173, 129], [92, 200, 99], [170, 220, 50],
  [253, 231, 37],
];

export function rampColor(t: number): string {
  const u = Math.min(1, Math.max(0, t)) * (RAMP.length - 1);
  const i = Math.min(RAMP.length - 2, Math.floor(u));
  const f = u - i;
  const c = RAMP[i].map((a, k) => Math.round(a + f * (RAMP[i + 1][k] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

export function svgDoc(width: number, height: number, body: string): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>\n` +
    body + "\n</svg>\n";
}
