import { copyFileSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { Logger, run } from "../src/main.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const FIX = join(HERE, "fixtures");

const HEAT = [
  join(FIX, "heatmap", "heatmap_vlc_sinr_db_h1.3.csv"),
  join(FIX, "heatmap", "heatmap_vlc_sinr_db_h1.5.csv"),
  join(FIX, "heatmap", "heatmap_vlc_sinr_db_h1.7.csv"),
];
const HEAT_MAN = join(FIX, "heatmap", "manifest.json");
const OPEN = join(FIX, "height_open", "sweep_bd_height_open.csv");
const OPEN_MAN = join(FIX, "height_open", "manifest.json");
const MIXED = join(FIX, "height_mixed", "sweep_bd_height_mixed.csv");
const MIXED_MAN = join(FIX, "height_mixed", "manifest.json");
const RTH = join(FIX, "rth", "sweep_rate_threshold_open.csv");
const RTH_MAN = join(FIX, "rth", "manifest.json");
const BARS = join(FIX, "coderate", "sweep_code_rate_open.csv");
const BARS_MAN = join(FIX, "coderate", "manifest.json");

interface Capture extends Logger {
  errors: string[];
  infos: string[];
}

function capture(): Capture {
  const errors: string[] = [];
  const infos: string[] = [];
  return { errors, infos, error: m => errors.push(m), info: m => infos.push(m) };
}

function render(args: string[]): { rc: number; log: Capture; out: string } {
  const out = join(mkdtempSync(join(tmpdir(), "plots-")), "fig.svg");
  const log = capture();
  const rc = run(["render", ...args, "--out", out], log);
  return { rc, log, out };
}

function count(hay: string, needle: string): number {
  return hay.split(needle).length - 1;
}

describe("heatmap_triptych", () => {
  const args = [
    "--kind", "heatmap_triptych",
    "--in", HEAT[0], "--in", HEAT[1], "--in", HEAT[2],
    "--manifest", HEAT_MAN,
  ];

  it("renders one panel per input CSV with coverage circles from the manifest", () => {
    const { rc, out } = render(args);
    expect(rc).toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(count(svg, 'class="panel"')).toBe(3);
    // 9 LEDs in the fixture scenario, circles drawn on every panel
    expect(count(svg, 'class="coverage"')).toBe(27);
    expect(svg).toContain(">h = 1.3 m<");
    expect(svg).toContain(">h = 1.7 m<");
  });

  it("panel count follows the inputs, not a fixed layout", () => {
    const { rc, out } = render([
      "--kind", "heatmap_triptych",
      "--in", HEAT[0], "--in", HEAT[2],
      "--manifest", HEAT_MAN,
    ]);
    expect(rc).toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect(count(svg, 'class="panel"')).toBe(2);
    expect(count(svg, 'class="coverage"')).toBe(18);
  });

  it("has deterministic pixel dimensions", () => {
    const a = render(args);
    const b = render(args);
    const svgA = readFileSync(a.out, "utf-8");
    expect(svgA).toBe(readFileSync(b.out, "utf-8"));
    expect(svgA).toMatch(/^<svg [^>]*width="890" height="300"/);
  });

  it("renders an all-equal grid without error", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-flat-"));
    const csv = join(dir, "flat.csv");
    writeFileSync(csv, "x_m,y_m,value\n0.5,0.5,1\n0.5,1.5,1\n1.5,0.5,1\n1.5,1.5,1\n");
    const man = join(dir, "manifest.json");
    writeFileSync(man, JSON.stringify({
      config: { scenario: { room_width_m: 2, room_length_m: 2, led_xy_m: [[1, 1]] } },
      outputs: [{ path: "flat.csv", kind: "heatmap", bd_height_m: 1.5, coverage_radius_m: 0.5 }],
    }));
    const { rc, out } = render(["--kind", "heatmap_triptych", "--in", csv, "--manifest", man]);
    expect(rc).toBe(0);
    expect(readFileSync(out, "utf-8")).toContain('class="coverage"');
  });

  it("fails without scenario metadata to place the circles", () => {
    const { rc, log } = render(["--kind", "heatmap_triptych", "--in", HEAT[0]]);
    expect(rc).toBe(1);
    expect(log.errors.join("\n")).toContain("manifest");
  });
});

describe("outage_vs_axis", () => {
  const args = [
    "--kind", "outage_vs_axis",
    "--in", OPEN, "--in", MIXED,
    "--manifest", OPEN_MAN, "--manifest", MIXED_MAN,
  ];

  it("draws one series per CSV, dashed only for the mixed environment", () => {
    const { rc, out } = render(args);
    expect(rc).toBe(0);
    const svg = readFileSync(out, "utf-8");
    const series = svg.match(/<polyline[^/]*class="series"[^/]*\/>/g) ?? [];
    expect(series.length).toBe(2);
    const dashed = series.filter(s => s.includes("stroke-dasharray"));
    expect(dashed.length).toBe(1);
    expect(svg).toContain("open indoor");
    expect(svg).toContain("mixed indoor");
    expect(svg).toContain(">overall outage probability<");
    expect(svg).toContain(">BD height (m)<");
  });

  it("renders a single environment as one solid series", () => {
    const { rc, out } = render([
      "--kind", "outage_vs_axis", "--in", OPEN, "--manifest", OPEN_MAN,
    ]);
    expect(rc).toBe(0);
    const series = readFileSync(out, "utf-8")
      .match(/<polyline[^/]*class="series"[^/]*\/>/g) ?? [];
    expect(series.length).toBe(1);
    expect(series[0]).not.toContain("stroke-dasharray");
  });

  it("styles by filename when no manifest is given", () => {
    const { rc, out } = render([
      "--kind", "outage_vs_axis", "--in", OPEN, "--in", MIXED,
    ]);
    expect(rc).toBe(0);
    const series = readFileSync(out, "utf-8")
      .match(/<polyline[^/]*class="series"[^/]*\/>/g) ?? [];
    expect(series.filter(s => s.includes("stroke-dasharray")).length).toBe(1);
  });
});

describe("avg_rate_vs_rth", () => {
  it("renders the rate curve on a log rate-threshold axis", () => {
    const { rc, out } = render([
      "--kind", "avg_rate_vs_rth", "--in", RTH, "--manifest", RTH_MAN,
    ]);
    expect(rc).toBe(0);
    const svg = readFileSync(out, "utf-8");
    const series = svg.match(/<polyline[^/]*class="series"[^/]*\/>/g) ?? [];
    expect(series.length).toBe(1);
    expect(svg).toContain(">rate threshold (bit/s)<");
    // decade ticks from the 1e3..1e5 sweep grid
    expect(svg).toContain(">1000<");
    expect(svg).toContain(">100000<");
  });
});

describe("outage_bars", () => {
  it("draws one VLC and one BC bar per swept code rate", () => {
    const { rc, out } = render([
      "--kind", "outage_bars", "--in", BARS, "--manifest", BARS_MAN,
    ]);
    expect(rc).toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect(count(svg, "bar-vlc")).toBe(3);
    expect(count(svg, "bar-bc")).toBe(3);
    expect(svg).toContain(">VLC hop<");
    expect(svg).toContain(">BC hop<");
    expect(svg).toContain(">0.75<");
  });
});

describe("schema mismatch", () => {
  function corrupt(src: string, from: string, to: string): string {
    const dir = mkdtempSync(join(tmpdir(), "plots-bad-"));
    const dst = join(dir, "bad.csv");
    const text = readFileSync(src, "utf-8");
    const nl = text.indexOf("\n");
    writeFileSync(dst, text.slice(0, nl).replace(from, to) + text.slice(nl));
    return dst;
  }

  it("names the missing sweep column and exits nonzero", () => {
    const bad = corrupt(OPEN, "p_out_overall", "p_out");
    const { rc, log } = render(["--kind", "outage_vs_axis", "--in", bad]);
    expect(rc).toBe(1);
    expect(log.errors.join("\n")).toContain('missing column "p_out_overall"');
  });

  it("names the missing heatmap column and exits nonzero", () => {
    const bad = corrupt(HEAT[0], "value", "val");
    const { rc, log } = render([
      "--kind", "heatmap_triptych", "--in", bad, "--manifest", HEAT_MAN,
    ]);
    expect(rc).toBe(1);
    expect(log.errors.join("\n")).toContain('missing column "value"');
  });

  it("names the missing bars column and exits nonzero", () => {
    const bad = corrupt(BARS, "p_out_vlc", "vlc");
    const { rc, log } = render(["--kind", "outage_bars", "--in", bad]);
    expect(rc).toBe(1);
    expect(log.errors.join("\n")).toContain('missing column "p_out_vlc"');
  });
});

describe("CLI surface", () => {
  it("rejects unknown kinds", () => {
    const { rc, log } = render(["--kind", "pie", "--in", OPEN]);
    expect(rc).toBe(2);
    expect(log.errors.join("\n")).toContain("--kind");
  });

  it("requires the render subcommand, inputs and output", () => {
    const log = capture();
    expect(run([], log)).toBe(2);
    expect(run(["render", "--kind", "outage_vs_axis"], log)).toBe(2);
    expect(run(["plot", "--kind", "outage_vs_axis", "--in", OPEN, "--out", "x.svg"], log)).toBe(2);
  });

  it("reports unreadable inputs as errors", () => {
    const { rc, log } = render(["--kind", "outage_vs_axis", "--in", join(FIX, "nope.csv")]);
    expect(rc).toBe(1);
    expect(log.errors.length).toBeGreaterThan(0);
  });
});

describe("rendering contract", () => {
  it("never modifies its input CSVs", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-ro-"));
    const csv = join(dir, "sweep_bd_height_open.csv");
    copyFileSync(OPEN, csv);
    const before = readFileSync(csv, "utf-8");
    const { rc } = render(["--kind", "outage_vs_axis", "--in", csv, "--manifest", OPEN_MAN]);
    expect(rc).toBe(0);
    expect(readFileSync(csv, "utf-8")).toBe(before);
  });

  it("is deterministic for every figure kind", () => {
    const cases: string[][] = [
      ["--kind", "outage_vs_axis", "--in", OPEN, "--in", MIXED, "--manifest", OPEN_MAN, "--manifest", MIXED_MAN],
      ["--kind", "avg_rate_vs_rth", "--in", RTH, "--manifest", RTH_MAN],
      ["--kind", "outage_bars", "--in", BARS, "--manifest", BARS_MAN],
    ];
    for (const args of cases) {
      const a = render(args);
      const b = render(args);
      expect(a.rc).toBe(0);
      expect(readFileSync(a.out, "utf-8")).toBe(readFileSync(b.out, "utf-8"));
    }
  });
});
