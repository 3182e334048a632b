import { describe, expect, it } from "vitest";

import curveFixture from "../src/fixtures/curve_presets.json";
import {
  decadeTicks,
  groupSeries,
  logScale,
  nearestRow,
  readoutAt,
  renderChartSvg,
  seriesPath,
} from "../src/chart.js";
import type { CurveRow } from "../src/types.js";

const rows = curveFixture as CurveRow[];

describe("logScale", () => {
  it("maps decades linearly", () => {
    const scale = logScale([1e-4, 1e0], [0, 400]);
    expect(scale(1e-4)).toBeCloseTo(0);
    expect(scale(1e-2)).toBeCloseTo(200);
    expect(scale(1e0)).toBeCloseTo(400);
  });
});

describe("decadeTicks", () => {
  it("emits powers of ten inside the domain", () => {
    expect(decadeTicks(1e-4, 0.5)).toEqual([1e-4, 1e-3, 1e-2, 1e-1]);
  });
});

describe("groupSeries", () => {
  it("splits rows per delta and sorts by error rate", () => {
    const series = groupSeries(rows);
    expect(series.map((s) => s.delta)).toEqual([0.01, 0.061, 0.1]);
    for (const s of series) {
      const rates = s.rows.map((r) => r.error_rate);
      expect(rates).toEqual([...rates].sort((a, b) => a - b));
    }
  });
});

describe("seriesPath", () => {
  it("builds one move followed by line segments", () => {
    const series = groupSeries(rows)[0];
    const x = logScale([1e-4, 0.5], [40, 700]);
    const y = logScale([1, 1e9], [380, 40]);
    const path = seriesPath(series.rows, x, y);
    expect(path.startsWith("M")).toBe(true);
    expect(path.split(" ").length).toBe(series.rows.length);
  });
});

describe("nearestRow", () => {
  it("reads off the closest grid point in log space", () => {
    const series = groupSeries(rows).find((s) => s.delta === 0.061)!;
    const row = nearestRow(series, 1e-3);
    expect(row.error_rate).toBeCloseTo(1e-3, 3);
    // the 6% rule: about a million comparisons at a 0.1% error rate
    expect(row.required_comparisons).toBeGreaterThan(0.9e6);
    expect(row.required_comparisons).toBeLessThan(1.1e6);
  });
});

describe("renderChartSvg", () => {
  it("renders one path per series plus the current-point marker", () => {
    const series = groupSeries(rows);
    const svg = renderChartSvg(series, { width: 720, height: 420 }, {
      error_rate: 1e-3,
      required_comparisons: 1e6,
    });
    expect(svg.match(/<path /g)?.length).toBe(3);
    expect(svg).toContain('data-marker="current"');
    expect(svg).toContain("error rate (log)");
  });

  it("is a pure function of its inputs", () => {
    const series = groupSeries(rows);
    const a = renderChartSvg(series, { width: 500, height: 300 });
    const b = renderChartSvg(series, { width: 500, height: 300 });
    expect(a).toBe(b);
  });

  it("renders an empty frame without data", () => {
    const svg = renderChartSvg([], { width: 300, height: 200 });
    expect(svg).toContain("<svg");
    expect(svg).not.toContain("<path");
  });
});

describe("readoutAt", () => {
  it("inverts a pixel offset to an error rate and reads every series", () => {
    const series = groupSeries(rows);
    const options = { width: 720, height: 420, margin: 48 };
    const readout = readoutAt(series, options, 48)!; // left edge = lowest rate
    expect(readout.error_rate).toBeCloseTo(1e-4, 6);
    expect(readout.entries.length).toBe(3);
    const right = readoutAt(series, options, 720 - 48)!;
    expect(right.error_rate).toBeCloseTo(0.5, 3);
  });

  it("clamps offsets outside the plot area", () => {
    const series = groupSeries(rows);
    const options = { width: 720, height: 420 };
    expect(readoutAt(series, options, -100)!.error_rate).toBeCloseTo(1e-4, 6);
    expect(readoutAt([], options, 100)).toBeNull();
  });
});
