// Log-log chart of required comparisons vs error rate, one line per
// target uncertainty, produced as a plain SVG string.  Everything here is
// a pure function of the fetched rows, so a window resize only re-renders
// the cached data and never refetches.

import type { CurveRow } from "./types.js";

export interface Series {
  delta: number;
  rows: CurveRow[];
}

export interface ChartOptions {
  width: number;
  height: number;
  margin?: number;
}

export interface Marker {
  error_rate: number;
  required_comparisons: number;
  label?: string;
}

const SERIES_COLORS = ["#2196f3", "#9575cd", "#fb8c00", "#4caf50", "#e53935"];

export function groupSeries(rows: CurveRow[]): Series[] {
  const byDelta = new Map<number, CurveRow[]>();
  for (const row of rows) {
    const bucket = byDelta.get(row.delta) ?? [];
    bucket.push(row);
    byDelta.set(row.delta, bucket);
  }
  return [...byDelta.entries()].map(([delta, bucket]) => ({
    delta,
    rows: [...bucket].sort((a, b) => a.error_rate - b.error_rate),
  }));
}

export function logScale(
  domain: [number, number],
  range: [number, number],
): (value: number) => number {
  const [d0, d1] = domain.map(Math.log10);
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (value: number) => r0 + ((Math.log10(value) - d0) / span) * (r1 - r0);
}

export function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.floor(Math.log10(hi) + 1e-9); e++) {
    // 10 ** e is inexact for negative exponents (10 ** -4 !== 1e-4)
    ticks.push(e >= 0 ? 10 ** e : 1 / 10 ** -e);
  }
  return ticks;
}

export function seriesPath(
  rows: CurveRow[],
  x: (v: number) => number,
  y: (v: number) => number,
): string {
  return rows
    .map((row, i) => {
      const cmd = i === 0 ? "M" : "L";
      return `${cmd}${x(row.error_rate).toFixed(2)},${y(row.required_comparisons).toFixed(2)}`;
    })
    .join(" ");
}

export interface Readout {
  error_rate: number;
  entries: Array<{ delta: number; required_comparisons: number; error_rate: number }>;
}

// Invert a horizontal pixel offset back to an error rate and read the
// nearest grid point off every series (the hover behavior).
export function readoutAt(
  seriesList: Series[],
  options: ChartOptions,
  offsetX: number,
): Readout | null {
  const rows = seriesList.flatMap((s) => s.rows);
  if (rows.length === 0) return null;
  const margin = options.margin ?? 48;
  const xLo = Math.min(...rows.map((r) => r.error_rate));
  const xHi = Math.max(...rows.map((r) => r.error_rate));
  const span = options.width - 2 * margin;
  if (span <= 0) return null;
  const t = Math.min(1, Math.max(0, (offsetX - margin) / span));
  const errorRate = 10 ** (Math.log10(xLo) + t * (Math.log10(xHi) - Math.log10(xLo)));
  return {
    error_rate: errorRate,
    entries: seriesList.map((series) => {
      const row = nearestRow(series, errorRate);
      return {
        delta: series.delta,
        required_comparisons: row.required_comparisons,
        error_rate: row.error_rate,
      };
    }),
  };
}

export function nearestRow(series: Series, errorRate: number): CurveRow {
  let best = series.rows[0];
  let bestDistance = Infinity;
  for (const row of series.rows) {
    const distance = Math.abs(Math.log10(row.error_rate) - Math.log10(errorRate));
    if (distance < bestDistance) {
      bestDistance = distance;
      best = row;
    }
  }
  return best;
}

function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}

export function renderChartSvg(
  seriesList: Series[],
  options: ChartOptions,
  marker?: Marker,
): string {
  const margin = options.margin ?? 48;
  const { width, height } = options;
  const rows = seriesList.flatMap((s) => s.rows);
  if (rows.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"></svg>`;
  }
  const [xLo, xHi] = extent(rows.map((r) => r.error_rate));
  const [yLo, yHi] = extent(rows.map((r) => r.required_comparisons));
  const x = logScale([xLo, xHi], [margin, width - margin]);
  const y = logScale([yLo, yHi], [height - margin, margin]);

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>`,
  ];
  for (const tick of decadeTicks(xLo, xHi)) {
    const px = x(tick).toFixed(2);
    parts.push(
      `<line x1="${px}" y1="${margin}" x2="${px}" y2="${height - margin}" class="grid" stroke="#eee"/>`,
      `<text x="${px}" y="${height - margin + 16}" text-anchor="middle" class="tick">1e${Math.round(Math.log10(tick))}</text>`,
    );
  }
  for (const tick of decadeTicks(yLo, yHi)) {
    const py = y(tick).toFixed(2);
    parts.push(
      `<line x1="${margin}" y1="${py}" x2="${width - margin}" y2="${py}" class="grid" stroke="#eee"/>`,
      `<text x="${margin - 6}" y="${py}" text-anchor="end" dominant-baseline="middle" class="tick">1e${Math.round(Math.log10(tick))}</text>`,
    );
  }
  seriesList.forEach((series, i) => {
    const color = SERIES_COLORS[i % SERIES_COLORS.length];
    parts.push(
      `<path d="${seriesPath(series.rows, x, y)}" fill="none" stroke="${color}" stroke-width="2" data-delta="${series.delta}"/>`,
    );
    const last = series.rows[series.rows.length - 1];
    parts.push(
      `<text x="${x(last.error_rate).toFixed(2)}" y="${(y(last.required_comparisons) - 6).toFixed(2)}" fill="${color}" class="series-label">δ=${series.delta}</text>`,
    );
  });
  if (marker) {
    parts.push(
      `<circle cx="${x(marker.error_rate).toFixed(2)}" cy="${y(marker.required_comparisons).toFixed(2)}" r="5" fill="none" stroke="#000" stroke-width="2" data-marker="current"/>`,
    );
  }
  parts.push(
    `<text x="${width / 2}" y="${height - 8}" text-anchor="middle" class="axis-label">error rate (log)</text>`,
    `<text x="12" y="${height / 2}" text-anchor="middle" class="axis-label" transform="rotate(-90 12 ${height / 2})">required comparisons (log)</text>`,
    "</svg>",
  );
  return parts.join("");
}
