// Calculator controller: pure orchestration between form state, the API
// client and a rendering sink.  DOM specifics live in main.ts so this
// whole flow is testable without a browser.

import { ApiFailure } from "./api.js";
import { badgeFor, type Badge } from "./badge.js";
import {
  formatComparisons,
  formatDeltaRel,
  formatInterval,
  formatMinError,
  formatPercent,
} from "./format.js";
import {
  groupSeries,
  readoutAt,
  renderChartSvg,
  type Marker,
  type Readout,
  type Series,
} from "./chart.js";
import {
  isValid,
  rateAsFraction,
  validate,
  type FieldErrors,
  type FormState,
} from "./validate.js";
import type {
  CurveRow,
  MinErrorResponse,
  PlanResponse,
  UncertaintyResponse,
} from "./types.js";

// What the controller needs from the network layer; ApiClient satisfies it.
export interface CalculatorApi {
  uncertainty(params: {
    comparisons: number;
    error_rate: number;
    confidence: number;
  }): Promise<UncertaintyResponse>;
  plan(params: {
    error_rate: number;
    target_delta: number;
    confidence: number;
    mode?: string;
  }): Promise<PlanResponse>;
  minError(params: {
    comparisons: number;
    delta: number;
    confidence: number;
  }): Promise<MinErrorResponse>;
  curve(params: {
    deltas: number[];
    confidence: number;
    lo?: number;
    hi?: number;
    points?: number;
  }): Promise<CurveRow[]>;
}

export interface ResultView {
  headline: string;
  badge?: Badge;
  details: string[];
  warning?: string;
}

export interface ViewSink {
  showFieldErrors(errors: FieldErrors): void;
  showResult(view: ResultView): void;
  showRetryBanner(message: string): void;
  renderChart(svg: string): void;
}

export class CalculatorApp {
  private curveCache: { key: string; series: Series[] } | null = null;
  private lastChart: { series: Series[]; marker?: Marker } | null = null;

  constructor(
    private api: CalculatorApi,
    private view: ViewSink,
    private chartSize: { width: number; height: number } = { width: 720, height: 420 },
  ) {}

  async submit(state: FormState): Promise<void> {
    const errors = validate(state);
    this.view.showFieldErrors(errors);
    if (!isValid(errors)) return;
    const confidence = Number(state.confidence);
    try {
      if (state.mode === "uncertainty") {
        const result = await this.api.uncertainty({
          comparisons: Number(state.comparisons),
          error_rate: rateAsFraction(state),
          confidence,
        });
        this.view.showResult({
          headline: `δ ≈ ${formatDeltaRel(result.delta_rel)}`,
          badge: badgeFor(result.class),
          details: [
            `absolute uncertainty ${formatPercent(result.delta_abs)}`,
            `error-rate interval ${formatInterval(result)}`,
          ],
          warning:
            result.delta_rel.value === null
              ? "a zero observed rate has no relative uncertainty; check the minimum reportable error instead"
              : undefined,
        });
        this.markCurve(rateAsFraction(state));
      } else if (state.mode === "plan") {
        const result = await this.api.plan({
          error_rate: rateAsFraction(state),
          target_delta: Number(state.targetDelta),
          confidence,
          mode: "approx",
        });
        const rule = result.rule ? ` (${result.rule})` : "";
        this.view.showResult({
          headline: `≈ ${formatComparisons(result.required_comparisons)} comparisons${rule}`,
          details: [
            "impostor comparisons for FMR, genuine comparisons for FNMR",
          ],
        });
      } else {
        const result = await this.api.minError({
          comparisons: Number(state.comparisons),
          delta: Number(state.targetDelta),
          confidence,
        });
        this.view.showResult({
          headline: `smallest reportable error: ${formatMinError(result)}`,
          details: [],
          warning:
            result.min_error > 0.01
              ? `error rates below ${formatPercent(result.min_error)} cannot be reliably reported with this many comparisons`
              : undefined,
        });
      }
    } catch (err) {
      this.handleFailure(err);
    }
  }

  async loadCurve(deltas: number[], confidence: number): Promise<void> {
    if (deltas.length === 0) {
      this.view.renderChart("");
      return;
    }
    const key = `${deltas.join(",")}@${confidence}`;
    try {
      if (!this.curveCache || this.curveCache.key !== key) {
        const rows: CurveRow[] = await this.api.curve({ deltas, confidence });
        this.curveCache = { key, series: groupSeries(rows) };
      }
      this.lastChart = { series: this.curveCache.series, marker: this.lastChart?.marker };
      this.view.renderChart(
        renderChartSvg(this.curveCache.series, this.chartSize, this.lastChart.marker),
      );
    } catch (err) {
      this.handleFailure(err);
    }
  }

  // hover: read the nearest grid point off every plotted series
  readout(offsetX: number): Readout | null {
    if (!this.lastChart) return null;
    return readoutAt(this.lastChart.series, this.chartSize, offsetX);
  }

  // window resize: re-render the cached series at the new width, no refetch
  resize(width: number, height: number): void {
    this.chartSize = { width, height };
    if (this.lastChart) {
      this.view.renderChart(
        renderChartSvg(this.lastChart.series, this.chartSize, this.lastChart.marker),
      );
    }
  }

  private markCurve(errorRate: number): void {
    if (!this.curveCache || this.curveCache.series.length === 0) return;
    const series = this.curveCache.series[0];
    let nearest = series.rows[0];
    for (const row of series.rows) {
      if (
        Math.abs(Math.log10(row.error_rate) - Math.log10(errorRate)) <
        Math.abs(Math.log10(nearest.error_rate) - Math.log10(errorRate))
      ) {
        nearest = row;
      }
    }
    this.lastChart = { series: this.curveCache.series, marker: nearest };
    this.view.renderChart(
      renderChartSvg(this.curveCache.series, this.chartSize, nearest),
    );
  }

  private handleFailure(err: unknown): void {
    if (err instanceof ApiFailure && err.kind === "validation") {
      this.view.showFieldErrors({ [err.field ?? "form"]: err.message });
      return;
    }
    if (err instanceof ApiFailure && err.message === "superseded") {
      return; // an aborted request lost the latest-wins race; ignore
    }
    this.view.showRetryBanner(
      err instanceof Error ? err.message : "request failed",
    );
  }
}
