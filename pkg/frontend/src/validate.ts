// Client-side form validation mirroring the server's rules, so obviously
// bad input never reaches the network.  The server remains authoritative:
// a 400 from it is still surfaced on the matching field.

export type Mode = "uncertainty" | "plan" | "min_error";
export type RateUnit = "percent" | "fraction";

export interface FormState {
  mode: Mode;
  comparisons: string;
  errorRate: string;
  errorRateUnit: RateUnit;
  confidence: string;
  targetDelta: string;
}

export type FieldErrors = Partial<Record<string, string>>;

export const CONFIDENCE_PRESETS = [0.9, 0.95, 0.99];
export const DELTA_PRESETS = [0.01, 0.061, 0.1];

export function rateAsFraction(state: Pick<FormState, "errorRate" | "errorRateUnit">): number {
  const raw = Number(state.errorRate);
  return state.errorRateUnit === "percent" ? raw / 100 : raw;
}

function checkComparisons(value: string, errors: FieldErrors): void {
  const n = Number(value);
  if (value.trim() === "" || !Number.isFinite(n)) {
    errors.comparisons = "enter the number of comparisons";
  } else if (!Number.isInteger(n) || n < 1) {
    errors.comparisons = "must be a whole number of at least 1";
  }
}

function checkConfidence(value: string, errors: FieldErrors): void {
  const c = Number(value);
  if (value.trim() === "" || !Number.isFinite(c) || c <= 0 || c >= 1) {
    errors.confidence = "confidence level must be between 0 and 1 (e.g. 0.95)";
  }
}

export function validate(state: FormState): FieldErrors {
  const errors: FieldErrors = {};
  checkConfidence(state.confidence, errors);
  if (state.mode === "uncertainty" || state.mode === "min_error") {
    checkComparisons(state.comparisons, errors);
  }
  if (state.mode === "uncertainty") {
    const rate = rateAsFraction(state);
    if (state.errorRate.trim() === "" || !Number.isFinite(rate)) {
      errors.error_rate = "enter the observed error rate";
    } else if (rate < 0 || rate > 1) {
      errors.error_rate =
        state.errorRateUnit === "percent"
          ? "must be between 0% and 100%"
          : "must be between 0 and 1";
    }
  }
  if (state.mode === "plan") {
    const rate = rateAsFraction(state);
    if (state.errorRate.trim() === "" || !Number.isFinite(rate)) {
      errors.error_rate = "enter the expected error rate";
    } else if (rate <= 0 || rate >= 1) {
      errors.error_rate = "planning needs an error rate strictly between 0 and 1";
    }
    const delta = Number(state.targetDelta);
    if (state.targetDelta.trim() === "" || !Number.isFinite(delta) || delta <= 0) {
      errors.target_delta = "target uncertainty must be a positive number";
    }
  }
  if (state.mode === "min_error") {
    const delta = Number(state.targetDelta);
    if (state.targetDelta.trim() === "" || !Number.isFinite(delta) || delta <= 0) {
      errors.target_delta = "target uncertainty must be a positive number";
    }
  }
  return errors;
}

export function isValid(errors: FieldErrors): boolean {
  return Object.keys(errors).length === 0;
}
