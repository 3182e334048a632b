import { describe, expect, it } from "vitest";

import {
  isValid,
  rateAsFraction,
  validate,
  type FormState,
} from "../src/validate.js";

function state(overrides: Partial<FormState> = {}): FormState {
  return {
    mode: "uncertainty",
    comparisons: "45000",
    errorRate: "2.0",
    errorRateUnit: "percent",
    confidence: "0.95",
    targetDelta: "0.061",
    ...overrides,
  };
}

describe("rateAsFraction", () => {
  it("converts percent input", () => {
    expect(rateAsFraction({ errorRate: "2.0", errorRateUnit: "percent" })).toBeCloseTo(
      0.02,
    );
  });

  it("passes fractions through", () => {
    expect(rateAsFraction({ errorRate: "0.02", errorRateUnit: "fraction" })).toBe(0.02);
  });
});

describe("validate", () => {
  it("accepts the reference form", () => {
    expect(validate(state())).toEqual({});
  });

  it("rejects non-integer comparisons", () => {
    const errors = validate(state({ comparisons: "45.5" }));
    expect(errors.comparisons).toMatch(/whole number/);
    expect(isValid(errors)).toBe(false);
  });

  it("rejects out-of-range percent rates", () => {
    expect(validate(state({ errorRate: "150" })).error_rate).toMatch(/100%/);
  });

  it("accepts boundary rates for uncertainty but not for planning", () => {
    expect(validate(state({ errorRate: "0" }))).toEqual({});
    const planErrors = validate(state({ mode: "plan", errorRate: "0" }));
    expect(planErrors.error_rate).toMatch(/between 0 and 1/);
  });

  it("requires a positive target delta in plan mode", () => {
    const errors = validate(state({ mode: "plan", targetDelta: "-1" }));
    expect(errors.target_delta).toBeTruthy();
  });

  it("checks confidence in every mode", () => {
    for (const mode of ["uncertainty", "plan", "min_error"] as const) {
      const errors = validate(state({ mode, confidence: "1.5" }));
      expect(errors.confidence).toBeTruthy();
    }
  });

  it("ignores the error rate in min_error mode", () => {
    expect(validate(state({ mode: "min_error", errorRate: "" }))).toEqual({});
  });
});
