// Display rounding rules.  The UI never recomputes statistics: every value
// shown comes from an API response, formatted here and nowhere else.
//
// Stated rules:
//   - rates and relative uncertainties display as percentages rounded to
//     2 significant digits;
//   - comparison counts display with thousands separators, unrounded;
//   - minimum reportable errors display the API's own rendering, prefixed
//     with a >= sign when the cap has not already added one.

import type { DeltaRel, MinErrorResponse, UncertaintyResponse } from "./types.js";

export function significant(value: number, digits: number): string {
  if (value === 0) return "0";
  const rounded = Number(value.toPrecision(digits));
  // toPrecision can fall into exponent notation for tiny values; the API
  // never produces rates below 1e-12, so 20 fractional digits suffice.
  return Math.abs(rounded) >= 1e-6
    ? rounded.toString()
    : rounded.toFixed(20).replace(/0+$/, "");
}

export function formatPercent(fraction: number): string {
  return `${significant(fraction * 100, 2)}%`;
}

export function formatDeltaRel(delta: DeltaRel): string {
  if (delta.value === null) {
    return "undefined (observed rate is 0)";
  }
  return formatPercent(delta.value);
}

export function formatComparisons(count: number): string {
  return count.toLocaleString("en-US");
}

export function formatInterval(result: UncertaintyResponse): string {
  return `[${formatPercent(result.interval_low)}, ${formatPercent(result.interval_high)}]`;
}

export function formatMinError(response: MinErrorResponse): string {
  const display = response.display;
  return display.startsWith("≥") ? display : `≥ ${display}`;
}
