// DOM bootstrap: binds the form controls to the CalculatorApp controller.

import { ApiClient } from "./api.js";
import { CalculatorApp, type ResultView, type ViewSink } from "./app.js";
import { DELTA_PRESETS, type FormState, type Mode } from "./validate.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function readState(): FormState {
  return {
    mode: (document.querySelector<HTMLInputElement>('input[name="mode"]:checked')
      ?.value ?? "uncertainty") as Mode,
    comparisons: el<HTMLInputElement>("comparisons").value,
    errorRate: el<HTMLInputElement>("error-rate").value,
    errorRateUnit: el<HTMLSelectElement>("error-rate-unit").value as
      | "percent"
      | "fraction",
    confidence: el<HTMLSelectElement>("confidence").value === "custom"
      ? el<HTMLInputElement>("confidence-custom").value
      : el<HTMLSelectElement>("confidence").value,
    targetDelta: el<HTMLSelectElement>("target-delta").value === "custom"
      ? el<HTMLInputElement>("target-delta-custom").value
      : el<HTMLSelectElement>("target-delta").value,
  };
}

const FIELD_TO_INPUT: Record<string, string> = {
  comparisons: "comparisons",
  error_rate: "error-rate",
  confidence: "confidence",
  target_delta: "target-delta",
};

const sink: ViewSink = {
  showFieldErrors(errors) {
    for (const note of document.querySelectorAll(".field-error")) {
      note.textContent = "";
    }
    for (const [field, message] of Object.entries(errors)) {
      const input = FIELD_TO_INPUT[field];
      const note = input
        ? document.querySelector(`#${input}-error`)
        : document.querySelector("#form-error");
      if (note) note.textContent = message ?? "";
    }
  },
  showResult(view: ResultView) {
    el("retry-banner").hidden = true;
    const headline = el("result-headline");
    headline.textContent = view.headline + (view.badge ? " — " : "");
    if (view.badge) {
      const badge = document.createElement("span");
      badge.className = "badge";
      badge.style.background = view.badge.colorHex;
      badge.title = view.badge.colorName;
      badge.textContent = view.badge.text;
      headline.appendChild(badge);
    }
    el("result-details").innerHTML = view.details
      .map((d) => `<li>${d}</li>`)
      .join("");
    const warning = el("result-warning");
    warning.textContent = view.warning ?? "";
    warning.hidden = !view.warning;
    el("result-panel").hidden = false;
  },
  showRetryBanner(message) {
    const banner = el("retry-banner");
    banner.hidden = false;
    el("retry-message").textContent = message;
  },
  renderChart(svg) {
    el("chart").innerHTML = svg;
  },
};

const app = new CalculatorApp(new ApiClient(""), sink, {
  width: Math.min(document.body.clientWidth - 40, 860),
  height: 420,
});

function selectedDeltas(): number[] {
  return DELTA_PRESETS.filter(
    (d) => document.querySelector<HTMLInputElement>(`#curve-${d}`)?.checked,
  );
}

function refreshCurve(): void {
  const deltas = selectedDeltas();
  el<HTMLButtonElement>("curve-refresh").disabled = deltas.length === 0;
  void app.loadCurve(deltas, Number(readState().confidence) || 0.95);
}

el<HTMLFormElement>("calculator").addEventListener("submit", (event) => {
  event.preventDefault();
  void app.submit(readState());
});
el("retry-button").addEventListener("click", () => {
  el("retry-banner").hidden = true;
  void app.submit(readState());
});
for (const d of DELTA_PRESETS) {
  document
    .querySelector(`#curve-${d}`)
    ?.addEventListener("change", refreshCurve);
}
el("curve-refresh").addEventListener("click", refreshCurve);
window.addEventListener("resize", () => {
  app.resize(Math.min(document.body.clientWidth - 40, 860), 420);
});

el("chart").addEventListener("mousemove", (event) => {
  const readout = app.readout((event as MouseEvent).offsetX);
  const target = el("chart-readout");
  if (!readout) {
    target.textContent = "";
    return;
  }
  target.textContent =
    `error rate ${readout.error_rate.toExponential(2)}: ` +
    readout.entries
      .map((e) => `δ=${e.delta} → N≈${e.required_comparisons.toLocaleString("en-US")}`)
      .join("  ");
});

document.querySelectorAll('input[name="mode"]').forEach((radio) => {
  radio.addEventListener("change", () => {
    const mode = readState().mode;
    el("row-comparisons").hidden = mode === "plan";
    el("row-error-rate").hidden = mode === "min_error";
    el("row-target-delta").hidden = mode === "uncertainty";
  });
});

for (const name of ["confidence", "target-delta"]) {
  el<HTMLSelectElement>(name).addEventListener("change", () => {
    el(`${name}-custom`).hidden = el<HTMLSelectElement>(name).value !== "custom";
  });
}

refreshCurve();
