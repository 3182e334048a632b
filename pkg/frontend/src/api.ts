// Typed client for the calculator endpoints.  One in-flight request per
// panel: firing a new request aborts the previous one (latest wins), so a
// slow response can never overwrite a newer result.

import type {
  ApiErrorBody,
  CurveRow,
  MinErrorResponse,
  PlanResponse,
  UncertaintyResponse,
} from "./types.js";

export type FailureKind = "validation" | "network" | "server";

export class ApiFailure extends Error {
  kind: FailureKind;
  field: string | null;

  constructor(kind: FailureKind, message: string, field: string | null = null) {
    super(message);
    this.kind = kind;
    this.field = field;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private inFlight = new Map<string, AbortController>();

  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(panel: string, path: string, init: RequestInit): Promise<T> {
    this.inFlight.get(panel)?.abort();
    const controller = new AbortController();
    this.inFlight.set(panel, controller);
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, {
        ...init,
        signal: controller.signal,
      });
    } catch (err) {
      if (controller.signal.aborted) throw new ApiFailure("network", "superseded");
      throw new ApiFailure("network", `request failed: ${String(err)}`);
    }
    if (response.status === 400) {
      const body = (await response.json()) as ApiErrorBody;
      throw new ApiFailure("validation", body.error, body.field);
    }
    if (!response.ok) {
      throw new ApiFailure("server", `unexpected status ${response.status}`);
    }
    return (await response.json()) as T;
  }

  private post<T>(panel: string, path: string, payload: unknown): Promise<T> {
    return this.request<T>(panel, path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  uncertainty(params: {
    comparisons: number;
    error_rate: number;
    confidence: number;
  }): Promise<UncertaintyResponse> {
    return this.post("calc", "/api/uncertainty", params);
  }

  plan(params: {
    error_rate: number;
    target_delta: number;
    confidence: number;
    mode?: string;
  }): Promise<PlanResponse> {
    return this.post("calc", "/api/plan", { mode: "exact", ...params });
  }

  minError(params: {
    comparisons: number;
    delta: number;
    confidence: number;
  }): Promise<MinErrorResponse> {
    return this.post("calc", "/api/min-error", params);
  }

  curve(params: {
    deltas: number[];
    confidence: number;
    lo?: number;
    hi?: number;
    points?: number;
  }): Promise<CurveRow[]> {
    const query = new URLSearchParams({
      deltas: params.deltas.join(","),
      confidence: String(params.confidence),
      lo: String(params.lo ?? 1e-4),
      hi: String(params.hi ?? 0.5),
      points: String(params.points ?? 40),
    });
    return this.request<CurveRow[]>("curve", `/api/curve?${query}`, { method: "GET" });
  }
}
