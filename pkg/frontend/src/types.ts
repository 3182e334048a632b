// Shapes of the versioned JSON API (schema_version 1).

export interface ClassInfo {
  code: string;
  label: string;
  color: string;
  color_hex: string;
}

export interface DeltaRel {
  value: number | null;
  display: string;
}

export interface UncertaintyResponse {
  delta_abs: number;
  delta_rel: DeltaRel;
  interval_low: number;
  interval_high: number;
  class: ClassInfo;
}

export interface PlanResponse {
  required_comparisons: number;
  mode: string;
  conservative: boolean;
  rule: string | null;
}

export interface MinErrorResponse {
  min_error: number;
  display: string;
}

export interface CurveRow {
  error_rate: number;
  delta: number;
  confidence: number;
  required_comparisons: number;
}

export interface ApiErrorBody {
  error: string;
  field: string | null;
}
