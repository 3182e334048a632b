"""Result builders shared by the command line and the HTTP serve mode.

Both surfaces must return numerically identical objects for identical
parameters, so every command's result dict is produced here.  Validation
failures raise ValidationError carrying the offending field name, which
the HTTP layer turns into a 400 body {"error", "field"}.
"""

from __future__ import annotations

import math

from bioquake import planner
from bioquake.core import (
    CertaintyClass,
    DomainError,
    ErrorObservation,
    bioquake,
    classify,
)

RULE_PRESETS = {0.01: "1% rule", 0.061: "6% rule", 0.1: "10% rule"}


class ValidationError(DomainError):
    """Domain error attributable to a single request field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _check_confidence(confidence: float) -> float:
    if not 0.0 < confidence < 1.0:
        raise ValidationError("confidence", f"must be in (0, 1), got {confidence!r}")
    return 1.0 - confidence


def _check_comparisons(comparisons: int, field: str = "comparisons") -> int:
    if not isinstance(comparisons, int) or isinstance(comparisons, bool):
        raise ValidationError(field, f"must be an integer, got {comparisons!r}")
    if comparisons < 1:
        raise ValidationError(field, f"must be >= 1, got {comparisons!r}")
    return comparisons


def _class_object(cls: CertaintyClass) -> dict:
    return {
        "code": cls.code,
        "label": cls.label,
        "color": cls.color,
        "color_hex": cls.color_hex,
    }


def _delta_rel_object(value: float | None) -> dict:
    if value is None:
        return {"value": None, "display": "inf"}
    return {"value": value, "display": format(value, ".6g")}


def uncertainty_result(
    comparisons: int,
    error_rate: float,
    confidence: float = 0.95,
    errors: int | None = None,
) -> dict:
    alpha = _check_confidence(confidence)
    _check_comparisons(comparisons)
    if not 0.0 <= error_rate <= 1.0:
        raise ValidationError("error_rate", f"must be in [0, 1], got {error_rate!r}")
    try:
        obs = ErrorObservation(
            comparisons, errors=errors, rate=error_rate, alpha=alpha
        )
    except ValidationError:
        raise
    except DomainError as exc:
        raise ValidationError("errors", str(exc)) from exc
    result = bioquake(obs)
    return {
        "delta_abs": result.delta_abs,
        "delta_rel": _delta_rel_object(result.delta_rel),
        "interval_low": result.interval_low,
        "interval_high": result.interval_high,
        "class": _class_object(result.certainty_class),
    }


def plan_result(
    error_rate: float,
    target_delta: float,
    confidence: float = 0.95,
    mode: str = "exact",
    conservative: bool = False,
) -> dict:
    alpha = _check_confidence(confidence)
    if mode not in ("exact", "approx"):
        raise ValidationError("mode", f"must be 'exact' or 'approx', got {mode!r}")
    try:
        req = planner.PlanRequest(error_rate, target_delta, alpha, mode=mode)
    except DomainError as exc:
        field = "error_rate" if "error_rate" in str(exc) else "target_delta"
        raise ValidationError(field, str(exc)) from exc
    if mode == "approx":
        n = planner.required_comparisons_approx(req)
    else:
        n = planner.required_comparisons_exact(req, conservative=conservative)
    rule = next(
        (
            name
            for preset, name in RULE_PRESETS.items()
            if math.isclose(target_delta, preset)
        ),
        None,
    )
    return {
        "required_comparisons": n,
        "mode": mode,
        "conservative": conservative,
        "rule": rule,
    }


def min_error_result(
    comparisons: int, delta: float = 0.061, confidence: float = 0.95
) -> dict:
    alpha = _check_confidence(confidence)
    _check_comparisons(comparisons)
    if delta <= 0.0:
        raise ValidationError("delta", f"must be positive, got {delta!r}")
    value = planner.min_reportable_error(comparisons, delta, alpha)
    return {
        "min_error": value,
        "display": planner.format_min_error(value, "unicode"),
    }


def classify_result(delta: float | None) -> dict:
    try:
        cls = classify(delta)
    except DomainError as exc:
        raise ValidationError("delta", str(exc)) from exc
    return {"class": _class_object(cls)}


def curve_result(
    deltas: tuple[float, ...],
    confidence: float = 0.95,
    lo: float = 1e-4,
    hi: float = 0.5,
    points: int = 50,
    exact: bool = False,
) -> list[dict]:
    alpha = _check_confidence(confidence)
    try:
        spec = planner.CurveSpec(
            delta_list=tuple(deltas),
            alpha=alpha,
            error_range=(lo, hi),
            points=points,
            exact=exact,
        )
    except DomainError as exc:
        message = str(exc)
        field = "deltas" if "delta" in message else (
            "points" if "points" in message else "error_range"
        )
        raise ValidationError(field, message) from exc
    return [
        {
            "error_rate": row.error_rate,
            "delta": row.delta,
            "confidence": row.confidence,
            "required_comparisons": row.required_comparisons,
        }
        for row in planner.curve(spec)
    ]
