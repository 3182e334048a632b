"""Sample-size planning: how many comparisons buy how much certainty.

Inverts the uncertainty computation: given a target relative uncertainty
and an expected error rate, how many comparisons are required?  Provides
both the normal-approximation closed form (which reproduces the familiar
rule-of-thumb constants) and exact inversion of the binomial region, plus
the minimum error rate reportable from a fixed number of comparisons and
grid data for uncertainty/sample-size curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal

import numpy as np
from scipy import special

from bioquake.core import DomainError, ErrorObservation, bioquake, bounds

SEARCH_CEILING = 10**12

# The 6% rule is stated with the round 1e3 numerator rather than the raw
# z^2/delta^2 value (~1032); reproducing published minimum-error columns
# requires using it verbatim for that canonical case.
_CANONICAL_RULE = (0.061, 0.05, 1.0e3)


class InfeasiblePlanError(DomainError):
    """No comparison count up to the search ceiling meets the target."""


@dataclass(frozen=True)
class PlanRequest:
    """Target for a planning computation."""

    error_rate: float
    target_delta: float
    alpha: float = 0.05
    mode: str = "exact"

    def __post_init__(self):
        if not 0.0 < self.error_rate < 1.0:
            raise DomainError(
                f"error_rate must be in (0, 1), got {self.error_rate!r}"
            )
        if not self.target_delta > 0.0:
            raise DomainError(
                f"target_delta must be positive, got {self.target_delta!r}"
            )
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha!r}")
        if self.mode not in ("exact", "approx"):
            raise DomainError(f"mode must be 'exact' or 'approx', got {self.mode!r}")


@dataclass(frozen=True)
class CurveSpec:
    """Grid request behind the error-rate vs required-comparisons curves."""

    delta_list: tuple[float, ...]
    alpha: float = 0.05
    error_range: tuple[float, float] = (1e-4, 0.5)
    points: int = 50
    exact: bool = False

    def __post_init__(self):
        if not self.delta_list or any(d <= 0.0 for d in self.delta_list):
            raise DomainError("delta_list must be non-empty with positive values")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha!r}")
        lo, hi = self.error_range
        if not 0.0 < lo < hi <= 0.5:
            raise DomainError(
                f"error_range must satisfy 0 < low < high <= 0.5, got {self.error_range!r}"
            )
        if self.points < 2:
            raise DomainError(f"points must be >= 2, got {self.points!r}")


@dataclass(frozen=True)
class CurvePoint:
    error_rate: float
    delta: float
    confidence: float
    required_comparisons: int


def normal_quantile(q: float) -> float:
    """Two-sided-friendly inverse standard normal CDF."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"quantile argument must be in (0, 1), got {q!r}")
    return float(special.ndtri(q))


def rule_constant(delta: float, alpha: float = 0.05) -> float:
    """z^2 / delta^2: the small-error-rate limit of required comparisons x ER.

    At alpha=0.05 this regenerates the rule-of-thumb numerators
    (~3.84e4 for delta=0.01, ~1.03e3 for 0.061, ~3.84e2 for 0.1).
    """
    if delta <= 0.0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha!r}")
    z = normal_quantile(1.0 - alpha / 2.0)
    return z * z / (delta * delta)


def required_comparisons_approx(req: PlanRequest) -> int:
    """Normal-approximation minimum comparisons: ceil(z^2 (1-ER) / (ER delta^2))."""
    if req.mode != "approx":
        raise DomainError(f"request mode must be 'approx', got {req.mode!r}")
    er = req.error_rate
    c = rule_constant(req.target_delta, req.alpha)
    return math.ceil(c * (1.0 - er) / er)


def _delta_rel_at(N: int, error_rate: float, alpha: float) -> float:
    result = bioquake(
        ErrorObservation(comparisons=N, rate=error_rate, alpha=alpha)
    )
    return result.delta_rel


def required_comparisons_exact(req: PlanRequest, conservative: bool = False) -> int:
    """Smallest N whose exact-region relative uncertainty meets the target.

    Integer effects make delta(N) a fine-scale sawtooth, so the default
    result means "smallest N found with delta(N) <= target and
    delta(N-1) > target", not that every larger N also satisfies the
    target.  With conservative=True the search instead returns the
    smallest N such that all sampled N' in [N, 4N] satisfy the target,
    which is the stable answer for planning data collection.
    """
    if req.mode != "exact":
        raise DomainError(f"request mode must be 'exact', got {req.mode!r}")
    target = req.target_delta
    if target < bounds(SEARCH_CEILING)[2]:
        raise InfeasiblePlanError(
            f"target delta {target!r} is below the smallest uncertainty "
            f"measurable with N <= {SEARCH_CEILING}"
        )

    approx = required_comparisons_approx(
        PlanRequest(req.error_rate, target, req.alpha, mode="approx")
    )
    hi = max(1, min(approx, SEARCH_CEILING))
    while _delta_rel_at(hi, req.error_rate, req.alpha) > target:
        if hi >= SEARCH_CEILING:
            raise InfeasiblePlanError(
                f"no N <= {SEARCH_CEILING} reaches delta <= {target!r} "
                f"at error rate {req.error_rate!r}"
            )
        hi = min(hi * 2, SEARCH_CEILING)

    lo = 0  # sentinel: delta is undefined at N=0, treated as failing
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _delta_rel_at(mid, req.error_rate, req.alpha) <= target:
            hi = mid
        else:
            lo = mid
    n = hi

    if conservative:
        n = _stabilize(n, req.error_rate, target, req.alpha)
    return n


def _stabilize(n: int, error_rate: float, target: float, alpha: float) -> int:
    """Advance n until every sampled N' in [n, 4n] meets the target."""
    while True:
        grid = np.unique(
            np.geomspace(n, 4 * n, num=129).astype(np.int64)
        )
        failing = [
            int(g) for g in grid if _delta_rel_at(int(g), error_rate, alpha) > target
        ]
        if not failing:
            return n
        n = max(failing) + 1
        if n > SEARCH_CEILING:
            raise InfeasiblePlanError(
                f"no stable N <= {SEARCH_CEILING} for delta <= {target!r}"
            )


def min_reportable_error(
    comparisons: int, delta: float = 0.061, alpha: float = 0.05
) -> float:
    """Smallest error rate reportable at the target delta, capped at 1.0.

    The canonical 6% rule (delta=0.061, alpha=0.05) uses the round 1e3
    numerator; any other (delta, alpha) uses rule_constant.
    """
    if not isinstance(comparisons, int) or comparisons < 1:
        raise DomainError(
            f"comparisons must be a positive integer, got {comparisons!r}"
        )
    c_delta, c_alpha, c_value = _CANONICAL_RULE
    if math.isclose(delta, c_delta) and math.isclose(alpha, c_alpha):
        constant = c_value
    else:
        constant = rule_constant(delta, alpha)
    return min(1.0, constant / comparisons)


_SUPERSCRIPTS = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


def format_min_error(value: float, style: str = "ascii") -> str:
    """One-significant-figure rendering of a minimum reportable error.

    Rounds half to even; values that reach 1.0 render as the cap
    (">=1" in ascii style, the >= sign in unicode style).
    """
    if style not in ("ascii", "unicode"):
        raise DomainError(f"unknown style {style!r}")
    if value >= 1.0:
        return ">=1" if style == "ascii" else "≥1"
    if value <= 0.0:
        raise DomainError(f"value must be positive, got {value!r}")
    d = Decimal(repr(value))
    exponent = d.adjusted()
    mantissa = int(d.scaleb(-exponent).quantize(Decimal(1), rounding=ROUND_HALF_EVEN))
    if mantissa == 10:
        mantissa = 1
        exponent += 1
    if style == "ascii":
        return f"{mantissa}e{exponent}"
    return f"{mantissa}×10{str(exponent).translate(_SUPERSCRIPTS)}"


def curve(spec: CurveSpec) -> list[CurvePoint]:
    """Required-comparisons grid, ordered by (delta, error rate).

    Error rates are log-spaced across spec.error_range.  Rows are emitted
    in a fixed order regardless of how grid points are evaluated.
    """
    lo, hi = spec.error_range
    rates = np.geomspace(lo, hi, num=spec.points)
    confidence = 1.0 - spec.alpha
    rows = []
    for delta in spec.delta_list:
        for er in rates:
            req = PlanRequest(
                float(er), delta, spec.alpha,
                mode="exact" if spec.exact else "approx",
            )
            n = (
                required_comparisons_exact(req)
                if spec.exact
                else required_comparisons_approx(req)
            )
            rows.append(CurvePoint(float(er), delta, confidence, n))
    return rows


def _decimal_sig(x: float, digits: int = 6) -> str:
    """Plain decimal notation with a fixed number of significant digits."""
    d = Decimal(repr(x))
    if d == 0:
        return "0." + "0" * (digits - 1)
    quantum = Decimal(1).scaleb(d.adjusted() - digits + 1)
    return format(d.quantize(quantum, rounding=ROUND_HALF_EVEN), "f")


def curve_to_csv(rows: list[CurvePoint]) -> str:
    """CSV rendering: header plus one row per grid point."""
    lines = ["error_rate,delta,confidence,required_comparisons"]
    for r in rows:
        lines.append(
            f"{_decimal_sig(r.error_rate)},{_decimal_sig(r.delta)},"
            f"{_decimal_sig(r.confidence)},{r.required_comparisons}"
        )
    return "\n".join(lines) + "\n"
