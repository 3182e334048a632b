"""Binomial uncertainty machinery for biometric error rates.

Verification errors observed over N independent comparisons follow a
binomial model.  This module computes the exact two-sided acceptance
region [n_low, n_high] of error counts consistent with an observed rate
at a given confidence level, the absolute uncertainty

    delta_abs = (n_high - n_low) / (2 N),

and the relative uncertainty delta_rel = delta_abs / rate, plus the
certainty class assigned to delta_rel.

All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy import special


class DomainError(ValueError):
    """Input outside the documented domain of an operation."""


class CertaintyClass(enum.Enum):
    """Reliability bucket for the relative uncertainty, ordered best to worst."""

    APLUS = 0
    A = 1
    B = 2
    C = 3
    D = 4
    E = 5
    F = 6

    @property
    def code(self) -> str:
        return _CLASS_CODES[self]

    @property
    def label(self) -> str:
        return _CLASS_LABELS[self]

    @property
    def color(self) -> str:
        return _CLASS_COLORS[self]

    @property
    def color_hex(self) -> str:
        return _CLASS_HEX[self]

    def __lt__(self, other: "CertaintyClass") -> bool:
        if not isinstance(other, CertaintyClass):
            return NotImplemented
        return self.value < other.value

    def __le__(self, other: "CertaintyClass") -> bool:
        if not isinstance(other, CertaintyClass):
            return NotImplemented
        return self.value <= other.value


_CLASS_CODES = {
    CertaintyClass.APLUS: "A+",
    CertaintyClass.A: "A",
    CertaintyClass.B: "B",
    CertaintyClass.C: "C",
    CertaintyClass.D: "D",
    CertaintyClass.E: "E",
    CertaintyClass.F: "F",
}

_CLASS_LABELS = {
    CertaintyClass.APLUS: "Optimal",
    CertaintyClass.A: "Excellent",
    CertaintyClass.B: "Very Good",
    CertaintyClass.C: "Good",
    CertaintyClass.D: "Fair",
    CertaintyClass.E: "Poor",
    CertaintyClass.F: "Unacceptable",
}

_CLASS_COLORS = {
    CertaintyClass.APLUS: "green",
    CertaintyClass.A: "blue",
    CertaintyClass.B: "violet",
    CertaintyClass.C: "yellow",
    CertaintyClass.D: "orange",
    CertaintyClass.E: "brown",
    CertaintyClass.F: "red",
}

_CLASS_HEX = {
    CertaintyClass.APLUS: "#4caf50",
    CertaintyClass.A: "#2196f3",
    CertaintyClass.B: "#9575cd",
    CertaintyClass.C: "#fdd835",
    CertaintyClass.D: "#fb8c00",
    CertaintyClass.E: "#8d6e63",
    CertaintyClass.F: "#e53935",
}

# Upper delta_rel thresholds (exclusive) per class, in class order.  A value
# equal to a threshold falls into the next class; 1.0 itself is class F.
CLASS_THRESHOLDS = (0.01, 0.05, 0.10, 0.30, 0.50, 1.00)


@dataclass(frozen=True)
class ErrorObservation:
    """A measured error context.

    comparisons: number of comparisons N (genuine for FNMR, impostor for FMR).
    errors:      observed error count n, optional when only a rate is known.
    rate:        observed error rate; defaults to errors/comparisons.
    alpha:       tail mass; confidence level is 1 - alpha.
    """

    comparisons: int
    errors: int | None = None
    rate: float | None = None
    alpha: float = 0.05

    def __post_init__(self):
        n = self.comparisons
        if not isinstance(n, int) or n < 1:
            raise DomainError(f"comparisons must be a positive integer, got {n!r}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha!r}")
        if self.errors is None and self.rate is None:
            raise DomainError("either errors or rate must be given")
        if self.errors is not None:
            if not isinstance(self.errors, int) or not 0 <= self.errors <= n:
                raise DomainError(
                    f"errors must be an integer in [0, {n}], got {self.errors!r}"
                )
            if self.rate is not None and abs(self.rate - self.errors / n) >= 0.5 / n:
                raise DomainError(
                    f"rate {self.rate!r} inconsistent with errors/comparisons "
                    f"= {self.errors}/{n}"
                )
        if self.rate is not None and not 0.0 <= self.rate <= 1.0:
            raise DomainError(f"rate must be in [0, 1], got {self.rate!r}")

    @property
    def p(self) -> float:
        """Binomial parameter used for the acceptance region."""
        if self.rate is not None:
            return self.rate
        return self.errors / self.comparisons


@dataclass(frozen=True)
class AcceptanceRegion:
    """Count interval [n_low, n_high] with its achieved tail masses."""

    n_low: int
    n_high: int
    tail_low: float   # P(X < n_low)
    tail_high: float  # P(X > n_high)

    @property
    def width(self) -> int:
        return self.n_high - self.n_low


@dataclass(frozen=True)
class UncertaintyResult:
    """Absolute and relative uncertainty of an observed error rate.

    delta_rel is None when the observed rate is 0 (relative uncertainty
    is undefined; the region and delta_abs are still meaningful).
    """

    delta_abs: float
    delta_rel: float | None
    interval_low: float
    interval_high: float
    certainty_class: CertaintyClass

    @property
    def delta_rel_defined(self) -> bool:
        return self.delta_rel is not None


def _check_domain(N: int, n: int, p: float) -> None:
    if N < 0 or n < 0 or n > N:
        raise DomainError(f"need 0 <= n <= N, got n={n}, N={N}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must be in [0, 1], got {p!r}")


def binomial_log_pmf(N: int, n: int, p: float) -> float:
    """Natural log of P(X = n) for X ~ Binomial(N, p).

    Uses log-gamma so it stays finite-precision-safe for N up to 1e12.
    Degenerate p in {0, 1} is handled exactly; impossible counts return
    -inf.
    """
    _check_domain(N, n, p)
    if p == 0.0:
        return 0.0 if n == 0 else -math.inf
    if p == 1.0:
        return 0.0 if n == N else -math.inf
    log_comb = (
        math.lgamma(N + 1) - math.lgamma(n + 1) - math.lgamma(N - n + 1)
    )
    return log_comb + n * math.log(p) + (N - n) * math.log1p(-p)


def binomial_cdf(N: int, n: int, p: float) -> float:
    """P(X <= n) for X ~ Binomial(N, p), absolute error <= 1e-10.

    Evaluated through the regularized incomplete beta identity
    P(X <= n) = I_{1-p}(N - n, n + 1), which costs O(1) regardless of N.
    """
    _check_domain(N, n, p)
    if n >= N:
        return 1.0
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0
    return float(special.betainc(N - n, n + 1, 1.0 - p))


def acceptance_region(obs: ErrorObservation) -> AcceptanceRegion:
    """Exact two-sided acceptance region of error counts for obs.

    n_low is the largest integer with P(X <= n_low - 1) <= alpha/2 (with
    P(X <= -1) = 0, so n_low always exists); n_high is the smallest
    integer with P(X > n_high) <= alpha/2 (P(X > N) = 0, so n_high always
    exists).  Both are located by binary search on the monotone CDF.
    """
    N = obs.comparisons
    p = obs.p
    half = obs.alpha / 2.0

    # Largest n in [0, N] whose lower tail P(X < n) stays within alpha/2.
    lo, hi = 0, N
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if binomial_cdf(N, mid - 1, p) <= half:
            lo = mid
        else:
            hi = mid - 1
    n_low = lo

    # Smallest n in [0, N] whose upper tail P(X > n) stays within alpha/2.
    lo, hi = 0, N
    while lo < hi:
        mid = (lo + hi) // 2
        if 1.0 - binomial_cdf(N, mid, p) <= half:
            hi = mid
        else:
            lo = mid + 1
    n_high = lo

    return AcceptanceRegion(
        n_low=n_low,
        n_high=n_high,
        tail_low=binomial_cdf(N, n_low - 1, p) if n_low > 0 else 0.0,
        tail_high=1.0 - binomial_cdf(N, n_high, p),
    )


def classify(delta_rel: float | None) -> CertaintyClass:
    """Certainty class for a relative uncertainty.

    None (undefined, observed rate 0) maps to class F. A value exactly on
    a threshold belongs to the worse class; delta_rel = 1 is class F.
    """
    if delta_rel is None:
        return CertaintyClass.F
    if math.isnan(delta_rel) or delta_rel < 0.0:
        raise DomainError(f"delta_rel must be >= 0, got {delta_rel!r}")
    for cls, threshold in zip(CertaintyClass, CLASS_THRESHOLDS):
        if delta_rel < threshold:
            return cls
    return CertaintyClass.F


def bioquake(obs: ErrorObservation) -> UncertaintyResult:
    """Uncertainty of the observed error rate in obs.

    delta_abs = (n_high - n_low) / (2N); delta_rel = delta_abs / rate for
    a nonzero rate and None otherwise (callers planning a measurement for
    a zero observed rate should consult planner.min_reportable_error).
    """
    region = acceptance_region(obs)
    N = obs.comparisons
    p = obs.p
    delta_abs = region.width / (2.0 * N)
    delta_rel = delta_abs / p if p > 0.0 else None
    return UncertaintyResult(
        delta_abs=delta_abs,
        delta_rel=delta_rel,
        interval_low=region.n_low / N,
        interval_high=region.n_high / N,
        certainty_class=classify(delta_rel),
    )


def bounds(N: int) -> tuple[float, float, float]:
    """Nominal bounds (delta_abs_max, delta_abs_min, delta_rel_min) at size N.

    These are the stated bounds for nonzero-width regions: 1/2, 1/(2N)
    and 1/(2N).  The exact construction can still produce a zero-width
    region for degenerate rates in {0, 1}.
    """
    if not isinstance(N, int) or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    return 0.5, 0.5 / N, 0.5 / N
