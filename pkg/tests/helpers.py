"""Shared brute-force oracles, independent of the library's own code paths.

Everything here works by direct pmf summation (log-gamma term by term,
cumulative sums over the full support), so it is only usable for modest N
but makes no use of the incomplete-beta identity or binary search that
the package relies on.
"""

import numpy as np
from scipy import special


def pmf_vector(N: int, p: float) -> np.ndarray:
    """All N+1 binomial probabilities by direct evaluation."""
    if p == 0.0:
        out = np.zeros(N + 1)
        out[0] = 1.0
        return out
    if p == 1.0:
        out = np.zeros(N + 1)
        out[-1] = 1.0
        return out
    ks = np.arange(N + 1, dtype=float)
    logs = (
        special.gammaln(N + 1)
        - special.gammaln(ks + 1)
        - special.gammaln(N - ks + 1)
        + ks * np.log(p)
        + (N - ks) * np.log1p(-p)
    )
    return np.exp(logs)


def cdf_by_summation(N: int, n: int, p: float) -> float:
    """P(X <= n) by summing the first n+1 pmf terms."""
    if n < 0:
        return 0.0
    if n >= N:
        return 1.0
    return float(pmf_vector(N, p)[: n + 1].sum())


def region_by_scan(N: int, p: float, alpha: float) -> tuple[int, int]:
    """Acceptance region by linear scan over all cumulative sums."""
    cum = np.cumsum(pmf_vector(N, p))
    half = alpha / 2.0
    n_low = 0
    for n in range(N, -1, -1):
        below = cum[n - 1] if n >= 1 else 0.0
        if below <= half:
            n_low = n
            break
    n_high = N
    for n in range(0, N + 1):
        if 1.0 - cum[n] <= half:
            n_high = n
            break
    return n_low, n_high


def delta_rel_by_scan(N: int, p: float, alpha: float) -> float | None:
    n_low, n_high = region_by_scan(N, p, alpha)
    if p == 0.0:
        return None
    return (n_high - n_low) / (2.0 * N) / p
