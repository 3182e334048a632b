"""Empirical validation harness for the uncertainty theory.

Works on labeled comparison-score populations (loaded from files or
synthesized from a per-subject Gaussian model), measures FMR/FNMR at a
fixed operating point, estimates empirical uncertainty by repeated
fractional subsampling of the comparisons, and checks frequentist
coverage of the theoretical interval by Monte Carlo simulation.

All randomness flows through explicitly seeded PCG64 generators with one
spawned sub-stream per repetition, so runs are reproducible across
platforms and repetitions could execute concurrently; results are always
aggregated in repetition order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bioquake.core import DomainError, ErrorObservation, bioquake
from bioquake.planner import normal_quantile


@dataclass
class ScoreSet:
    """Labeled genuine/impostor comparison scores."""

    genuine: np.ndarray
    impostor: np.ndarray
    higher_is_genuine: bool = True

    def __post_init__(self):
        self.genuine = np.asarray(self.genuine, dtype=float)
        self.impostor = np.asarray(self.impostor, dtype=float)
        if self.genuine.size == 0 or self.impostor.size == 0:
            raise DomainError("genuine and impostor score lists must be non-empty")
        if not np.isfinite(self.genuine).all() or not np.isfinite(self.impostor).all():
            raise DomainError("scores must be finite")


@dataclass(frozen=True)
class SynthConfig:
    """Per-subject Gaussian score model.

    Every genuine pair of a subject draws from
    Normal(genuine_mean + subject offset, genuine_std); an impostor pair
    of two subjects draws from Normal(impostor_mean + mean of their
    offsets, impostor_std).  Offsets are Normal(0, subject_effect_std),
    so 0 gives iid pairs and anything larger violates iid on purpose.
    """

    subjects: int
    samples_per_subject: int | tuple[int, ...]
    genuine_mean: float = 1.0
    genuine_std: float = 0.15
    impostor_mean: float = 0.0
    impostor_std: float = 0.15
    subject_effect_std: float = 0.0
    seed: int = 0
    pair_cap: int = 2_000_000
    sample_pairs: bool = False

    def __post_init__(self):
        if self.subjects < 1:
            raise DomainError(f"subjects must be >= 1, got {self.subjects!r}")
        if self.genuine_std <= 0 or self.impostor_std <= 0:
            raise DomainError("score standard deviations must be positive")
        if self.genuine_mean <= self.impostor_mean:
            raise DomainError(
                "genuine_mean must exceed impostor_mean (higher score = genuine)"
            )
        if self.subject_effect_std < 0:
            raise DomainError("subject_effect_std must be >= 0")
        if self.pair_cap < 1:
            raise DomainError("pair_cap must be >= 1")
        counts = self.sample_counts()
        if len(counts) != self.subjects or any(m < 1 for m in counts):
            raise DomainError("need a positive sample count for every subject")

    def sample_counts(self) -> tuple[int, ...]:
        if isinstance(self.samples_per_subject, int):
            return (self.samples_per_subject,) * self.subjects
        return tuple(self.samples_per_subject)


@dataclass(frozen=True)
class SubsampleResult:
    """Empirical vs theoretical uncertainty for one metric at one fraction."""

    metric: str
    frac: float
    repetitions: int
    values: tuple[float, ...]
    mean_rate: float
    empirical_margin: float
    theoretical_margin: float


def _read_score_file(path) -> np.ndarray:
    values = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise DomainError(
                    f"{path}: line {lineno}: not a number: {text!r}"
                ) from None
    if not values:
        raise DomainError(f"{path}: no scores found")
    return np.array(values, dtype=float)


def load_scores(genuine_path, impostor_path) -> ScoreSet:
    """Read newline-delimited decimal scores; # starts a comment line."""
    return ScoreSet(
        genuine=_read_score_file(genuine_path),
        impostor=_read_score_file(impostor_path),
    )


def synthesize_scores(cfg: SynthConfig) -> ScoreSet:
    """Draw a synthetic score population from the per-subject model.

    All within-subject genuine pairs and cross-subject impostor pairs are
    enumerated up to cfg.pair_cap per side; beyond the cap, pairs are
    randomly sampled instead when cfg.sample_pairs is set, otherwise the
    configuration is rejected.  Deterministic for a fixed seed.
    """
    counts = np.array(cfg.sample_counts(), dtype=np.int64)
    genuine_per_subject = counts * (counts - 1) // 2
    genuine_total = int(genuine_per_subject.sum())
    total_samples = int(counts.sum())
    impostor_total = (
        total_samples * (total_samples - 1) // 2 - int(genuine_total)
    )
    if genuine_total == 0:
        raise DomainError("configuration yields no genuine pairs")
    if impostor_total == 0:
        raise DomainError("configuration yields no impostor pairs")
    for side, total in (("genuine", genuine_total), ("impostor", impostor_total)):
        if total > cfg.pair_cap and not cfg.sample_pairs:
            raise DomainError(
                f"{side} pairs ({total}) exceed pair_cap ({cfg.pair_cap}); "
                f"enable sample_pairs to subsample"
            )

    seq = np.random.SeedSequence(cfg.seed)
    rng_offsets, rng_genuine, rng_impostor = (
        np.random.Generator(np.random.PCG64(child)) for child in seq.spawn(3)
    )
    offsets = rng_offsets.normal(0.0, cfg.subject_effect_std, size=cfg.subjects)

    if genuine_total > cfg.pair_cap:
        weights = genuine_per_subject / genuine_total
        subj = rng_genuine.choice(cfg.subjects, size=cfg.pair_cap, p=weights)
    else:
        subj = np.repeat(np.arange(cfg.subjects), genuine_per_subject)
    genuine = rng_genuine.normal(cfg.genuine_mean + offsets[subj], cfg.genuine_std)

    if impostor_total > cfg.pair_cap:
        marginal = counts / total_samples
        first = rng_impostor.choice(cfg.subjects, size=cfg.pair_cap, p=marginal)
        second = rng_impostor.choice(cfg.subjects, size=cfg.pair_cap, p=marginal)
        clash = first == second
        while clash.any():
            second[clash] = rng_impostor.choice(
                cfg.subjects, size=int(clash.sum()), p=marginal
            )
            clash = first == second
        pair_offset = (offsets[first] + offsets[second]) / 2.0
    else:
        means = []
        sizes = []
        for i in range(cfg.subjects):
            for j in range(i + 1, cfg.subjects):
                sizes.append(int(counts[i]) * int(counts[j]))
                means.append((offsets[i] + offsets[j]) / 2.0)
        pair_offset = np.repeat(np.array(means), np.array(sizes, dtype=np.int64))
    impostor = rng_impostor.normal(
        cfg.impostor_mean + pair_offset, cfg.impostor_std
    )
    return ScoreSet(genuine=genuine, impostor=impostor)


def error_rates(scores: ScoreSet, threshold: float) -> tuple[float, float]:
    """(fmr, fnmr) at a threshold; a score exactly at threshold is a match."""
    if scores.higher_is_genuine:
        fmr = float(np.count_nonzero(scores.impostor >= threshold)) / scores.impostor.size
        fnmr = float(np.count_nonzero(scores.genuine < threshold)) / scores.genuine.size
    else:
        fmr = float(np.count_nonzero(scores.impostor <= threshold)) / scores.impostor.size
        fnmr = float(np.count_nonzero(scores.genuine > threshold)) / scores.genuine.size
    return fmr, fnmr


def _candidate_thresholds(scores: ScoreSet) -> np.ndarray:
    merged = np.unique(np.concatenate([scores.genuine, scores.impostor]))
    if merged.size < 2:
        return merged
    return (merged[:-1] + merged[1:]) / 2.0


def _rates_at(scores: ScoreSet, thresholds: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sign = 1.0 if scores.higher_is_genuine else -1.0
    imp = np.sort(sign * scores.impostor)
    gen = np.sort(sign * scores.genuine)
    t = sign * thresholds
    fmr = (imp.size - np.searchsorted(imp, t, side="left")) / imp.size
    fnmr = np.searchsorted(gen, t, side="left") / gen.size
    return fmr, fnmr


def eer_threshold(scores: ScoreSet) -> tuple[float, float]:
    """Operating point where FMR and FNMR cross.

    Candidates are the midpoints between adjacent distinct score values;
    ties in |FMR - FNMR| break toward the lower threshold.  Returns the
    threshold and (fmr + fnmr) / 2 there.
    """
    thresholds = _candidate_thresholds(scores)
    fmr, fnmr = _rates_at(scores, thresholds)
    idx = int(np.argmin(np.abs(fmr - fnmr)))
    return float(thresholds[idx]), float((fmr[idx] + fnmr[idx]) / 2.0)


def threshold_at_fmr(scores: ScoreSet, target_fmr: float) -> float:
    """Least restrictive candidate threshold whose FMR stays within the target."""
    if not 0.0 <= target_fmr <= 1.0:
        raise DomainError(f"target_fmr must be in [0, 1], got {target_fmr!r}")
    thresholds = _candidate_thresholds(scores)
    # one candidate past the extremes guarantees FMR 0 is reachable
    step = 1.0
    beyond = (
        thresholds[-1] + step if scores.higher_is_genuine else thresholds[0] - step
    )
    thresholds = np.sort(np.append(thresholds, beyond))
    fmr, _ = _rates_at(scores, thresholds)
    feasible = np.nonzero(fmr <= target_fmr)[0]
    idx = feasible[0] if scores.higher_is_genuine else feasible[-1]
    return float(thresholds[idx])


def subsample_experiment(
    scores: ScoreSet,
    threshold: float,
    fracs: tuple[float, ...] = (0.1, 0.01, 0.001),
    reps: int = 10,
    alpha: float = 0.05,
    seed: int = 0,
    sem: bool = False,
) -> list[SubsampleResult]:
    """Uncertainty from repeated without-replacement subsampling of pairs.

    For every fraction, draws `reps` independent subsamples of both
    comparison lists (pairs, not subjects), measures FMR/FNMR at the
    fixed threshold, and reports the spread of those measurements
    (std of the repetition values times the normal quantile; with
    sem=True an additional 1/sqrt(reps) is applied) next to the
    theoretical margin at the subsample size and mean observed rate.
    Results are ordered by fraction, FMR before FNMR.
    """
    if reps < 2:
        raise DomainError(f"reps must be >= 2, got {reps!r}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha!r}")
    sizes = {}
    for frac in fracs:
        if not 0.0 < frac <= 1.0:
            raise DomainError(f"frac must be in (0, 1], got {frac!r}")
        n_imp = int(math.floor(frac * scores.impostor.size + 1e-9))
        n_gen = int(math.floor(frac * scores.genuine.size + 1e-9))
        if min(n_imp, n_gen) < 10:
            raise DomainError(
                f"frac {frac!r} yields a subsample below 10 comparisons "
                f"(impostor {n_imp}, genuine {n_gen})"
            )
        sizes[frac] = (n_imp, n_gen)

    z = normal_quantile(1.0 - alpha / 2.0)
    streams = np.random.SeedSequence(seed).spawn(len(fracs) * reps)
    results = []
    for fi, frac in enumerate(fracs):
        n_imp, n_gen = sizes[frac]
        fmr_values = np.empty(reps)
        fnmr_values = np.empty(reps)
        for rep in range(reps):
            rng = np.random.Generator(np.random.PCG64(streams[fi * reps + rep]))
            imp_idx = rng.choice(scores.impostor.size, size=n_imp, replace=False)
            gen_idx = rng.choice(scores.genuine.size, size=n_gen, replace=False)
            sub = ScoreSet(
                genuine=scores.genuine[gen_idx],
                impostor=scores.impostor[imp_idx],
                higher_is_genuine=scores.higher_is_genuine,
            )
            fmr_values[rep], fnmr_values[rep] = error_rates(sub, threshold)
        for metric, values, size in (
            ("fmr", fmr_values, n_imp),
            ("fnmr", fnmr_values, n_gen),
        ):
            spread = float(np.std(values, ddof=1))
            empirical = spread * z
            if sem:
                empirical /= math.sqrt(reps)
            mean_rate = float(values.mean())
            theoretical = bioquake(
                ErrorObservation(size, rate=mean_rate, alpha=alpha)
            ).delta_abs
            results.append(
                SubsampleResult(
                    metric=metric,
                    frac=frac,
                    repetitions=reps,
                    values=tuple(float(v) for v in values),
                    mean_rate=mean_rate,
                    empirical_margin=empirical,
                    theoretical_margin=theoretical,
                )
            )
    return results


def correlation(pairs) -> float:
    """Pearson correlation of (empirical, theoretical) margin pairs."""
    pairs = list(pairs)
    if len(pairs) < 3:
        raise DomainError(f"need at least 3 pairs, got {len(pairs)}")
    x = np.array([p[0] for p in pairs], dtype=float)
    y = np.array([p[1] for p in pairs], dtype=float)
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise DomainError("correlation undefined: zero variance in a coordinate")
    return float(np.corrcoef(x, y)[0, 1])


def coverage_experiment(
    comparisons: int,
    p_true: float,
    alpha: float = 0.05,
    trials: int = 10_000,
    seed: int = 0,
    interval: str = "symmetric",
) -> float:
    """Fraction of simulated experiments whose interval contains p_true.

    Each trial draws an error count from Binomial(comparisons, p_true)
    and asks whether p_true lies in the uncertainty interval at the
    observed rate p_hat = n/N.  interval="symmetric" uses
    [p_hat - delta, p_hat + delta] (which leans on the centering
    assumption and undercovers slightly when comparisons * p_true is
    small); interval="region" uses the acceptance-region endpoints
    [n_low/N, n_high/N] directly.  At least 1e3 trials (and
    comparisons * p_true >= 5) are sensible.
    """
    if not 0.0 < p_true < 1.0:
        raise DomainError(f"p_true must be strictly inside (0, 1), got {p_true!r}")
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials!r}")
    if interval not in ("symmetric", "region"):
        raise DomainError(f"interval must be 'symmetric' or 'region', got {interval!r}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    draws = rng.binomial(comparisons, p_true, size=trials)
    observed, multiplicity = np.unique(draws, return_counts=True)
    covered = 0
    for n, weight in zip(observed, multiplicity):
        result = bioquake(
            ErrorObservation(comparisons, errors=int(n), alpha=alpha)
        )
        p_hat = int(n) / comparisons
        if interval == "symmetric":
            inside = abs(p_hat - p_true) <= result.delta_abs
        else:
            inside = result.interval_low <= p_true <= result.interval_high
        if inside:
            covered += int(weight)
    return covered / trials
