"""bioquake command line: error-rate reliability from the shell.

Every subcommand prints a human-readable summary by default; --json emits
a single versioned envelope {schema_version, command, inputs, result,
warnings} with numbers at full precision.  Exit codes: 0 success, 1
domain/validation error, 2 usage error.  BIOQUAKE_LOG={error,warn,info,
debug} routes diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from bioquake import __version__, api, audit, empirical, planner
from bioquake.core import DomainError

log = logging.getLogger("bioquake")

SCHEMA_VERSION = "1"

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def _configure_logging():
    level = os.environ.get("BIOQUAKE_LOG", "warn").lower()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(_LOG_LEVELS.get(level, logging.WARNING))


def _envelope(command: str, inputs: dict, result, warnings: list[str]) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "result": result,
        "warnings": warnings,
    }
    return json.dumps(doc, sort_keys=True)


def _emit(args, command, inputs, result, warnings, human: str) -> int:
    if getattr(args, "json", False):
        print(_envelope(command, inputs, result, warnings))
    else:
        print(human.rstrip("\n"))
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
    return 0


def _comma_floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}")


def _comma_ints(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")


def _range_pair(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI numbers, got {text!r}")


def cmd_calc(args) -> int:
    result = api.uncertainty_result(
        args.comparisons, args.error_rate, args.confidence, errors=args.errors
    )
    warnings = []
    if result["delta_rel"]["value"] is None:
        warnings.append(
            "relative uncertainty is undefined for a zero observed rate; "
            "use `bioquake min-error` for the smallest reportable error"
        )
    inputs = {
        "comparisons": args.comparisons,
        "error_rate": args.error_rate,
        "errors": args.errors,
        "confidence": args.confidence,
    }
    cls = result["class"]
    human = (
        f"delta_abs   {result['delta_abs']:.6g}\n"
        f"delta_rel   {result['delta_rel']['display']}\n"
        f"interval    [{result['interval_low']:.6g}, {result['interval_high']:.6g}]\n"
        f"class       {cls['code']} ({cls['label']})"
    )
    return _emit(args, "calc", inputs, result, warnings, human)


def cmd_plan(args) -> int:
    mode = "approx" if args.approx else "exact"
    result = api.plan_result(
        args.error_rate, args.delta, args.confidence, mode, args.conservative
    )
    inputs = {
        "error_rate": args.error_rate,
        "target_delta": args.delta,
        "confidence": args.confidence,
        "mode": mode,
        "conservative": args.conservative,
    }
    rule = f" ({result['rule']})" if result["rule"] else ""
    human = f"required comparisons: {result['required_comparisons']}{rule} [{mode}]"
    return _emit(args, "plan", inputs, result, [], human)


def cmd_min_error(args) -> int:
    result = api.min_error_result(args.comparisons, args.delta, args.confidence)
    inputs = {
        "comparisons": args.comparisons,
        "delta": args.delta,
        "confidence": args.confidence,
    }
    human = f"minimum reportable error: {result['min_error']:.6g} ({result['display']})"
    return _emit(args, "min-error", inputs, result, [], human)


def cmd_classify(args) -> int:
    result = api.classify_result(args.delta)
    cls = result["class"]
    human = f"{cls['code']} ({cls['label']})"
    return _emit(args, "classify", inputs={"delta": args.delta}, result=result,
                 warnings=[], human=human)


def cmd_curve(args) -> int:
    lo, hi = args.error_range
    rows = api.curve_result(
        tuple(args.deltas), args.confidence, lo, hi, args.points, args.exact
    )
    points = [
        planner.CurvePoint(
            r["error_rate"], r["delta"], r["confidence"], r["required_comparisons"]
        )
        for r in rows
    ]
    text = planner.curve_to_csv(points)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
        log.info("wrote %d curve rows to %s", len(rows), args.output)
    return 0


def cmd_audit(args) -> int:
    with open(args.input, "rb") as handle:
        data = handle.read()
    input_format = "json" if args.input.endswith(".json") else "csv"
    records = audit.parse_dataset_table(data, input_format)
    results = [
        audit.audit_record(rec, alpha=1.0 - args.confidence, rule_delta=args.rule_delta)
        for rec in records
    ]
    sys.stdout.write(audit.render_report(results, args.format))
    return 0


def _pick_threshold(args, scores) -> tuple[float, str, list[str]]:
    warnings = []
    if args.threshold is not None:
        return args.threshold, "fixed", warnings
    if args.at_fmr is not None:
        return empirical.threshold_at_fmr(scores, args.at_fmr), "at-fmr", warnings
    threshold, eer = empirical.eer_threshold(scores)
    log.info("EER threshold %.6g (eer %.6g)", threshold, eer)
    return threshold, "eer", warnings


def _correlation_or_none(pairs, warnings, label):
    try:
        return empirical.correlation(pairs)
    except DomainError as exc:
        warnings.append(f"correlation ({label}) unavailable: {exc}")
        return None


def cmd_validate(args) -> int:
    scores = empirical.load_scores(args.genuine, args.impostor)
    threshold, mode, warnings = _pick_threshold(args, scores)
    results = empirical.subsample_experiment(
        scores,
        threshold,
        fracs=tuple(args.fracs),
        reps=args.reps,
        alpha=1.0 - args.confidence,
        seed=args.seed,
        sem=args.sem,
    )
    rows = [
        {
            "frac": r.frac,
            "metric": r.metric,
            "mean_rate": r.mean_rate,
            "empirical_margin": r.empirical_margin,
            "theoretical_margin": r.theoretical_margin,
            "repetitions": list(r.values),
        }
        for r in results
    ]
    pairs = {
        "fmr": [(r.empirical_margin, r.theoretical_margin) for r in results if r.metric == "fmr"],
        "fnmr": [(r.empirical_margin, r.theoretical_margin) for r in results if r.metric == "fnmr"],
    }
    pairs["pooled"] = pairs["fmr"] + pairs["fnmr"]
    corr = {
        label: _correlation_or_none(p, warnings, label) for label, p in pairs.items()
    }
    result = {
        "threshold": threshold,
        "threshold_mode": mode,
        "results": rows,
        "correlation": corr,
    }
    inputs = {
        "genuine": args.genuine,
        "impostor": args.impostor,
        "threshold_mode": mode,
        "fracs": list(args.fracs),
        "reps": args.reps,
        "confidence": args.confidence,
        "seed": args.seed,
        "sem": args.sem,
    }
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write(
                "frac,metric,repetition,value,mean_rate,empirical_margin,theoretical_margin\n"
            )
            for r in results:
                for i, v in enumerate(r.values):
                    handle.write(
                        f"{r.frac!r},{r.metric},{i},{v!r},{r.mean_rate!r},"
                        f"{r.empirical_margin!r},{r.theoretical_margin!r}\n"
                    )
    lines = [f"threshold: {threshold:.6g} ({mode})"]
    lines.append("frac      metric  mean_rate    empirical    theoretical")
    for r in results:
        lines.append(
            f"{r.frac:<9g} {r.metric:<7} {r.mean_rate:<12.6g} "
            f"{r.empirical_margin:<12.6g} {r.theoretical_margin:<12.6g}"
        )
    for label in ("fmr", "fnmr", "pooled"):
        value = corr[label]
        lines.append(
            f"pearson {label}: " + (f"{value:.4f}" if value is not None else "n/a")
        )
    return _emit(args, "validate", inputs, result, warnings, "\n".join(lines))


def cmd_simulate(args) -> int:
    samples = args.samples[0] if len(args.samples) == 1 else tuple(args.samples)
    cfg = empirical.SynthConfig(
        subjects=args.subjects,
        samples_per_subject=samples,
        genuine_mean=args.genuine_mean,
        genuine_std=args.genuine_std,
        impostor_mean=args.impostor_mean,
        impostor_std=args.impostor_std,
        subject_effect_std=args.subject_effect_std,
        seed=args.seed,
        pair_cap=args.pair_cap,
        sample_pairs=args.sample_pairs,
    )
    scores = empirical.synthesize_scores(cfg)
    for path, values in (
        (args.out_genuine, scores.genuine),
        (args.out_impostor, scores.impostor),
    ):
        with open(path, "w", encoding="utf-8") as handle:
            for v in values:
                handle.write(f"{float(v)!r}\n")
    inputs = {
        "subjects": args.subjects,
        "samples": list(args.samples),
        "genuine_mean": args.genuine_mean,
        "genuine_std": args.genuine_std,
        "impostor_mean": args.impostor_mean,
        "impostor_std": args.impostor_std,
        "subject_effect_std": args.subject_effect_std,
        "seed": args.seed,
        "pair_cap": args.pair_cap,
        "sample_pairs": args.sample_pairs,
    }
    result = {
        "genuine_count": int(scores.genuine.size),
        "impostor_count": int(scores.impostor.size),
        "out_genuine": args.out_genuine,
        "out_impostor": args.out_impostor,
    }
    human = (
        f"wrote {result['genuine_count']} genuine scores to {args.out_genuine}\n"
        f"wrote {result['impostor_count']} impostor scores to {args.out_impostor}"
    )
    return _emit(args, "simulate", inputs, result, [], human)


def cmd_coverage(args) -> int:
    coverage = empirical.coverage_experiment(
        args.comparisons,
        args.p,
        alpha=1.0 - args.confidence,
        trials=args.trials,
        seed=args.seed,
        interval=args.interval,
    )
    inputs = {
        "comparisons": args.comparisons,
        "p": args.p,
        "confidence": args.confidence,
        "trials": args.trials,
        "seed": args.seed,
        "interval": args.interval,
    }
    result = {"coverage": coverage}
    human = f"coverage: {coverage:.4f} over {args.trials} trials (nominal {args.confidence})"
    return _emit(args, "coverage", inputs, result, [], human)


def cmd_serve(args) -> int:
    from bioquake.server import run_server

    run_server(args.bind, args.port, args.static_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bioquake",
        description="Reliability of biometric verification error rates.",
    )
    parser.add_argument("--version", action="version", version=f"bioquake {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calc", help="uncertainty of an observed error rate")
    p.add_argument("--comparisons", type=int, required=True)
    p.add_argument("--error-rate", type=float, required=True, dest="error_rate")
    p.add_argument("--errors", type=int, default=None)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_calc)

    p = sub.add_parser("plan", help="comparisons required for a target uncertainty")
    p.add_argument("--error-rate", type=float, required=True, dest="error_rate")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--confidence", type=float, default=0.95)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--approx", action="store_true")
    p.add_argument("--conservative", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("min-error", help="smallest reportable error rate")
    p.add_argument("--comparisons", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.061)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_min_error)

    p = sub.add_parser("classify", help="certainty class of a relative uncertainty")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("curve", help="error rate vs required comparisons grid (CSV)")
    p.add_argument("--deltas", type=_comma_floats, required=True)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--error-range", type=_range_pair, default=(1e-4, 0.5),
                   dest="error_range", metavar="LO:HI")
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("audit", help="annotate a published results table")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "json", "markdown", "text"),
                   default="text")
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--rule-delta", type=float, default=0.061, dest="rule_delta")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("validate", help="subsampling experiment on score files")
    p.add_argument("--genuine", required=True)
    p.add_argument("--impostor", required=True)
    point = p.add_mutually_exclusive_group()
    point.add_argument("--threshold", type=float, default=None)
    point.add_argument("--eer", action="store_true")
    point.add_argument("--at-fmr", type=float, default=None, dest="at_fmr")
    p.add_argument("--fracs", type=_comma_floats, default=[0.1, 0.01, 0.001])
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sem", action="store_true")
    p.add_argument("--csv", default=None, help="also write a flattened CSV here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="synthesize a labeled score population")
    p.add_argument("--subjects", type=int, required=True)
    p.add_argument("--samples", type=_comma_ints, required=True,
                   help="samples per subject (single int or comma list)")
    p.add_argument("--genuine-mean", type=float, default=1.0, dest="genuine_mean")
    p.add_argument("--genuine-std", type=float, default=0.15, dest="genuine_std")
    p.add_argument("--impostor-mean", type=float, default=0.0, dest="impostor_mean")
    p.add_argument("--impostor-std", type=float, default=0.15, dest="impostor_std")
    p.add_argument("--subject-effect-std", type=float, default=0.0,
                   dest="subject_effect_std")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pair-cap", type=int, default=2_000_000, dest="pair_cap")
    p.add_argument("--sample-pairs", action="store_true", dest="sample_pairs")
    p.add_argument("--out-genuine", required=True, dest="out_genuine")
    p.add_argument("--out-impostor", required=True, dest="out_impostor")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("coverage", help="Monte-Carlo coverage of the interval")
    p.add_argument("--comparisons", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--interval", choices=("symmetric", "region"),
                   default="symmetric")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("serve", help="JSON API over HTTP (backs the web UI)")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--static-dir", default=None, dest="static_dir")
    p.add_argument("--bind", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, 0 for --help/--version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
