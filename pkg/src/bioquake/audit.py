"""Reliability audit of published biometric results tables.

Takes rows of (impostor/genuine comparison counts, reported FNMR/FMR) and
annotates each with the relative uncertainty of both rates, the certainty
class, and the minimum error rate the dataset could have reported at the
6% rule.  A 62-row table of published results ships with the package,
together with the values printed in the original survey so computed and
published numbers can be compared row by row.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from importlib import resources

from bioquake import planner
from bioquake.core import (
    CertaintyClass,
    DomainError,
    ErrorObservation,
    bioquake,
    classify,
)

CSV_FIELDS = (
    "dataset",
    "modality",
    "sessions",
    "ids",
    "imp_comparisons",
    "gen_comparisons",
    "fnmr_pct",
    "fmr_pct",
    "source",
)

OUTPUT_FIELDS = CSV_FIELDS + (
    "delta_fnmr",
    "class_fnmr",
    "delta_fmr",
    "class_fmr",
    "min_err_fnmr",
    "min_err_fmr",
)

# Annotations attached to a delta value.
NOTE_OK = ""
NOTE_ZERO_RATE = "zero_rate"          # reported rate is 0: delta undefined
NOTE_UNMEASURABLE = "unmeasurable"    # rate too small to yield one expected
                                      # error: region collapses to width 0


class TableParseError(DomainError):
    """Malformed input table; message names the row and field."""


@dataclass(frozen=True)
class DatasetRecord:
    """One published-result row: counts plus reported error rates."""

    dataset: str
    modality: str
    sessions: str | None
    ids: int | None
    imp_comparisons: int
    gen_comparisons: int
    fnmr_pct: float
    fmr_pct: float
    source: str | None = None

    def __post_init__(self):
        if self.imp_comparisons < 1 or self.gen_comparisons < 1:
            raise DomainError(
                f"comparison counts must be >= 1, got imp={self.imp_comparisons}, "
                f"gen={self.gen_comparisons}"
            )
        for name, value in (("fnmr_pct", self.fnmr_pct), ("fmr_pct", self.fmr_pct)):
            if not 0.0 <= value <= 100.0:
                raise DomainError(f"{name} must be in [0, 100], got {value!r}")


@dataclass(frozen=True)
class AuditResult:
    """A record plus its reliability annotations."""

    record: DatasetRecord
    delta_fnmr: float | None
    delta_fnmr_note: str
    class_fnmr: CertaintyClass
    delta_fmr: float | None
    delta_fmr_note: str
    class_fmr: CertaintyClass
    min_err_fnmr: float
    min_err_fmr: float

    @property
    def delta_fnmr_display(self) -> str:
        return delta_display(self.delta_fnmr, self.delta_fnmr_note)

    @property
    def delta_fmr_display(self) -> str:
        return delta_display(self.delta_fmr, self.delta_fmr_note)


def delta_display(value: float | None, note: str = NOTE_OK) -> str:
    """Table-style cell for a relative uncertainty."""
    if note == NOTE_ZERO_RATE:
        return "inf"
    if note == NOTE_UNMEASURABLE:
        return ">1"
    if value is None:
        return "inf"
    if value > 1.0:
        return ">1"
    return format(value, ".5g")


def delta_machine(value: float | None) -> str:
    """Full-precision CSV cell; undefined serializes as the string inf."""
    return "inf" if value is None else repr(value)


def parse_count(text: str) -> int:
    """Count with optional K/M/B suffix (x1e3/1e6/1e9), parsed exactly."""
    raw = text.strip()
    if not raw:
        raise ValueError("empty count")
    multiplier = 1
    suffix = raw[-1].upper()
    if suffix in "KMB":
        multiplier = {"K": 10**3, "M": 10**6, "B": 10**9}[suffix]
        raw = raw[:-1]
    try:
        value = Decimal(raw) * multiplier
    except InvalidOperation as exc:
        raise ValueError(f"not a count: {text!r}") from exc
    if value != int(value) or int(value) < 0:
        raise ValueError(f"not a whole count: {text!r}")
    return int(value)


def _record_from_mapping(fields: dict, row_num: int) -> DatasetRecord:
    def fail(field: str, why: str):
        raise TableParseError(f"row {row_num}, field {field!r}: {why}")

    for field in CSV_FIELDS:
        if field not in fields or fields[field] is None:
            fail(field, "missing")

    def text(field: str) -> str:
        value = fields[field]
        if not isinstance(value, str) or not value.strip():
            fail(field, f"expected text, got {value!r}")
        return value.strip()

    def optional(field: str) -> str | None:
        value = fields[field]
        if value is None:
            return None
        value = str(value).strip()
        return None if value in ("", "NA") else value

    def count_of(field: str) -> int:
        value = fields[field]
        try:
            if isinstance(value, int):
                return value
            if isinstance(value, str):
                return parse_count(value)
        except ValueError as exc:
            fail(field, str(exc))
        fail(field, f"expected a count, got {value!r}")

    def percent(field: str) -> float:
        value = fields[field]
        try:
            result = float(value)
        except (TypeError, ValueError):
            fail(field, f"expected a percentage, got {value!r}")
        return result

    ids_raw = optional("ids")
    try:
        ids = None if ids_raw is None else parse_count(ids_raw)
    except ValueError as exc:
        fail("ids", str(exc))

    try:
        return DatasetRecord(
            dataset=text("dataset"),
            modality=text("modality"),
            sessions=optional("sessions"),
            ids=ids,
            imp_comparisons=count_of("imp_comparisons"),
            gen_comparisons=count_of("gen_comparisons"),
            fnmr_pct=percent("fnmr_pct"),
            fmr_pct=percent("fmr_pct"),
            source=optional("source"),
        )
    except DomainError as exc:
        raise TableParseError(f"row {row_num}: {exc}") from exc


def parse_dataset_table(data: str | bytes, format: str = "csv") -> list[DatasetRecord]:
    """Strictly parse a results table from CSV or JSON bytes/text.

    CSV needs the documented header; lines starting with # are ignored so
    rendered reports can be fed back in.  JSON is an array of objects
    carrying at least the same field names.  Any malformed row raises
    TableParseError naming the row and field.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if format == "csv":
        lines = [ln for ln in data.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not lines:
            raise TableParseError("empty input")
        reader = csv.DictReader(lines)
        missing = set(CSV_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise TableParseError(f"header missing fields: {sorted(missing)}")
        records = []
        for i, row in enumerate(reader, start=1):
            if None in row and row[None]:
                raise TableParseError(f"row {i}: too many columns")
            records.append(_record_from_mapping(row, i))
        if not records:
            raise TableParseError("no data rows")
        return records
    if format == "json":
        try:
            items = json.loads(data)
        except json.JSONDecodeError as exc:
            raise TableParseError(f"invalid JSON: {exc}") from exc
        if not isinstance(items, list) or not items:
            raise TableParseError("expected a non-empty JSON array of records")
        records = []
        for i, item in enumerate(items, start=1):
            if not isinstance(item, dict):
                raise TableParseError(f"row {i}: expected an object")
            records.append(_record_from_mapping(item, i))
        return records
    raise DomainError(f"unknown input format {format!r}")


def _delta_side(comparisons: int, pct: float, alpha: float):
    rate = pct / 100.0
    if rate == 0.0:
        return None, NOTE_ZERO_RATE, CertaintyClass.F
    result = bioquake(ErrorObservation(comparisons, rate=rate, alpha=alpha))
    if result.delta_abs == 0.0 and rate < 1.0:
        # The region collapsed to a single count: the reported rate is
        # below what this many comparisons can resolve (under one
        # expected error), so the relative uncertainty is unbounded.
        return None, NOTE_UNMEASURABLE, CertaintyClass.F
    return result.delta_rel, NOTE_OK, classify(result.delta_rel)


def audit_record(
    rec: DatasetRecord, alpha: float = 0.05, rule_delta: float = 0.061
) -> AuditResult:
    """Annotate one record: FNMR uses the genuine count, FMR the impostor count."""
    delta_fnmr, note_fnmr, class_fnmr = _delta_side(
        rec.gen_comparisons, rec.fnmr_pct, alpha
    )
    delta_fmr, note_fmr, class_fmr = _delta_side(
        rec.imp_comparisons, rec.fmr_pct, alpha
    )
    return AuditResult(
        record=rec,
        delta_fnmr=delta_fnmr,
        delta_fnmr_note=note_fnmr,
        class_fnmr=class_fnmr,
        delta_fmr=delta_fmr,
        delta_fmr_note=note_fmr,
        class_fmr=class_fmr,
        min_err_fnmr=planner.min_reportable_error(
            rec.gen_comparisons, rule_delta, alpha
        ),
        min_err_fmr=planner.min_reportable_error(
            rec.imp_comparisons, rule_delta, alpha
        ),
    )


def headline_counts(values) -> tuple[int, int]:
    """How many deltas exceed 0.3 and 0.5; undefined counts as exceeding."""
    gt03 = gt05 = 0
    for v in values:
        if v is None or math.isinf(v):
            gt03 += 1
            gt05 += 1
        else:
            gt03 += v > 0.3
            gt05 += v > 0.5
    return gt03, gt05


def _summary(results: list[AuditResult]) -> dict:
    fnmr = [
        None if r.delta_fnmr_note else r.delta_fnmr for r in results
    ]
    fmr = [None if r.delta_fmr_note else r.delta_fmr for r in results]
    fnmr_gt03, fnmr_gt05 = headline_counts(fnmr)
    fmr_gt03, fmr_gt05 = headline_counts(fmr)
    # independent recount straight off the per-row fields
    check = [0, 0, 0, 0]
    for r in results:
        for k, (v, note) in enumerate(
            ((r.delta_fnmr, r.delta_fnmr_note), (r.delta_fmr, r.delta_fmr_note))
        ):
            exceeded = note != NOTE_OK or v is None
            check[k] += exceeded or v > 0.3
            check[k + 2] += exceeded or v > 0.5
    assert check == [fnmr_gt03, fmr_gt03, fnmr_gt05, fmr_gt05]
    return {
        "rows": len(results),
        "fnmr": {"delta_gt_0.3": fnmr_gt03, "delta_gt_0.5": fnmr_gt05},
        "fmr": {"delta_gt_0.3": fmr_gt03, "delta_gt_0.5": fmr_gt05},
    }


def _record_cells(rec: DatasetRecord) -> list[str]:
    return [
        rec.dataset,
        rec.modality,
        rec.sessions if rec.sessions is not None else "NA",
        str(rec.ids) if rec.ids is not None else "NA",
        str(rec.imp_comparisons),
        str(rec.gen_comparisons),
        repr(rec.fnmr_pct),
        repr(rec.fmr_pct),
        rec.source if rec.source is not None else "NA",
    ]


def _row_object(r: AuditResult) -> dict:
    rec = r.record
    return {
        "dataset": rec.dataset,
        "modality": rec.modality,
        "sessions": rec.sessions,
        "ids": rec.ids,
        "imp_comparisons": rec.imp_comparisons,
        "gen_comparisons": rec.gen_comparisons,
        "fnmr_pct": rec.fnmr_pct,
        "fmr_pct": rec.fmr_pct,
        "source": rec.source,
        "delta_fnmr": {
            "value": r.delta_fnmr,
            "display": r.delta_fnmr_display,
            "note": r.delta_fnmr_note,
        },
        "class_fnmr": r.class_fnmr.code,
        "delta_fmr": {
            "value": r.delta_fmr,
            "display": r.delta_fmr_display,
            "note": r.delta_fmr_note,
        },
        "class_fmr": r.class_fmr.code,
        "min_err_fnmr": {
            "value": r.min_err_fnmr,
            "display": planner.format_min_error(r.min_err_fnmr, "unicode"),
        },
        "min_err_fmr": {
            "value": r.min_err_fmr,
            "display": planner.format_min_error(r.min_err_fmr, "unicode"),
        },
    }


_LEGEND = " ".join(
    f"{cls.label}={cls.color}" for cls in CertaintyClass
)


def render_report(results: list[AuditResult], format: str = "text") -> str:
    """Render audit results as csv, json, markdown or text.

    csv and json keep full numeric precision; markdown and text use the
    table-style display cells and name each class with its color legend
    label.  Every format ends with the summary counts of rows whose
    uncertainty exceeds 0.3 and 0.5 per metric.
    """
    if not results:
        raise DomainError("results must be non-empty")
    summary = _summary(results)
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(OUTPUT_FIELDS)
        for r in results:
            writer.writerow(
                _record_cells(r.record)
                + [
                    delta_machine(r.delta_fnmr),
                    r.class_fnmr.code,
                    delta_machine(r.delta_fmr),
                    r.class_fmr.code,
                    repr(r.min_err_fnmr),
                    repr(r.min_err_fmr),
                ]
            )
        s = summary
        out.write(
            f"# summary: rows={s['rows']}"
            f" fnmr_delta_gt_0.3={s['fnmr']['delta_gt_0.3']}"
            f" fmr_delta_gt_0.3={s['fmr']['delta_gt_0.3']}"
            f" fnmr_delta_gt_0.5={s['fnmr']['delta_gt_0.5']}"
            f" fmr_delta_gt_0.5={s['fmr']['delta_gt_0.5']}\n"
        )
        return out.getvalue()
    if format == "json":
        doc = {"rows": [_row_object(r) for r in results], "summary": summary}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if format in ("markdown", "text"):
        headers = [
            "Dataset", "Modality", "#S", "IDs", "Imp", "Gen",
            "FNMR[%]", "dFNMR", "Class FNMR", "FMR[%]", "dFMR", "Class FMR",
            "Min FNMR", "Min FMR",
        ]
        rows = []
        for r in results:
            rec = r.record
            rows.append([
                rec.dataset,
                rec.modality,
                rec.sessions if rec.sessions is not None else "NA",
                str(rec.ids) if rec.ids is not None else "NA",
                str(rec.imp_comparisons),
                str(rec.gen_comparisons),
                f"{rec.fnmr_pct:g}",
                r.delta_fnmr_display,
                f"{r.class_fnmr.code} ({r.class_fnmr.label})",
                f"{rec.fmr_pct:g}",
                r.delta_fmr_display,
                f"{r.class_fmr.code} ({r.class_fmr.label})",
                planner.format_min_error(r.min_err_fnmr, "unicode"),
                planner.format_min_error(r.min_err_fmr, "unicode"),
            ])
        s = summary
        footer = [
            f"Rows: {s['rows']}",
            f"FNMR with delta > 0.3: {s['fnmr']['delta_gt_0.3']}/{s['rows']}; "
            f"> 0.5: {s['fnmr']['delta_gt_0.5']}/{s['rows']}",
            f"FMR with delta > 0.3: {s['fmr']['delta_gt_0.3']}/{s['rows']}; "
            f"> 0.5: {s['fmr']['delta_gt_0.5']}/{s['rows']}",
            f"Legend: {_LEGEND}",
        ]
        if format == "markdown":
            lines = [
                "| " + " | ".join(headers) + " |",
                "| " + " | ".join("---" for _ in headers) + " |",
            ]
            lines += ["| " + " | ".join(row) + " |" for row in rows]
            lines += [""] + footer
            return "\n".join(lines) + "\n"
        widths = [
            max(len(headers[i]), *(len(row[i]) for row in rows))
            for i in range(len(headers))
        ]
        lines = [
            "  ".join(h.ljust(w) for h, w in zip(headers, widths)),
            "  ".join("-" * w for w in widths),
        ]
        lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in rows]
        lines += [""] + footer
        return "\n".join(lines) + "\n"
    raise DomainError(f"unknown output format {format!r}")


# --- comparison against the published table ---------------------------------

@dataclass(frozen=True)
class PublishedRow:
    """The delta and minimum-error cells as printed in the source table."""

    dataset: str
    source: str
    delta_fnmr_raw: str
    delta_fmr_raw: str
    min_err_fnmr: str
    min_err_fmr: str
    note: str = ""

    @property
    def delta_fnmr(self) -> float:
        return math.inf if self.delta_fnmr_raw == ">1" else float(self.delta_fnmr_raw)

    @property
    def delta_fmr(self) -> float:
        return math.inf if self.delta_fmr_raw == ">1" else float(self.delta_fmr_raw)


@dataclass(frozen=True)
class CellCheck:
    """One computed-vs-published delta comparison."""

    row: int
    dataset: str
    metric: str
    computed: float | None
    published_raw: str
    relative_error: float | None
    asserted: bool
    ok: bool
    skip_reason: str


def load_bundled_table() -> list[DatasetRecord]:
    data = resources.files("bioquake.data").joinpath("published_table.csv").read_text("utf-8")
    return parse_dataset_table(data, "csv")


def load_published_annotations() -> list[PublishedRow]:
    data = resources.files("bioquake.data").joinpath("published_values.csv")
    rows = []
    for row in csv.DictReader(io.StringIO(data.read_text("utf-8"))):
        rows.append(
            PublishedRow(
                dataset=row["dataset"],
                source=row["source"],
                delta_fnmr_raw=row["delta_fnmr"],
                delta_fmr_raw=row["delta_fmr"],
                min_err_fnmr=row["min_err_fnmr"],
                min_err_fmr=row["min_err_fmr"],
                note=row["note"],
            )
        )
    return rows


def published_headline_counts(published: list[PublishedRow]) -> dict:
    """Summary counts over the published delta values (>1 exceeds both)."""
    fnmr_gt03, fnmr_gt05 = headline_counts(p.delta_fnmr for p in published)
    fmr_gt03, fmr_gt05 = headline_counts(p.delta_fmr for p in published)
    return {
        "rows": len(published),
        "fnmr": {"delta_gt_0.3": fnmr_gt03, "delta_gt_0.5": fnmr_gt05},
        "fmr": {"delta_gt_0.3": fmr_gt03, "delta_gt_0.5": fmr_gt05},
    }


def _relative_error(computed: float | None, published: float) -> float | None:
    if computed is None or math.isinf(published) or published == 0.0:
        return None
    return abs(computed - published) / published


def compare_published(
    results: list[AuditResult],
    published: list[PublishedRow],
    rel_tol: float = 0.05,
    min_expected_errors: float = 500.0,
) -> list[CellCheck]:
    """Row-aligned comparison of computed deltas with the printed values.

    Rows where both expected error counts (rate x comparisons) exceed
    min_expected_errors are asserted to agree within rel_tol; smaller rows
    are compared but only reported (the source's small-sample procedure
    is not fully specified).  Rows flagged "transposed" in the published
    annotations have their two printed deltas swapped relative to their
    counts and are compared cross-wise; printed cells flagged
    "*_printed_inconsistent" cannot be derived from their own row data
    and are reported, never asserted.
    """
    if len(results) != len(published):
        raise DomainError(
            f"results ({len(results)}) and published ({len(published)}) differ in length"
        )
    checks = []
    for i, (r, pub) in enumerate(zip(results, published)):
        rec = r.record
        expected_fnmr_errors = rec.gen_comparisons * rec.fnmr_pct / 100.0
        expected_fmr_errors = rec.imp_comparisons * rec.fmr_pct / 100.0
        in_tier = (
            expected_fnmr_errors > min_expected_errors
            and expected_fmr_errors > min_expected_errors
        )
        if pub.note == "transposed":
            pairs = [
                ("fnmr", r.delta_fnmr, pub.delta_fmr_raw, pub.delta_fmr),
                ("fmr", r.delta_fmr, pub.delta_fnmr_raw, pub.delta_fnmr),
            ]
        else:
            pairs = [
                ("fnmr", r.delta_fnmr, pub.delta_fnmr_raw, pub.delta_fnmr),
                ("fmr", r.delta_fmr, pub.delta_fmr_raw, pub.delta_fmr),
            ]
        for metric, computed, raw, value in pairs:
            skip = ""
            if not in_tier:
                skip = "small_sample"
            if pub.note == f"{metric}_printed_inconsistent":
                skip = "printed_inconsistent"
            rel = _relative_error(computed, value)
            asserted = not skip
            ok = (rel is not None and rel <= rel_tol) if asserted else True
            checks.append(
                CellCheck(
                    row=i,
                    dataset=rec.dataset,
                    metric=metric,
                    computed=computed,
                    published_raw=raw,
                    relative_error=rel,
                    asserted=asserted,
                    ok=ok,
                    skip_reason=skip,
                )
            )
    return checks
