"""Filtered result tables and inlier/outlier difference summaries.

A class is reported for a subgraph side when it passes at least one of two
filters: significance (p-value below p_max) or frequency (concentration
above f_min, a fraction of all occurrences). The per-period difference
summary is stricter: a side contributes its percentage only when it is
significant there, and the difference (inlier minus outlier percentage)
exists only where both sides are; missing entries render as "--".

Classes print under their published alias id when one exists, so outputs
stay diffable against existing tables. Machine formats use a decimal
point; the locale_comma option reproduces the comma-decimal style of the
source tables for visual comparison.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .classify import MotifClass
from .nullmodel import MotifStats

CSV_HEADER = "Syear,Eyear,Type,IDM,Percentage,P"

INLIERS = "Inliers"
OUTLIERS = "Outliers"


@dataclass(frozen=True)
class ReportRow:
    subgraph_type: str  # Inliers | Outliers
    motif: MotifClass
    percentage: float
    p_value: float


@dataclass(frozen=True)
class DiffRow:
    motif: MotifClass
    inlier_pct: float | None
    outlier_pct: float | None

    @property
    def difference(self) -> float | None:
        if self.inlier_pct is None or self.outlier_pct is None:
            return None
        return self.inlier_pct - self.outlier_pct


@dataclass(frozen=True)
class AnalysisReport:
    """One period's filtered rows plus full per-class statistics."""

    start_year: int
    end_year: int
    rows: list[ReportRow]
    diffs: list[DiffRow]
    inlier_stats: list[MotifStats] = field(repr=False, default_factory=list)
    outlier_stats: list[MotifStats] = field(repr=False, default_factory=list)
    p_max: float = 0.05
    f_min: float = 0.05

    @property
    def period_label(self) -> str:
        return f"{self.start_year}-{self.end_year}"


def filter_rows(
    stats: list[MotifStats], p_max: float = 0.05, f_min: float = 0.05
) -> list[MotifStats]:
    """Keep classes with p < p_max or concentration > f_min (fraction)."""
    kept = [
        s
        for s in stats
        if s.p_value < p_max or s.concentration > f_min * 100.0
    ]
    return sorted(kept, key=lambda s: s.motif.canonical_id)


def build_report(
    start_year: int,
    end_year: int,
    inlier_stats: list[MotifStats],
    outlier_stats: list[MotifStats],
    p_max: float = 0.05,
    f_min: float = 0.05,
) -> AnalysisReport:
    """Apply both filters and assemble the period's rows and differences."""
    rows = [
        ReportRow(INLIERS, s.motif, s.concentration, s.p_value)
        for s in filter_rows(inlier_stats, p_max, f_min)
    ] + [
        ReportRow(OUTLIERS, s.motif, s.concentration, s.p_value)
        for s in filter_rows(outlier_stats, p_max, f_min)
    ]
    rows.sort(key=lambda r: (r.motif.canonical_id, r.subgraph_type))

    # Differences pair the two sides per class; only significant sides count.
    reported = {r.motif.canonical_id for r in rows}
    by_canon_in = {s.motif.canonical_id: s for s in inlier_stats}
    by_canon_out = {s.motif.canonical_id: s for s in outlier_stats}
    diffs = []
    for canon in sorted(reported):
        sin = by_canon_in.get(canon)
        sout = by_canon_out.get(canon)
        motif = (sin or sout).motif
        diffs.append(
            DiffRow(
                motif=motif,
                inlier_pct=(
                    sin.concentration if sin and sin.p_value < p_max else None
                ),
                outlier_pct=(
                    sout.concentration if sout and sout.p_value < p_max else None
                ),
            )
        )
    return AnalysisReport(
        start_year, end_year, rows, diffs, inlier_stats, outlier_stats, p_max, f_min
    )


# -- formatting -----------------------------------------------------------


def _fmt_pct(value: float, locale_comma: bool) -> str:
    text = f"{value:.2f}"
    return (text.replace(".", ",") + "%") if locale_comma else text


def _fmt_p(value: float, locale_comma: bool) -> str:
    text = f"{value:.3f}"
    return text.replace(".", ",") if locale_comma else text


def _csv_field(text: str) -> str:
    return f'"{text}"' if "," in text else text


def render_csv(report: AnalysisReport, locale_comma: bool = False) -> str:
    lines = [CSV_HEADER]
    for r in report.rows:
        lines.append(
            ",".join(
                (
                    str(report.start_year),
                    str(report.end_year),
                    r.subgraph_type,
                    str(r.motif.display_id),
                    _csv_field(_fmt_pct(r.percentage, locale_comma)),
                    _csv_field(_fmt_p(r.p_value, locale_comma)),
                )
            )
        )
    return "\n".join(lines) + "\n"


def _stats_dict(stats: list[MotifStats]) -> list[dict]:
    return [
        {
            "canonical_id": s.motif.canonical_id,
            "display_id": s.motif.display_id,
            "name": s.motif.name,
            "real_count": s.real_count,
            "concentration": s.concentration,
            "null_mean": s.null_mean,
            "null_std": s.null_std,
            "z_score": s.z_score,
            "p_value": s.p_value,
        }
        for s in stats
    ]


def report_to_dict(report: AnalysisReport) -> dict:
    return {
        "start_year": report.start_year,
        "end_year": report.end_year,
        "filters": {"p_max": report.p_max, "f_min": report.f_min},
        "rows": [
            {
                "type": r.subgraph_type,
                "idm": r.motif.display_id,
                "canonical_id": r.motif.canonical_id,
                "percentage": r.percentage,
                "p_value": r.p_value,
            }
            for r in report.rows
        ],
        "diffs": [
            {
                "idm": d.motif.display_id,
                "inlier_pct": d.inlier_pct,
                "outlier_pct": d.outlier_pct,
                "difference": d.difference,
            }
            for d in report.diffs
        ],
        "null_summary": {
            "inliers": _stats_dict(report.inlier_stats),
            "outliers": _stats_dict(report.outlier_stats),
        },
    }


def render_json(report: AnalysisReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def render_markdown(report: AnalysisReport, locale_comma: bool = False) -> str:
    """Single-period table plus its inlier/outlier difference block."""
    dash = "--"
    lines = [
        f"## Motif report {report.period_label}",
        "",
        "| Syear | Eyear | Type | IDM | Percentage | P |",
        "|------:|------:|------|----:|-----------:|--:|",
    ]
    for r in report.rows:
        lines.append(
            f"| {report.start_year} | {report.end_year} | {r.subgraph_type} "
            f"| {r.motif.display_id} | {_fmt_pct(r.percentage, locale_comma)} "
            f"| {_fmt_p(r.p_value, locale_comma)} |"
        )
    lines += [
        "",
        "| IDM | Inliers | Outliers | Difference |",
        "|----:|--------:|---------:|-----------:|",
    ]
    for d in report.diffs:
        cells = [
            _fmt_pct(v, locale_comma) if v is not None else dash
            for v in (d.inlier_pct, d.outlier_pct, d.difference)
        ]
        lines.append(f"| {d.motif.display_id} | {cells[0]} | {cells[1]} | {cells[2]} |")
    return "\n".join(lines) + "\n"


def render(report: AnalysisReport, fmt: str, locale_comma: bool = False) -> str:
    if fmt == "csv":
        return render_csv(report, locale_comma)
    if fmt == "json":
        return render_json(report)
    if fmt == "markdown":
        return render_markdown(report, locale_comma)
    raise ValueError(f"unknown report format '{fmt}'")


# -- cross-period differences ---------------------------------------------


def diff_table(
    periods: list[tuple[str, AnalysisReport]]
) -> dict[int, list[DiffRow]]:
    """Per-class difference rows across periods, keyed by display id.

    A class appears if any period reported it; periods where it was not
    reported contribute an all-missing row.
    """
    canon_ids: set[int] = set()
    for _, rep in periods:
        canon_ids.update(d.motif.canonical_id for d in rep.diffs)
    table: dict[int, list[DiffRow]] = {}
    for canon in sorted(canon_ids):
        cells = []
        motif = None
        for _, rep in periods:
            row = next((d for d in rep.diffs if d.motif.canonical_id == canon), None)
            if row is not None:
                motif = row.motif
                cells.append(row)
            else:
                cells.append(None)
        assert motif is not None
        cells = [c if c is not None else DiffRow(motif, None, None) for c in cells]
        table[motif.display_id] = cells
    return table


def render_diff_markdown(
    periods: list[tuple[str, AnalysisReport]], locale_comma: bool = False
) -> str:
    """Difference overview across periods, one block per class.

    The Difference row is omitted for classes never significant on both
    sides in any period.
    """
    dash = "--"
    labels = [label for label, _ in periods]
    table = diff_table(periods)
    header = "| IDM | Type | " + " | ".join(labels) + " |"
    rule = "|----:|------|" + "|".join("---:" for _ in labels) + "|"
    lines = ["# Inlier/outlier differences by period", "", header, rule]

    def cell(value: float | None) -> str:
        return _fmt_pct(value, locale_comma) if value is not None else dash

    for display_id, cells in table.items():
        lines.append(
            f"| {display_id} | Inliers | "
            + " | ".join(cell(c.inlier_pct) for c in cells)
            + " |"
        )
        lines.append(
            f"| {display_id} | Outliers | "
            + " | ".join(cell(c.outlier_pct) for c in cells)
            + " |"
        )
        if any(c.difference is not None for c in cells):
            lines.append(
                "| | **Difference:** | "
                + " | ".join(
                    f"**{cell(c.difference)}**" if c.difference is not None else dash
                    for c in cells
                )
                + " |"
            )
    return "\n".join(lines) + "\n"
