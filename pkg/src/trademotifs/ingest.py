"""Comtrade-style CSV parsing and multi-year flow aggregation.

A raw export file carries one row per (year, reporter, partner, flow)
with a dollar value. Parsing and flow filtering are deliberately separate:
every well-formed row becomes a record, and the export/import selection
plus the year window are applied during aggregation, where the cumulative
flow for an ordered country pair is the sum of its per-year values.

Import and export records are never combined into one edge: reporter- and
partner-side figures disagree in practice and averaging them is not sound.
"""

from __future__ import annotations

import csv
import enum
from collections import Counter
from dataclasses import dataclass, fields
from pathlib import Path
from typing import IO, Iterable

from .errors import CsvFormatError


class Flow(enum.Enum):
    EXPORT = "Export"
    IMPORT = "Import"

    @classmethod
    def parse(cls, text: str) -> "Flow | None":
        t = text.strip().lower()
        if t in ("export", "exports", "x"):
            return cls.EXPORT
        if t in ("import", "imports", "m"):
            return cls.IMPORT
        return None


@dataclass(frozen=True)
class FlowRecord:
    year: int
    reporter: str
    partner: str
    flow: Flow
    value: float


@dataclass(frozen=True)
class YearRange:
    start_year: int
    end_year: int

    def __post_init__(self):
        if self.start_year > self.end_year:
            raise ValueError(f"year range {self.start_year}-{self.end_year} is inverted")

    def contains(self, year: int) -> bool:
        return self.start_year <= year <= self.end_year

    @property
    def label(self) -> str:
        return f"{self.start_year}-{self.end_year}"

    @classmethod
    def parse(cls, text: str) -> "YearRange":
        """Accepts "2004-2006" or a single year "2007"."""
        part = text.strip()
        if "-" in part:
            a, b = part.split("-", 1)
            return cls(int(a), int(b))
        return cls(int(part), int(part))


@dataclass(frozen=True)
class ColumnMap:
    """Input column names; defaults match common Comtrade exports."""

    year: str = "Year"
    reporter: str = "Reporter Code"
    partner: str = "Partner Code"
    flow: str = "Trade Flow"
    value: str = "Trade Value (US$)"

    @classmethod
    def from_overrides(cls, overrides: dict[str, str]) -> "ColumnMap":
        known = {f.name for f in fields(cls)}
        unknown = set(overrides) - known
        if unknown:
            raise CsvFormatError(
                f"unknown column keys {sorted(unknown)}; expected {sorted(known)}"
            )
        return cls(**overrides)


@dataclass
class ParseResult:
    records: list[FlowRecord]
    skipped: Counter

    @property
    def n_skipped(self) -> int:
        return sum(self.skipped.values())


def parse_csv(source: str | Path | IO[str], columns: ColumnMap | None = None) -> ParseResult:
    """Parse a trade CSV into flow records.

    Rows with a missing or negative value, an unknown flow, or an unusable
    year are skipped and tallied by reason. A header missing any required
    column is fatal.
    """
    columns = columns or ColumnMap()
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            return _parse_stream(fh, columns)
    return _parse_stream(source, columns)


def _parse_stream(fh: IO[str], columns: ColumnMap) -> ParseResult:
    reader = csv.DictReader(fh)
    if reader.fieldnames is None:
        raise CsvFormatError("input CSV has no header row")
    required = [columns.year, columns.reporter, columns.partner, columns.flow, columns.value]
    missing = [c for c in required if c not in reader.fieldnames]
    if missing:
        raise CsvFormatError(f"input CSV is missing column(s): {', '.join(missing)}")

    records: list[FlowRecord] = []
    skipped: Counter = Counter()
    for row in reader:
        raw_value = (row.get(columns.value) or "").strip()
        if not raw_value:
            skipped["missing-value"] += 1
            continue
        try:
            value = float(raw_value.replace(",", ""))
        except ValueError:
            skipped["bad-value"] += 1
            continue
        if value < 0:
            skipped["negative-value"] += 1
            continue
        flow = Flow.parse(row.get(columns.flow) or "")
        if flow is None:
            skipped["unknown-flow"] += 1
            continue
        try:
            year = int((row.get(columns.year) or "").strip())
        except ValueError:
            skipped["bad-year"] += 1
            continue
        reporter = (row.get(columns.reporter) or "").strip()
        partner = (row.get(columns.partner) or "").strip()
        if not reporter or not partner:
            skipped["missing-code"] += 1
            continue
        records.append(FlowRecord(year, reporter, partner, flow, value))
    return ParseResult(records, skipped)


def aggregate_flows(
    records: Iterable[FlowRecord], years: YearRange, flow: Flow = Flow.EXPORT
) -> list[tuple[str, str, float]]:
    """Cumulative per-pair dollar flow over the year window.

    Each ordered (reporter, partner) pair with at least one matching record
    gets the sum of its values across all in-range years; pairs summing to
    zero produce no edge. Direction is preserved as reported.
    """
    sums: dict[tuple[str, str], float] = {}
    for rec in records:
        if rec.flow is not flow or not years.contains(rec.year):
            continue
        key = (rec.reporter, rec.partner)
        sums[key] = sums.get(key, 0.0) + rec.value
    return [(src, dst, total) for (src, dst), total in sums.items() if total > 0]
