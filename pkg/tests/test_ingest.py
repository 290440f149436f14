from __future__ import annotations

import io

import numpy as np
import pytest

from trademotifs import ColumnMap, Flow, FlowRecord, YearRange, aggregate_flows, parse_csv
from trademotifs.errors import CsvFormatError

HEADER = "Year,Reporter Code,Partner Code,Trade Flow,Trade Value (US$)\n"


def parse(text: str, columns: ColumnMap | None = None):
    return parse_csv(io.StringIO(text), columns)


def test_basic_row():
    result = parse(HEADER + "2004,US,CN,Export,1000\n")
    assert result.records == [FlowRecord(2004, "US", "CN", Flow.EXPORT, 1000.0)]
    assert result.n_skipped == 0


def test_negative_value_skipped():
    result = parse(HEADER + "2004,US,CN,Export,-5\n")
    assert result.records == []
    assert result.skipped["negative-value"] == 1


def test_import_rows_parse_but_filter_downstream():
    result = parse(HEADER + "2004,US,CN,Import,70\n2004,US,CN,Export,30\n")
    assert len(result.records) == 2
    edges = aggregate_flows(result.records, YearRange(2004, 2004), Flow.EXPORT)
    assert edges == [("US", "CN", 30.0)]


def test_unknown_flow_and_bad_rows_tallied():
    text = HEADER + (
        "2004,US,CN,Re-Export,10\n"
        "2004,US,CN,Export,\n"
        "2004,US,CN,Export,abc\n"
        "banana,US,CN,Export,10\n"
        "2004,,CN,Export,10\n"
    )
    result = parse(text)
    assert result.records == []
    assert result.skipped["unknown-flow"] == 1
    assert result.skipped["missing-value"] == 1
    assert result.skipped["bad-value"] == 1
    assert result.skipped["bad-year"] == 1
    assert result.skipped["missing-code"] == 1


def test_missing_column_is_fatal():
    with pytest.raises(CsvFormatError, match="Trade Value"):
        parse("Year,Reporter Code,Partner Code,Trade Flow\n2004,US,CN,Export\n")


def test_custom_column_names():
    cols = ColumnMap.from_overrides(
        {"year": "yr", "reporter": "from", "partner": "to", "flow": "dir", "value": "usd"}
    )
    result = parse("yr,from,to,dir,usd\n2005,AA,BB,x,12\n", cols)
    assert result.records == [FlowRecord(2005, "AA", "BB", Flow.EXPORT, 12.0)]


def test_unknown_column_override_rejected():
    with pytest.raises(CsvFormatError):
        ColumnMap.from_overrides({"years": "Y"})


def test_flow_synonyms():
    assert Flow.parse("X") is Flow.EXPORT
    assert Flow.parse("imports") is Flow.IMPORT
    assert Flow.parse("re-export") is None


def test_year_range_parse_and_validation():
    assert YearRange.parse("2004-2006") == YearRange(2004, 2006)
    assert YearRange.parse("2007") == YearRange(2007, 2007)
    assert YearRange(2004, 2006).contains(2005)
    assert not YearRange(2004, 2006).contains(2007)
    with pytest.raises(ValueError):
        YearRange(2008, 2004)


def records(*rows):
    return [FlowRecord(y, s, d, Flow.EXPORT, v) for y, s, d, v in rows]


def test_aggregation_sums_over_years():
    recs = records((2004, "A", "B", 100), (2005, "A", "B", 50))
    assert aggregate_flows(recs, YearRange(2004, 2006)) == [("A", "B", 150.0)]


def test_aggregation_excludes_out_of_range_years():
    recs = records((2003, "A", "B", 100))
    assert aggregate_flows(recs, YearRange(2004, 2006)) == []


def test_aggregation_preserves_direction():
    recs = records((2004, "A", "B", 100), (2004, "B", "A", 40))
    assert sorted(aggregate_flows(recs, YearRange(2004, 2004))) == [
        ("A", "B", 100.0),
        ("B", "A", 40.0),
    ]


def test_zero_value_pairs_produce_no_edge():
    recs = records((2004, "A", "B", 0.0))
    assert aggregate_flows(recs, YearRange(2004, 2004)) == []


def test_import_export_never_combined():
    recs = [
        FlowRecord(2004, "A", "B", Flow.EXPORT, 10.0),
        FlowRecord(2004, "A", "B", Flow.IMPORT, 90.0),
    ]
    assert aggregate_flows(recs, YearRange(2004, 2004), Flow.EXPORT) == [("A", "B", 10.0)]
    assert aggregate_flows(recs, YearRange(2004, 2004), Flow.IMPORT) == [("A", "B", 90.0)]


def test_aggregation_order_independent():
    rng = np.random.default_rng(40)
    recs = records(
        *[
            (int(rng.integers(2004, 2007)), f"c{rng.integers(5)}", f"c{rng.integers(5)}", float(rng.integers(1, 50)))
            for _ in range(60)
        ]
    )
    base = sorted(aggregate_flows(recs, YearRange(2004, 2006)))
    for seed in range(5):
        shuffled = list(recs)
        np.random.default_rng(seed).shuffle(shuffled)
        assert sorted(aggregate_flows(shuffled, YearRange(2004, 2006))) == base


def test_total_volume_conserved():
    rng = np.random.default_rng(41)
    recs = records(
        *[
            (int(rng.integers(2000, 2010)), f"c{rng.integers(6)}", f"d{rng.integers(6)}", float(rng.integers(0, 30)))
            for _ in range(100)
        ]
    )
    years = YearRange(2003, 2007)
    total = sum(r.value for r in recs if years.contains(r.year))
    aggregated = sum(w for _, _, w in aggregate_flows(recs, years))
    assert aggregated == pytest.approx(total)
