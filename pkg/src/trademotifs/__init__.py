"""Motif mining in weighted directed trade networks.

Pipeline: ingest Comtrade-style CSVs and aggregate multi-year flows, split
the resulting graph at a weight-histogram discontinuity into inlier and
outlier subgraphs, enumerate (or sample) connected size-k subgraphs,
classify them into isomorphism classes, compare against degree-preserving
randomized ensembles, and report the significant/frequent classes.
"""

from .classify import (
    MotifClass,
    build_class_table,
    canonical_code,
    get_class_table,
    resolve_paper_id,
)
from .esu import (
    CensusResult,
    SamplerConfig,
    SubgraphOccurrence,
    census,
    count_by_class,
    esu_enumerate,
    estimate_total,
    rand_esu_sample,
)
from .graph_core import WeightedDigraph, build_graph, exclusive_neighborhood
from .ingest import ColumnMap, Flow, FlowRecord, YearRange, aggregate_flows, parse_csv
from .nullmodel import (
    EnsembleConfig,
    MotifStats,
    NullEnsemble,
    build_ensemble,
    edge_switch_randomize,
    significance,
)
from .report import AnalysisReport, build_report, diff_table, filter_rows, render
from .split import (
    Histogram,
    SplitConfig,
    SplitResult,
    build_histogram,
    detect_threshold,
    split_graph,
    split_with_config,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "CensusResult",
    "ColumnMap",
    "EnsembleConfig",
    "Flow",
    "FlowRecord",
    "Histogram",
    "MotifClass",
    "MotifStats",
    "NullEnsemble",
    "SamplerConfig",
    "SplitConfig",
    "SplitResult",
    "SubgraphOccurrence",
    "WeightedDigraph",
    "YearRange",
    "aggregate_flows",
    "build_class_table",
    "build_ensemble",
    "build_graph",
    "build_histogram",
    "build_report",
    "canonical_code",
    "census",
    "count_by_class",
    "detect_threshold",
    "diff_table",
    "edge_switch_randomize",
    "esu_enumerate",
    "estimate_total",
    "exclusive_neighborhood",
    "filter_rows",
    "get_class_table",
    "parse_csv",
    "rand_esu_sample",
    "render",
    "resolve_paper_id",
    "significance",
    "split_graph",
    "split_with_config",
]
