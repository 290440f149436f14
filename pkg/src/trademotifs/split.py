"""Weight-threshold split of a graph into inlier and outlier subgraphs.

Trade-volume weights are heavily skewed, so the edge-weight histogram
(log-scaled by default, 10,000 bins) shows a clear discontinuity between
the bulk of weak links and the heavy tail. The threshold is taken at the
lower edge of the occupied bin that follows the widest run of empty bins;
a manual override is available when no gap exists.

Edges strictly below the threshold form the inliers subgraph, edges at or
above it the outliers; each input edge lands in exactly one side. Nodes
left isolated by the cut are dropped from that side's node set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyGraphError, NoDiscontinuityError
from .graph_core import WeightedDigraph, build_graph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitConfig:
    bins: int = 10_000
    min_gap_bins: int = 1
    manual_threshold: float | None = None
    log_scale: bool = True

    def __post_init__(self):
        if self.bins < 2:
            raise ValueError("need at least 2 histogram bins")
        if self.min_gap_bins < 1:
            raise ValueError("min_gap_bins must be positive")
        if self.manual_threshold is not None and self.manual_threshold <= 0:
            raise ValueError("manual threshold must be positive")


@dataclass(frozen=True)
class Histogram:
    """Equal-width bin counts over edge weights (widths in log space when
    log_scale); edges are reported in raw weight space."""

    counts: np.ndarray
    edges: np.ndarray
    log_scale: bool

    @property
    def is_degenerate(self) -> bool:
        """At most one occupied bin: no gap can exist."""
        return int(np.count_nonzero(self.counts)) <= 1


@dataclass(frozen=True)
class SplitResult:
    threshold: float
    inliers: WeightedDigraph
    outliers: WeightedDigraph
    histogram: Histogram | None = field(default=None, repr=False)


def build_histogram(g: WeightedDigraph, cfg: SplitConfig) -> Histogram:
    """Bin all edge weights once; sum of counts equals the edge count."""
    if g.edge_count == 0:
        raise EmptyGraphError("cannot histogram a graph with no edges")
    w = g.edge_weight
    if cfg.log_scale:
        if np.any(w <= 0):
            raise ValueError(
                "log-scale binning needs positive weights; rerun with linear bins"
            )
        counts, edges = np.histogram(np.log(w), bins=cfg.bins)
        edges = np.exp(edges)
    else:
        counts, edges = np.histogram(w, bins=cfg.bins)
    return Histogram(counts.astype(np.int64), edges, cfg.log_scale)


def detect_threshold(hist: Histogram, cfg: SplitConfig) -> float:
    """Weight at the lower edge of the bin after the widest empty-bin run.

    The manual threshold, when configured, wins unconditionally. Ties
    between equally wide runs resolve to the lowest-weight run.
    """
    if cfg.manual_threshold is not None:
        return float(cfg.manual_threshold)
    occupied = np.flatnonzero(hist.counts)
    if len(occupied) <= 1:
        raise NoDiscontinuityError(
            "degenerate histogram (single occupied bin); pass --threshold"
        )
    gaps = np.diff(occupied) - 1
    best = int(np.argmax(gaps))
    if gaps[best] < cfg.min_gap_bins:
        raise NoDiscontinuityError(
            f"no run of >= {cfg.min_gap_bins} empty bin(s) in the histogram; "
            "pass --threshold to split manually"
        )
    return float(hist.edges[occupied[best + 1]])


def split_graph(g: WeightedDigraph, threshold: float) -> "SplitResult":
    """Partition edges at the threshold (inliers strictly below)."""
    records = g.to_records()
    inlier_recs = [r for r in records if r[2] < threshold]
    outlier_recs = [r for r in records if r[2] >= threshold]
    if not outlier_recs:
        log.warning("threshold %g above max weight: every edge is an inlier", threshold)
    if not inlier_recs:
        log.warning("threshold %g at/below min weight: every edge is an outlier", threshold)

    def side(recs: list[tuple[str, str, float]]) -> WeightedDigraph:
        return build_graph(recs) if recs else WeightedDigraph.empty()

    return SplitResult(
        threshold=float(threshold),
        inliers=side(inlier_recs),
        outliers=side(outlier_recs),
    )


def split_with_config(g: WeightedDigraph, cfg: SplitConfig) -> SplitResult:
    """Histogram, detect (or take) the threshold, and split."""
    hist = build_histogram(g, cfg)
    threshold = detect_threshold(hist, cfg)
    parts = split_graph(g, threshold)
    return SplitResult(parts.threshold, parts.inliers, parts.outliers, hist)


def histogram_rows(hist: Histogram) -> list[tuple[float, float, int]]:
    """(bin_lower, bin_upper, count) rows for CSV dumping."""
    return [
        (float(hist.edges[i]), float(hist.edges[i + 1]), int(c))
        for i, c in enumerate(hist.counts)
    ]
