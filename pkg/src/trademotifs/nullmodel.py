"""Degree-preserving null model and per-class significance statistics.

Randomization is directed edge switching: repeatedly pick two edges
(a→b, c→d) and rewire them to (a→d, c→b) unless that would create a
self-loop or a duplicate edge. Every node keeps its exact in- and
out-degree and the graph stays simple; weights are discarded, the null
model is purely topological.

Replicate r of an ensemble randomizes with a stream keyed by (seed, r)
and re-runs the same enumeration/sampling configuration as was used on
the real graph (with a replicate-derived sampling stream), so ensembles
are reproducible and replicates are independent and order-insensitive.

The compared statistic is the concentration: a class's percentage share
of all connected size-k occurrences. The p-value is the one-sided
add-one estimator P = (#{null >= real} + 1) / (R + 1), so values near 1
flag underrepresented classes and 0 is never returned.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels, rng
from .classify import ClassTable, MotifClass, get_class_table
from .errors import EnsembleError
from .esu import CensusResult, SamplerConfig, census
from .graph_core import WeightedDigraph

log = logging.getLogger(__name__)

# Stream tags separating the randomization and sampling draws of a replicate.
_TAG_SWITCH = "switch"
_TAG_SAMPLE = "sample"


@dataclass(frozen=True)
class EnsembleConfig:
    n_random: int = 1000
    switches_per_edge: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n_random < 1:
            raise ValueError("ensemble size must be >= 1")
        if self.switches_per_edge < 1:
            raise ValueError("switches_per_edge must be >= 1")


@dataclass(frozen=True)
class MotifStats:
    """Real vs null-ensemble comparison for one class."""

    motif: MotifClass
    real_count: int
    concentration: float  # percent of all observed size-k occurrences
    null_mean: float
    null_std: float
    z_score: float | None  # undefined when the null has zero variance
    p_value: float


def _switch_py(src: np.ndarray, dst: np.ndarray, adj: np.ndarray, attempts: int, seed: int) -> None:
    """Pure-Python twin of kernels.switch_kernel (identical stream use)."""
    m = len(src)
    state = seed
    state, _ = rng.sm_next(state)
    for _t in range(attempts):
        state, z1 = rng.sm_next(state)
        state, z2 = rng.sm_next(state)
        i = z1 % m
        j = z2 % m
        a = src[i]
        b = dst[i]
        c = src[j]
        d = dst[j]
        if a == d or c == b or a == c or b == d:
            continue
        if adj[a, d] or adj[c, b]:
            continue
        adj[a, b] = 0
        adj[c, d] = 0
        adj[a, d] = 1
        adj[c, b] = 1
        dst[i] = d
        dst[j] = b


def edge_switch_randomize(
    g: WeightedDigraph,
    cfg: EnsembleConfig,
    replicate: int = 0,
    use_numba: bool | None = None,
) -> WeightedDigraph:
    """One randomized copy of g; switches_per_edge * |E| switch attempts.

    Graphs admitting no valid switch come back as topology-identical
    copies. Edge weights are reset to 1.
    """
    m = g.edge_count
    src = g.edge_src.astype(np.int64)
    dst = g.edge_dst.astype(np.int64)
    if m >= 2:
        adj = np.array(g.dense_adjacency)  # writable working copy
        attempts = cfg.switches_per_edge * m
        seed = rng.derive_seed(cfg.seed, _TAG_SWITCH, replicate)
        if kernels.resolve_backend(use_numba):
            kernels.switch_kernel(src, dst, adj, attempts, np.uint64(seed))
        else:
            _switch_py(src, dst, adj, attempts, seed)
    return WeightedDigraph.from_arrays(g.labels, src, dst, np.ones(m))


@dataclass(frozen=True)
class NullEnsemble:
    """Per-class null concentrations, one row per successful replicate."""

    table: ClassTable
    concentrations: np.ndarray  # (replicates, n_classes), percent
    n_requested: int
    n_failed: int


def build_ensemble(
    g: WeightedDigraph,
    sampler_cfg: SamplerConfig,
    ensemble_cfg: EnsembleConfig,
    table: ClassTable | None = None,
    use_numba: bool | None = None,
) -> NullEnsemble:
    """Randomize, re-census and record concentrations n_random times."""
    if table is None:
        table = get_class_table(sampler_cfg.k)
    rows = []
    failed = 0
    for r in range(ensemble_cfg.n_random):
        try:
            rand_graph = edge_switch_randomize(g, ensemble_cfg, r, use_numba)
            sample_seed = rng.derive_seed(ensemble_cfg.seed, _TAG_SAMPLE, r)
            result = census(
                rand_graph, sampler_cfg.with_seed(sample_seed), table, use_numba
            )
        except Exception:
            log.exception("null-model replicate %d failed", r)
            failed += 1
            continue
        rows.append(result.concentrations())
    if failed > ensemble_cfg.n_random * 0.1:
        raise EnsembleError(
            f"{failed}/{ensemble_cfg.n_random} null replicates failed (>10%)"
        )
    conc = np.vstack(rows) if rows else np.zeros((0, len(table)))
    return NullEnsemble(table, conc, ensemble_cfg.n_random, failed)


def significance(real: CensusResult, ensemble: NullEnsemble) -> list[MotifStats]:
    """Compare real concentrations against the null ensemble, per class.

    z uses the sample standard deviation and is undefined (None) when the
    null variance is zero. Both statistics are computed on concentrations,
    matching what the ensemble records.
    """
    if ensemble.concentrations.shape[0] == 0:
        raise EnsembleError("null ensemble has no successful replicates")
    if real.table is not ensemble.table and real.table.k != ensemble.table.k:
        raise ValueError("census and ensemble use different class tables")
    real_conc = real.concentrations()
    null = ensemble.concentrations
    n_rep = null.shape[0]
    stats = []
    for idx, cls in enumerate(real.table.classes):
        col = null[:, idx]
        mean = float(col.mean())
        std = float(col.std(ddof=1)) if n_rep > 1 else 0.0
        rc = float(real_conc[idx])
        z = (rc - mean) / std if std > 0 else None
        p = (int(np.count_nonzero(col >= rc)) + 1) / (n_rep + 1)
        stats.append(
            MotifStats(
                motif=cls,
                real_count=int(real.counts[idx]),
                concentration=rc,
                null_mean=mean,
                null_std=std,
                z_score=z,
                p_value=p,
            )
        )
    return stats
