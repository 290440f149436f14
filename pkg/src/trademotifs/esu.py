"""Exact ESU enumeration and unbiased RAND-ESU sampling of size-k subgraphs.

The enumeration grows each connected subgraph from its minimum-index node:
extension candidates must have a larger index than the root, and a node's
new neighbors exclude everything already adjacent to the current subgraph,
which guarantees each subgraph is emitted exactly once. Connectivity is
judged on undirected adjacency; the directed structure is recovered from
the induced edge bitmask afterwards.

Sampling gates each expansion to subgraph size d with probability
``depth_probs[d-1]``, independently, so every leaf of the enumeration tree
is reached with probability q = prod(depth_probs) and observed_count / q
estimates the exact total without bias. Extension sets are iterated in
ascending node order and each root draws from its own seeded substream,
making sampled output reproducible regardless of worker count.

The streaming generators below are the pure-Python reference (and fallback
backend); :func:`census` dispatches per-class counting to the jitted
kernel when enabled.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import prod
from typing import Iterator

import numpy as np

from . import kernels, rng
from .classify import ClassTable, MotifClass, bit_position, get_class_table
from .graph_core import WeightedDigraph


@dataclass(frozen=True)
class SubgraphOccurrence:
    """One connected induced size-k subgraph.

    nodes is strictly increasing; edge_mask holds the induced directed
    edges as the row-major k*k adjacency code of the sorted nodes.
    """

    nodes: tuple[int, ...]
    edge_mask: int


@dataclass(frozen=True)
class SamplerConfig:
    """RAND-ESU parameters: k, per-depth probabilities, stream seed."""

    k: int = 3
    depth_probs: tuple[float, ...] = (1.0, 1.0, 1.0)
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("subgraph size k must be >= 2")
        if len(self.depth_probs) != self.k:
            raise ValueError(
                f"need {self.k} depth probabilities, got {len(self.depth_probs)}"
            )
        for p in self.depth_probs:
            if not 0.0 < p <= 1.0:
                raise ValueError(f"depth probability {p} outside (0, 1]")

    @property
    def q(self) -> float:
        """Overall leaf-sampling fraction."""
        return prod(self.depth_probs)

    @classmethod
    def full(cls, k: int) -> "SamplerConfig":
        return cls(k=k, depth_probs=(1.0,) * k)

    @classmethod
    def from_fraction(cls, k: int, q: float, seed: int = 0) -> "SamplerConfig":
        """All probability mass on the last depth: p_d = 1 for d < k, p_k = q."""
        return cls(k=k, depth_probs=(1.0,) * (k - 1) + (float(q),), seed=seed)

    def with_seed(self, seed: int) -> "SamplerConfig":
        return replace(self, seed=seed)


def _stream(
    g: WeightedDigraph, k: int, probs: tuple[float, ...], seed: int
) -> Iterator[SubgraphOccurrence]:
    """Iterative ESU walk; mirrors the jitted kernel step for step.

    The RNG draw points (and therefore the sampled leaf set for a given
    seed) are identical to the kernel's: one draw per gate with
    probability < 1, in DFS order.
    """
    n = g.n
    if n == 0 or k > n:
        return
    indptr, indices = g.und_csr
    adj_list = [
        [int(u) for u in indices[indptr[v] : indptr[v + 1]]] for v in range(n)
    ]
    edge_set = {(int(s), int(d)) for s, d in zip(g.edge_src, g.edge_dst)}

    sub = [0] * k
    ext: list[list[int]] = [[] for _ in range(k)]
    epos = [0] * k
    newly: list[list[int]] = [[] for _ in range(k)]

    for v in range(n):
        state = rng.substream(seed, v)
        if probs[0] < 1.0:
            state, z = rng.sm_next(state)
            if rng.unit(z) >= probs[0]:
                continue

        mark = bytearray(n)
        mark[v] = 1
        ext0 = []
        for u in adj_list[v]:
            if u > v:
                mark[u] = 1
                ext0.append(u)
        sub[0] = v
        ext[0] = ext0
        epos[0] = 0
        level = 0

        while True:
            if epos[level] < len(ext[level]):
                w = ext[level][epos[level]]
                epos[level] += 1
                pd = probs[level + 1]
                if pd < 1.0:
                    state, z = rng.sm_next(state)
                    if rng.unit(z) >= pd:
                        continue
                if level + 2 == k:
                    nodes = sorted(sub[: k - 1] + [w])
                    code = 0
                    for i, a in enumerate(nodes):
                        for j, b in enumerate(nodes):
                            if i != j and (a, b) in edge_set:
                                code |= 1 << bit_position(i, j, k)
                    yield SubgraphOccurrence(tuple(nodes), code)
                    continue
                sub[level + 1] = w
                new = []
                for u in adj_list[w]:
                    if u > v and not mark[u]:
                        mark[u] = 1
                        new.append(u)
                newly[level + 1] = new
                remaining = ext[level][epos[level] :]
                merged = []
                a = b = 0
                while a < len(remaining) and b < len(new):
                    if remaining[a] < new[b]:
                        merged.append(remaining[a])
                        a += 1
                    else:
                        merged.append(new[b])
                        b += 1
                merged.extend(remaining[a:])
                merged.extend(new[b:])
                level += 1
                ext[level] = merged
                epos[level] = 0
            else:
                if level == 0:
                    break
                for u in newly[level]:
                    mark[u] = 0
                level -= 1


def esu_enumerate(g: WeightedDigraph, k: int) -> Iterator[SubgraphOccurrence]:
    """Enumerate every connected size-k subgraph exactly once."""
    if k < 2:
        raise ValueError("subgraph size k must be >= 2")
    return _stream(g, k, (1.0,) * k, 0)


def rand_esu_sample(g: WeightedDigraph, cfg: SamplerConfig) -> Iterator[SubgraphOccurrence]:
    """Sample subgraphs; each is emitted with probability cfg.q."""
    return _stream(g, cfg.k, cfg.depth_probs, cfg.seed)


def estimate_total(observed: int, cfg: SamplerConfig) -> float:
    """Unbiased estimate of the exact subgraph count from a sampled one."""
    return observed / cfg.q


def count_by_class(
    occurrences: Iterator[SubgraphOccurrence] | list[SubgraphOccurrence],
    table: ClassTable,
) -> dict[MotifClass, int]:
    """F1 frequency per isomorphism class (occurrences may overlap freely)."""
    counts: dict[MotifClass, int] = {}
    for occ in occurrences:
        cls = table.lookup(occ.edge_mask)
        if cls is None:  # cannot happen for ESU output; guards bad input
            raise ValueError(f"occurrence mask {occ.edge_mask} is not connected")
        counts[cls] = counts.get(cls, 0) + 1
    return counts


@dataclass(frozen=True)
class CensusResult:
    """Per-class counts for one enumeration/sampling run."""

    table: ClassTable
    counts: np.ndarray  # int64, aligned with table.classes
    q: float

    @property
    def total(self) -> int:
        """Observed connected size-k subgraphs."""
        return int(self.counts.sum())

    @property
    def estimated_total(self) -> float:
        return self.total / self.q

    def concentrations(self) -> np.ndarray:
        """Percentage share of each class among all observed occurrences."""
        total = self.total
        if total == 0:
            return np.zeros(len(self.table), dtype=np.float64)
        return 100.0 * self.counts / total

    def by_canonical(self) -> dict[int, int]:
        return {
            cls.canonical_id: int(c)
            for cls, c in zip(self.table.classes, self.counts)
        }


def census(
    g: WeightedDigraph,
    cfg: SamplerConfig,
    table: ClassTable | None = None,
    use_numba: bool | None = None,
) -> CensusResult:
    """Count size-k subgraphs per class, exactly (q=1) or by sampling.

    Dispatches to the jitted kernel unless disabled; both backends return
    identical counts for identical (graph, cfg).
    """
    if table is None:
        table = get_class_table(cfg.k)
    if table.k != cfg.k:
        raise ValueError(f"class table is for k={table.k}, sampler for k={cfg.k}")
    counts = np.zeros(len(table), dtype=np.int64)
    if g.n == 0 or g.edge_count == 0 or cfg.k > g.n:
        return CensusResult(table, counts, cfg.q)

    if kernels.resolve_backend(use_numba):
        indptr, indices = g.und_csr
        per_root = np.zeros((g.n, len(table)), dtype=np.int64)
        probs = np.asarray(cfg.depth_probs, dtype=np.float64)
        kernels.census_kernel(
            indptr,
            indices,
            g.dense_adjacency,
            cfg.k,
            table.code_to_index,
            probs,
            np.uint64(cfg.seed & (1 << 64) - 1),
            per_root,
        )
        counts = per_root.sum(axis=0)
    else:
        for occ in rand_esu_sample(g, cfg):
            counts[table.index_of_code(occ.edge_mask)] += 1
    return CensusResult(table, counts, cfg.q)
