"""Immutable weighted directed graph with the index structures ESU needs.

Nodes are dense integers 0..n-1 assigned in first-seen order of the input
records; the original country/partner code survives as a label string and
the index↔label mapping is a bijection. Edges are simple (no self-loops,
one edge per ordered pair) with non-negative float weights in US dollars.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import EmptyGraphError

log = logging.getLogger(__name__)

# Dense adjacency is capped so n*n stays within int32 indexing; country-scale
# networks (a few hundred nodes) are far below this.
_DENSE_NODE_LIMIT = 46340


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR (indptr, indices) with each neighbor run sorted ascending."""
    order = np.lexsort((dst, src))
    s, d = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, s + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, d.astype(np.int64)


@dataclass(frozen=True)
class WeightedDigraph:
    """Simple weighted digraph; immutable after construction.

    Edge arrays are parallel and sorted by (src, dst), which fixes every
    derived structure and makes rebuilding from the same records
    deterministic. Safe for concurrent reads.
    """

    labels: tuple[str, ...]
    edge_src: np.ndarray = field(repr=False)
    edge_dst: np.ndarray = field(repr=False)
    edge_weight: np.ndarray = field(repr=False)
    self_loops_dropped: int = 0

    @classmethod
    def from_arrays(
        cls,
        labels: Sequence[str],
        src: np.ndarray,
        dst: np.ndarray,
        weight: np.ndarray,
        self_loops_dropped: int = 0,
    ) -> "WeightedDigraph":
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        weight = np.asarray(weight, dtype=np.float64)
        order = np.lexsort((dst, src))
        src, dst, weight = src[order], dst[order], weight[order]
        for arr in (src, dst, weight):
            arr.setflags(write=False)
        return cls(tuple(labels), src, dst, weight, self_loops_dropped)

    @classmethod
    def empty(cls) -> "WeightedDigraph":
        z = np.zeros(0, dtype=np.int64)
        return cls.from_arrays((), z, z, np.zeros(0))

    # -- basic shape --------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return int(self.edge_src.shape[0])

    @cached_property
    def label_index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    # -- adjacency indexes --------------------------------------------

    @cached_property
    def out_csr(self) -> tuple[np.ndarray, np.ndarray]:
        return _csr(self.n, self.edge_src, self.edge_dst)

    @cached_property
    def in_csr(self) -> tuple[np.ndarray, np.ndarray]:
        return _csr(self.n, self.edge_dst, self.edge_src)

    @cached_property
    def und_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Undirected neighborhood index: union of in/out, deduplicated."""
        if self.edge_count == 0:
            return np.zeros(self.n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
        a = np.concatenate([self.edge_src, self.edge_dst])
        b = np.concatenate([self.edge_dst, self.edge_src])
        pair = np.unique(a * np.int64(self.n) + b)
        return _csr(self.n, pair // self.n, pair % self.n)

    @cached_property
    def dense_adjacency(self) -> np.ndarray:
        """Directed 0/1 matrix, uint8; used by the hot kernels."""
        if self.n > _DENSE_NODE_LIMIT:
            raise MemoryError(
                f"dense adjacency for n={self.n} exceeds the supported size"
            )
        adj = np.zeros((self.n, self.n), dtype=np.uint8)
        adj[self.edge_src, self.edge_dst] = 1
        adj.setflags(write=False)
        return adj

    def out_neighbors(self, v: int) -> np.ndarray:
        indptr, indices = self.out_csr
        return indices[indptr[v] : indptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        indptr, indices = self.in_csr
        return indices[indptr[v] : indptr[v + 1]]

    def neighbors(self, v: int) -> np.ndarray:
        """Undirected neighborhood (sorted, no duplicates)."""
        indptr, indices = self.und_csr
        return indices[indptr[v] : indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.out_neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < len(nbrs) and nbrs[i] == v)

    def edges(self) -> Iterator[tuple[int, int, float]]:
        for s, d, w in zip(self.edge_src, self.edge_dst, self.edge_weight):
            yield int(s), int(d), float(w)

    def to_records(self) -> list[tuple[str, str, float]]:
        """Edge list with labels, in canonical (src, dst) order."""
        return [(self.labels[s], self.labels[d], w) for s, d, w in self.edges()]

    def degree_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """(out_degree, in_degree) per node."""
        out = np.bincount(self.edge_src, minlength=self.n)
        into = np.bincount(self.edge_dst, minlength=self.n)
        return out, into


def build_graph(records: Iterable[tuple[str, str, float]]) -> WeightedDigraph:
    """Build a graph from (src_label, dst_label, weight) records.

    Node ids are assigned densely in first-seen order (src then dst per
    record). Duplicate ordered pairs merge by summing weight; self-loop
    records are dropped, counted and reported via a warning.
    """
    records = list(records)
    if not records:
        raise EmptyGraphError("no records: cannot build a graph")

    index: dict[str, int] = {}
    merged: dict[tuple[int, int], float] = {}
    self_loops = 0
    for src_label, dst_label, weight in records:
        if weight < 0:
            raise ValueError(f"negative weight {weight} for {src_label}->{dst_label}")
        s = index.setdefault(src_label, len(index))
        d = index.setdefault(dst_label, len(index))
        if s == d:
            self_loops += 1
            continue
        key = (s, d)
        merged[key] = merged.get(key, 0.0) + float(weight)

    if self_loops:
        log.warning("dropped %d self-loop record(s)", self_loops)

    labels = tuple(index)
    if merged:
        src = np.fromiter((k[0] for k in merged), dtype=np.int64, count=len(merged))
        dst = np.fromiter((k[1] for k in merged), dtype=np.int64, count=len(merged))
        w = np.fromiter(merged.values(), dtype=np.float64, count=len(merged))
    else:
        src = dst = np.zeros(0, dtype=np.int64)
        w = np.zeros(0)
    return WeightedDigraph.from_arrays(labels, src, dst, w, self_loops)


def exclusive_neighborhood(
    g: WeightedDigraph, w: int, v_sub: Iterable[int]
) -> set[int]:
    """N(w) minus the closed neighborhood of v_sub (undirected adjacency).

    Returns the neighbors of ``w`` that are neither in ``v_sub`` nor
    adjacent to any of its members.
    """
    v_sub = set(v_sub)
    if w in v_sub:
        raise ValueError(f"node {w} is already in the subgraph set")
    closed = set(v_sub)
    for v in v_sub:
        closed.update(int(u) for u in g.neighbors(v))
    return {int(u) for u in g.neighbors(w)} - closed
