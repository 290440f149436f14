from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest

from trademotifs import WeightedDigraph, build_graph
from trademotifs.classify import bit_position


def random_digraph(rng: np.random.Generator, n: int, density: float) -> WeightedDigraph:
    """Simple random digraph with unit weights (may be sparse or empty)."""
    records = [
        (f"n{i}", f"n{j}", 1.0)
        for i in range(n)
        for j in range(n)
        if i != j and rng.random() < density
    ]
    if not records:
        records = [("n0", "n1", 1.0)]
    return build_graph(records)


def random_weighted_digraph(
    rng: np.random.Generator, n: int, density: float, tail: float = 0.0
) -> WeightedDigraph:
    """Random digraph with log-normal weights; `tail` fraction scaled 1e6."""
    records = []
    for i in range(n):
        for j in range(n):
            if i == j or rng.random() >= density:
                continue
            w = float(rng.lognormal(mean=10.0, sigma=1.0))
            if tail and rng.random() < tail:
                w *= 1e6
            records.append((f"n{i}", f"n{j}", w))
    if not records:
        records = [("n0", "n1", 5.0)]
    return build_graph(records)


def brute_force_occurrences(g: WeightedDigraph, k: int) -> set[tuple[tuple[int, ...], int]]:
    """Oracle: test every C(n,k) node subset for (weak) connectivity.

    Independent of the ESU implementation: connectivity via union-find over
    the subset, induced mask via direct edge lookups.
    """
    edge_set = {(int(s), int(d)) for s, d in zip(g.edge_src, g.edge_dst)}
    found = set()
    for subset in combinations(range(g.n), k):
        parent = list(range(k))

        def root(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        mask = 0
        for i in range(k):
            for j in range(k):
                if i != j and (subset[i], subset[j]) in edge_set:
                    mask |= 1 << bit_position(i, j, k)
                    parent[root(i)] = root(j)
        if len({root(i) for i in range(k)}) == 1:
            found.add((subset, mask))
    return found


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    """Pay the JIT compile once so timed tests measure the algorithms."""
    from trademotifs import kernels

    if kernels.HAVE_NUMBA:
        kernels.warmup()
