from __future__ import annotations

import numpy as np
import pytest

from trademotifs import build_graph, exclusive_neighborhood
from trademotifs.errors import EmptyGraphError

from conftest import random_digraph


def test_single_record():
    g = build_graph([("US", "CN", 100.0)])
    assert g.n == 2
    assert g.edge_count == 1
    assert g.labels == ("US", "CN")
    assert list(g.edges()) == [(0, 1, 100.0)]


def test_duplicate_pairs_merge_by_sum():
    g = build_graph([("A", "B", 10.0), ("A", "B", 5.0)])
    assert g.edge_count == 1
    assert g.edge_weight[0] == 15.0


def test_self_loops_dropped_and_counted():
    g = build_graph([("A", "A", 7.0)])
    assert g.edge_count == 0
    assert g.self_loops_dropped == 1
    assert g.labels == ("A",)


def test_empty_input_raises():
    with pytest.raises(EmptyGraphError):
        build_graph([])


def test_negative_weight_rejected():
    with pytest.raises(ValueError):
        build_graph([("A", "B", -1.0)])


def test_first_seen_order_and_determinism():
    records = [("C", "A", 1.0), ("B", "C", 2.0), ("A", "B", 3.0)]
    g1 = build_graph(records)
    g2 = build_graph(records)
    assert g1.labels == ("C", "A", "B")
    assert np.array_equal(g1.edge_src, g2.edge_src)
    assert np.array_equal(g1.edge_dst, g2.edge_dst)
    assert np.array_equal(g1.edge_weight, g2.edge_weight)
    u1, v1 = g1.und_csr
    u2, v2 = g2.und_csr
    assert np.array_equal(u1, u2) and np.array_equal(v1, v2)


def test_degree_sums_match_edge_count():
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = random_digraph(rng, int(rng.integers(3, 20)), 0.3)
        out, into = g.degree_vectors()
        assert out.sum() == g.edge_count
        assert into.sum() == g.edge_count


def test_undirected_adjacency_symmetry():
    rng = np.random.default_rng(1)
    for _ in range(20):
        g = random_digraph(rng, int(rng.integers(3, 15)), 0.4)
        for v in range(g.n):
            for u in g.neighbors(v):
                assert v in g.neighbors(int(u))


def test_undirected_adjacency_sorted_no_duplicates():
    rng = np.random.default_rng(2)
    g = random_digraph(rng, 12, 0.5)
    for v in range(g.n):
        nbrs = g.neighbors(v)
        assert np.all(np.diff(nbrs) > 0)
        assert v not in nbrs


def test_exclusive_neighborhood_path():
    # path a-b-c: everything adjacent to {a} is excluded for w=c
    g = build_graph([("a", "b", 1.0), ("b", "c", 1.0)])
    a, b, c = 0, 1, 2
    assert exclusive_neighborhood(g, c, {a}) == set()


def test_exclusive_neighborhood_star():
    g = build_graph([("s", "x", 1.0), ("s", "y", 1.0), ("s", "z", 1.0)])
    s, x, y, z = 0, 1, 2, 3
    assert exclusive_neighborhood(g, x, {y}) == set()


def test_exclusive_neighborhood_disjoint_edges():
    g = build_graph([("a", "b", 1.0), ("c", "d", 1.0)])
    a, b, c, d = 0, 1, 2, 3
    assert exclusive_neighborhood(g, c, {a}) == {d}


def test_exclusive_neighborhood_rejects_member():
    g = build_graph([("a", "b", 1.0)])
    with pytest.raises(ValueError):
        exclusive_neighborhood(g, 0, {0, 1})


def test_exclusive_neighborhood_disjoint_from_closed_neighborhood():
    rng = np.random.default_rng(3)
    for _ in range(30):
        g = random_digraph(rng, int(rng.integers(4, 15)), 0.35)
        nodes = list(range(g.n))
        v_sub = set(rng.choice(nodes, size=min(3, g.n - 1), replace=False).tolist())
        w = next(u for u in nodes if u not in v_sub)
        closed = set(v_sub)
        for v in v_sub:
            closed.update(int(u) for u in g.neighbors(v))
        assert exclusive_neighborhood(g, w, v_sub).isdisjoint(closed)


def test_has_edge():
    g = build_graph([("a", "b", 1.0), ("b", "c", 2.0)])
    assert g.has_edge(0, 1)
    assert not g.has_edge(1, 0)
    assert not g.has_edge(0, 2)
