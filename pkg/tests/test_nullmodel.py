from __future__ import annotations

import numpy as np
import pytest

from trademotifs import (
    CensusResult,
    EnsembleConfig,
    SamplerConfig,
    build_ensemble,
    build_graph,
    census,
    edge_switch_randomize,
    get_class_table,
    significance,
)
from trademotifs import nullmodel
from trademotifs.errors import EnsembleError
from trademotifs.nullmodel import NullEnsemble

from conftest import random_digraph


def assert_simple(g) -> None:
    pairs = list(zip(g.edge_src.tolist(), g.edge_dst.tolist()))
    assert len(pairs) == len(set(pairs)), "duplicate directed edge"
    assert all(s != d for s, d in pairs), "self-loop"


def test_two_disjoint_edges_switch_to_the_crossed_state():
    g = build_graph([("1", "2", 9.0), ("3", "4", 9.0)])
    cfg = EnsembleConfig(n_random=1, switches_per_edge=50, seed=0)
    seen = set()
    for rep in range(10):
        rand = edge_switch_randomize(g, cfg, replicate=rep)
        labels = frozenset(
            (rand.labels[s], rand.labels[d]) for s, d, _ in rand.edges()
        )
        seen.add(labels)
        out0, in0 = g.degree_vectors()
        out1, in1 = rand.degree_vectors()
        assert np.array_equal(out0, out1) and np.array_equal(in0, in1)
    expected = {
        frozenset({("1", "2"), ("3", "4")}),
        frozenset({("1", "4"), ("3", "2")}),
    }
    assert seen <= expected
    assert len(seen) == 2  # both states reachable across replicates


def test_shared_source_pair_never_switches():
    g = build_graph([("1", "2", 1.0), ("1", "3", 1.0)])
    cfg = EnsembleConfig(n_random=1, switches_per_edge=200, seed=4)
    rand = edge_switch_randomize(g, cfg)
    assert set(rand.to_records()) == {("1", "2", 1.0), ("1", "3", 1.0)}


def test_weights_discarded():
    g = build_graph([("a", "b", 123.0), ("c", "d", 7.0)])
    rand = edge_switch_randomize(g, EnsembleConfig(n_random=1, seed=1))
    assert set(rand.edge_weight.tolist()) == {1.0}


def test_degree_sequences_and_simplicity_preserved():
    rng = np.random.default_rng(50)
    for trial in range(20):
        g = random_digraph(rng, int(rng.integers(8, 30)), 0.25)
        cfg = EnsembleConfig(n_random=1, switches_per_edge=50, seed=trial)
        for rep in range(10):
            rand = edge_switch_randomize(g, cfg, replicate=rep)
            assert rand.edge_count == g.edge_count
            o0, i0 = g.degree_vectors()
            o1, i1 = rand.degree_vectors()
            assert np.array_equal(o0, o1)
            assert np.array_equal(i0, i1)
            assert_simple(rand)


def test_single_edge_graph_returns_copy():
    g = build_graph([("a", "b", 2.0)])
    rand = edge_switch_randomize(g, EnsembleConfig(n_random=1, seed=0))
    assert rand.to_records() == [("a", "b", 1.0)]


def test_null_mean_matches_independent_randomizer():
    """Cross-check the switching null against networkx's directed_edge_swap."""
    nx = pytest.importorskip("networkx")
    rng = np.random.default_rng(51)
    g = random_digraph(rng, 18, 0.2)
    table = get_class_table(3)
    sampler = SamplerConfig.full(3)
    reps = 120

    ours = build_ensemble(g, sampler, EnsembleConfig(reps, 30, seed=7), table)
    assert ours.n_failed == 0

    theirs = np.zeros((reps, len(table)))
    for r in range(reps):
        ng = nx.DiGraph()
        ng.add_nodes_from(range(g.n))
        ng.add_edges_from(zip(g.edge_src.tolist(), g.edge_dst.tolist()))
        nx.directed_edge_swap(
            ng, nswap=30 * g.edge_count, max_tries=3000 * g.edge_count, seed=r
        )
        rand = build_graph([(str(a), str(b), 1.0) for a, b in ng.edges()])
        res = census(rand, sampler, table)
        theirs[r] = res.concentrations()

    for idx in range(len(table)):
        a, b = ours.concentrations[:, idx], theirs[:, idx]
        se = np.sqrt(a.var(ddof=1) / reps + b.var(ddof=1) / reps)
        if se == 0:
            assert a.mean() == b.mean()
        else:
            assert abs(a.mean() - b.mean()) <= 4 * se, table.classes[idx]


def test_rigid_cycle_null_equals_real():
    # the directed 3-cycle admits no valid switch: null == real exactly
    g = build_graph([("1", "2", 1.0), ("2", "3", 1.0), ("3", "1", 1.0)])
    sampler = SamplerConfig.full(3)
    real = census(g, sampler)
    ens = build_ensemble(g, sampler, EnsembleConfig(n_random=1, switches_per_edge=500, seed=3))
    assert np.array_equal(ens.concentrations[0], real.concentrations())


def test_ensemble_failure_threshold(monkeypatch):
    g = build_graph([("1", "2", 1.0), ("2", "3", 1.0), ("3", "1", 1.0)])
    sampler = SamplerConfig.full(3)
    calls = {"n": 0}
    real_census = nullmodel.census

    def flaky(*args, **kwargs):
        calls["n"] += 1
        if calls["n"] % 2 == 0:
            raise RuntimeError("boom")
        return real_census(*args, **kwargs)

    monkeypatch.setattr(nullmodel, "census", flaky)
    with pytest.raises(EnsembleError):
        build_ensemble(g, sampler, EnsembleConfig(n_random=10, switches_per_edge=2, seed=0))


def test_ensemble_is_deterministic():
    rng = np.random.default_rng(52)
    g = random_digraph(rng, 15, 0.3)
    sampler = SamplerConfig.from_fraction(3, 0.8, seed=5)
    cfg = EnsembleConfig(n_random=20, switches_per_edge=20, seed=11)
    a = build_ensemble(g, sampler, cfg)
    b = build_ensemble(g, sampler, cfg)
    assert np.array_equal(a.concentrations, b.concentrations)


def test_significance_hand_case():
    # null concentrations 2%, 4%, 6%; real 6% -> z = 1, p = 0.5
    table = get_class_table(3)
    null = np.zeros((3, len(table)))
    null[:, 0] = [2.0, 4.0, 6.0]
    # craft counts so class 0 concentration is 6%
    counts = np.zeros(len(table), dtype=np.int64)
    counts[0] = 6
    counts[1] = 94
    real = CensusResult(table, counts, q=1.0)
    stats = significance(real, NullEnsemble(table, null, 3, 0))
    s = stats[0]
    assert s.concentration == pytest.approx(6.0)
    assert s.null_mean == pytest.approx(4.0)
    assert s.null_std == pytest.approx(2.0)
    assert s.z_score == pytest.approx(1.0)
    assert s.p_value == pytest.approx(0.5)


def test_significance_zero_variance():
    table = get_class_table(3)
    counts = np.zeros(len(table), dtype=np.int64)
    counts[0] = 5
    counts[1] = 95
    real = CensusResult(table, counts, q=1.0)
    null = np.zeros((4, len(table)))
    null[:, 0] = 5.0  # equals real concentration in every replicate
    null[:, 1] = 95.0
    stats = significance(real, NullEnsemble(table, null, 4, 0))
    assert stats[0].z_score is None
    assert stats[0].p_value == 1.0


def test_p_value_never_zero_or_above_one():
    rng = np.random.default_rng(53)
    g = random_digraph(rng, 14, 0.35)
    sampler = SamplerConfig.full(3)
    real = census(g, sampler)
    ens = build_ensemble(g, sampler, EnsembleConfig(n_random=30, switches_per_edge=20, seed=9))
    for s in significance(real, ens):
        assert 0.0 < s.p_value <= 1.0


def test_concentrations_sum_to_100_per_replicate():
    rng = np.random.default_rng(54)
    g = random_digraph(rng, 16, 0.3)
    ens = build_ensemble(
        g, SamplerConfig.full(3), EnsembleConfig(n_random=10, switches_per_edge=10, seed=2)
    )
    sums = ens.concentrations.sum(axis=1)
    assert np.allclose(sums, 100.0)
