import csv
import io
import random

import pytest

from localcluster import NodeSet, SparseVector, conductance, sweep_cut
from localcluster.sweep import profile_rows, write_profile_csv

from conftest import random_small_graph, random_sparse_q


def test_barbell_profile(barbell):
    p = SparseVector({0: 0.5, 1: 0.3, 2: 0.2})
    prof = sweep_cut(barbell, p)
    assert prof.order == [0, 1, 2]
    assert prof.prefix_volumes == [2, 4, 7]
    assert prof.prefix_conductance == [1.0, 0.5, 1.0 / 7.0]
    assert prof.best_index == 2
    assert prof.best_set.members == (0, 1, 2)
    assert prof.best_conductance == 1.0 / 7.0


def test_single_node_support(k4):
    prof = sweep_cut(k4, SparseVector({0: 1.0}))
    assert prof.order == [0]
    assert prof.prefix_conductance == [1.0]
    assert prof.best_set.members == (0,)


def test_full_support_skips_whole_graph(triangle):
    prof = sweep_cut(triangle, SparseVector({0: 1.0, 1: 1.0, 2: 1.0}))
    # ties resolve to lower ids; the vol == vol(G) prefix is not a cut
    assert prof.order == [0, 1, 2]
    assert len(prof.prefix_conductance) == 2
    assert prof.prefix_conductance == [1.0, 1.0]
    assert prof.best_index == 0
    assert prof.best_set.members == (0,)


def test_tie_breaks_to_lower_id(k4):
    prof = sweep_cut(k4, SparseVector({2: 0.5, 1: 0.5}))
    assert prof.order == [1, 2]


def test_rejects_bad_vectors(triangle):
    with pytest.raises(ValueError):
        sweep_cut(triangle, SparseVector({0: -0.1, 1: 0.5}))
    with pytest.raises(ValueError):
        sweep_cut(triangle, SparseVector())
    with pytest.raises(ValueError):
        sweep_cut(triangle, SparseVector({0: 0.0}))
    with pytest.raises(ValueError):
        sweep_cut(triangle, SparseVector({7: 0.5}))


def test_prefix_conductance_matches_from_scratch():
    rng = random.Random(311)
    for _ in range(25):
        g = random_small_graph(rng, 8, 40)
        p = random_sparse_q(rng, g, density=0.4)
        prof = sweep_cut(g, p)
        for j, cond in enumerate(prof.prefix_conductance):
            prefix = NodeSet.from_nodes(g, prof.order[: j + 1])
            assert cond == conductance(g, prefix)
            assert prof.prefix_volumes[j] == prefix.volume
        assert prof.best_conductance == min(prof.prefix_conductance)
        assert prof.prefix_conductance.index(prof.best_conductance) == prof.best_index
        assert prof.best_set.members == tuple(sorted(prof.order[: prof.best_index + 1]))


def test_power_of_two_scaling_is_invariant():
    # conductances depend only on the ordering; scaling by 4 is exact in
    # binary floating point, so even tied ratios stay tied
    rng = random.Random(313)
    g = random_small_graph(rng, 12, 40)
    p = random_sparse_q(rng, g, density=0.5)
    scaled = SparseVector({i: 4.0 * v for i, v in p.entries.items()})
    a, b = sweep_cut(g, p), sweep_cut(g, scaled)
    assert a.order == b.order
    assert a.prefix_conductance == b.prefix_conductance
    assert a.best_index == b.best_index


def test_profile_rows_and_csv(barbell):
    p = SparseVector({0: 0.5, 1: 0.3, 2: 0.2})
    prof = sweep_cut(barbell, p)
    rows = profile_rows(barbell, p, prof)
    assert [r["rank"] for r in rows] == [1, 2, 3]
    assert [r["node_id_original"] for r in rows] == [0, 1, 2]
    assert rows[0]["p_over_d"] == 0.25
    assert [r["prefix_volume"] for r in rows] == [2, 4, 7]

    buf = io.StringIO()
    write_profile_csv(barbell, p, prof, buf)
    parsed = list(csv.reader(io.StringIO(buf.getvalue())))
    assert parsed[0] == ["rank", "node_id_original", "p_over_d", "prefix_volume", "prefix_conductance"]
    assert len(parsed) == 4
    # repr round-trips the floats exactly
    assert [float(r[4]) for r in parsed[1:]] == prof.prefix_conductance


def test_original_labels_in_rows():
    g_rows = [(100, 300), (300, 200), (100, 200)]
    from localcluster import graph_from_edges

    g = graph_from_edges(g_rows)
    p = SparseVector({g.index_of(300): 0.9, g.index_of(100): 0.1})
    prof = sweep_cut(g, p)
    rows = profile_rows(g, p, prof)
    assert [r["node_id_original"] for r in rows] == [300, 100]
