"""Tests for bipartite graphs and their spectra."""

import math

import numpy as np
import pytest

from nmds_expander.graph import (
    BadParameters,
    BipartiteGraph,
    GraphError,
    build_graph,
    edge_views,
    gamma,
    is_ramanujan,
    load_graph,
    ramanujan_bound,
    ramanujan_gamma_bound,
    save_graph,
)


def test_complete():
    g = build_graph("complete", 3, 3)
    assert g.adjacency == ((0, 1, 2),) * 3
    assert g.num_edges == 9


def test_complete_needs_delta_n():
    with pytest.raises(BadParameters):
        build_graph("complete", 3, 2)


def test_cycle():
    g = build_graph("cycle", 4, 2)
    assert g.adjacency == ((0, 1), (1, 2), (2, 3), (3, 0))
    assert g.is_connected()


def test_cycle_needs_delta_2():
    with pytest.raises(BadParameters):
        build_graph("cycle", 4, 3)


def test_unknown_kind():
    with pytest.raises(BadParameters):
        build_graph("petersen", 4, 2)


def test_random_regular_seeded():
    a = build_graph("random_regular", 8, 4, seed=11)
    b = build_graph("random_regular", 8, 4, seed=11)
    assert a.adjacency == b.adjacency
    assert a.is_connected()


def test_random_regular_degrees():
    for seed in range(20):
        g = build_graph("random_regular", 8, 4, seed=seed)
        assert all(len(row) == 4 for row in g.adjacency)
        assert np.bincount(g.right_endpoints, minlength=8).tolist() == [4] * 8


def test_bad_degree_rejected():
    with pytest.raises(BadParameters):
        BipartiteGraph(2, 2, ((0, 0), (0, 1)))


def test_edge_indexing():
    g = build_graph("cycle", 4, 2)
    assert g.edge(5) == (2, 3)
    assert g.edge_index(2, 1) == 5


def test_edge_views_k22():
    g = build_graph("complete", 2, 2)
    left, right = edge_views(g)
    assert left == ((0, 1), (2, 3))
    assert right[0] == (0, 2)
    assert right[1] == (1, 3)


def test_edge_views_partition():
    g = build_graph("random_regular", 10, 3, seed=4)
    left, right = edge_views(g)
    assert sorted(e for edges in left for e in edges) == list(range(g.num_edges))
    assert sorted(e for edges in right for e in edges) == list(range(g.num_edges))
    assert all(list(edges) == sorted(edges) for edges in right)


def test_right_position():
    g = build_graph("random_regular", 6, 3, seed=2)
    for edges in g.right_edges:
        assert [int(g.right_position[e]) for e in edges] == [0, 1, 2]


def test_gamma_complete():
    info = gamma(build_graph("complete", 3, 3))
    assert info.lambda1 == pytest.approx(3)
    assert info.lambda2 == 0.0
    assert info.gamma == 0.0


def test_gamma_cycle():
    info = gamma(build_graph("cycle", 4, 2))
    assert info.gamma == pytest.approx(math.cos(math.pi / 4), abs=1e-9)


def test_lambda1_is_degree():
    for seed in range(5):
        g = build_graph("random_regular", 12, 3, seed=seed)
        assert gamma(g).lambda1 == pytest.approx(3)


def test_eigenvalues_sum_to_zero():
    info = gamma(build_graph("random_regular", 16, 5, seed=9))
    assert abs(sum(info.eigenvalues)) < 1e-6


def test_ramanujan():
    assert is_ramanujan(build_graph("complete", 3, 3))
    assert is_ramanujan(build_graph("cycle", 4, 2))


def test_ramanujan_bound_delta_4():
    assert ramanujan_bound(4) == pytest.approx(3.4641, abs=1e-4)
    assert ramanujan_gamma_bound(4) == pytest.approx(0.86603, abs=1e-5)


def test_networkx_view():
    g = build_graph("complete", 2, 2)
    nxg = g.to_networkx()
    assert nxg.number_of_nodes() == 4
    assert sorted(k for _, _, k in nxg.edges(keys=True)) == [0, 1, 2, 3]


def test_save_load(tmp_path):
    g = build_graph("random_regular", 6, 3, seed=1)
    path = tmp_path / "graph.json"
    save_graph(g, path)
    again = load_graph(path)
    assert again.adjacency == g.adjacency
    assert (again.n, again.delta) == (6, 3)


def test_load_missing(tmp_path):
    with pytest.raises(GraphError):
        load_graph(tmp_path / "nope.json")


def test_random_regular_delta_2_is_one_cycle():
    for seed in range(20):
        g = build_graph("random_regular", 64, 2, seed=seed)
        assert g.is_connected()
        assert gamma(g).lambda1 == pytest.approx(2)
