"""Level-synchronous BFS/SSSP/CC/PageRank drivers."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zcgraph import (AccessStrategy, CsrGraph, bfs, cc, generate_uniform,
                     pagerank, pick_sources, sssp, symmetrized,
                     with_uniform_weights)
from zcgraph.traversal import UNREACHED_DIST, UNREACHED_LEVEL

from reference import (bfs_levels, cc_min_labels, dijkstra_distances,
                       pagerank_dense, random_csr)


def chain(n):
    edges = np.arange(1, n, dtype=np.int64)
    offsets = np.concatenate([np.arange(n, dtype=np.int64), [n - 1]])
    return CsrGraph(n, n - 1, offsets, edges)


def undirected_path(n):
    return symmetrized(chain(n))


def star(leaves):
    n = leaves + 1
    edges = np.arange(1, n, dtype=np.int64)
    offsets = np.concatenate([[0], np.full(n, leaves, dtype=np.int64)])
    return symmetrized(CsrGraph(n, leaves, offsets, edges))


class TestBfs:
    def test_path_graph(self):
        r = bfs(undirected_path(4), 0)
        assert r.values.tolist() == [0, 1, 2, 3]
        assert r.iterations == 4
        assert len(r.per_iteration_traffic) == 4

    def test_star_two_iterations(self):
        r = bfs(star(6), 0)
        assert r.values.tolist() == [0] + [1] * 6
        assert r.iterations == 2

    def test_unreachable_is_minus_one(self):
        g = chain(3)
        r = bfs(g, 2)
        assert r.values.tolist() == [UNREACHED_LEVEL, UNREACHED_LEVEL, 0]

    def test_source_out_of_range(self):
        with pytest.raises(ValueError):
            bfs(chain(3), 3)

    def test_matches_queue_oracle_uniform(self):
        g = generate_uniform(1000, 16, 48, seed=7)
        src = int(pick_sources(g, 1)[0])
        r = bfs(g, src, collect_traffic=False)
        assert r.values.tolist() == bfs_levels(g, src)

    def test_traversed_edges_are_frontier_degree_sums(self):
        g = undirected_path(4)
        r = bfs(g, 0)
        assert r.traversed_edges == [1, 2, 2, 1]
        assert r.total_traversed_edges == g.num_edges

    def test_iterations_equal_max_level_plus_one(self):
        g = generate_uniform(300, 1, 5, seed=9)
        src = int(pick_sources(g, 1)[0])
        r = bfs(g, src, collect_traffic=False)
        assert r.iterations == int(r.values.max()) + 1

    def test_page_streams_per_iteration(self):
        r = bfs(undirected_path(4), 0, want_pages=True)
        assert r.page_streams is not None
        assert len(r.page_streams) == r.iterations


class TestSssp:
    def test_weighted_path(self):
        g = chain(3)
        g = CsrGraph(3, 2, g.offsets, g.edges, weights=np.array([5, 7]))
        r = sssp(g, 0)
        assert r.values.tolist() == [0, 5, 12]

    def test_two_hop_beats_direct_edge(self):
        # direct 0->2 costs 10; 0->1->2 costs 3+3
        offsets = np.array([0, 2, 3, 3])
        edges = np.array([1, 2, 2])
        weights = np.array([3, 10, 3])
        r = sssp(CsrGraph(3, 3, offsets, edges, weights=weights), 0)
        assert r.values.tolist() == [0, 3, 6]

    def test_missing_weights_rejected(self):
        with pytest.raises(ValueError):
            sssp(chain(3), 0)

    def test_negative_weights_rejected(self):
        g = chain(3)
        g = CsrGraph(3, 2, g.offsets, g.edges, weights=np.array([5, -1]))
        with pytest.raises(ValueError):
            sssp(g, 0)

    def test_unreachable_distance(self):
        g = chain(3)
        g = CsrGraph(3, 2, g.offsets, g.edges, weights=np.array([1, 1]))
        r = sssp(g, 2)
        assert r.values.tolist() == [UNREACHED_DIST, UNREACHED_DIST, 0]

    def test_matches_dijkstra_uniform(self):
        g = with_uniform_weights(generate_uniform(400, 2, 9, seed=5))
        src = int(pick_sources(g, 1)[0])
        got = sssp(g, src, collect_traffic=False).values
        for v, expect in enumerate(dijkstra_distances(g, src)):
            if math.isinf(expect):
                assert got[v] == UNREACHED_DIST
            else:
                assert got[v] == expect


class TestCc:
    def test_two_disjoint_triangles(self):
        offsets = np.array([0, 2, 4, 6, 8, 10, 12])
        edges = np.array([1, 2, 0, 2, 0, 1, 4, 5, 3, 5, 3, 4])
        g = CsrGraph(6, 12, offsets, edges, directed=False)
        r = cc(g)
        assert r.values.tolist() == [0, 0, 0, 3, 3, 3]

    def test_edgeless_graph_labels_self(self):
        g = CsrGraph(5, 0, np.zeros(6, dtype=np.int64),
                     np.zeros(0, dtype=np.int64), directed=False)
        r = cc(g)
        assert r.values.tolist() == [0, 1, 2, 3, 4]
        assert r.iterations == 1

    def test_directed_graph_rejected(self):
        with pytest.raises(ValueError, match="directed"):
            cc(chain(3))

    def test_first_frontier_is_all_vertices(self):
        g = undirected_path(5)
        r = cc(g)
        assert r.traversed_edges[0] == g.num_edges

    def test_matches_union_find_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            g = random_csr(rng, 80, undirected=True)
            assert cc(g, collect_traffic=False).values.tolist() == cc_min_labels(g)


class TestPagerank:
    def test_two_cycle_symmetric(self):
        g = symmetrized(CsrGraph(2, 1, np.array([0, 1, 1]), np.array([1])))
        r = pagerank(g)
        assert r.values.tolist() == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_single_vertex_dangling(self):
        g = CsrGraph(1, 0, np.zeros(2, dtype=np.int64), np.zeros(0, dtype=np.int64))
        r = pagerank(g)
        assert r.values.tolist() == [1.0]

    @pytest.mark.filterwarnings("ignore:multigraph input")
    def test_ranks_sum_to_one(self):
        rng = np.random.default_rng(5)
        g = random_csr(rng, 60)
        r = pagerank(g, collect_traffic=False)
        assert abs(r.values.sum() - 1.0) < 1e-6

    def test_five_vertex_digraph_matches_dense_oracle(self):
        rng = np.random.default_rng(17)
        g = random_csr(rng, 5, allow_empty=False)
        got = pagerank(g, tol=1e-13, max_iters=500, collect_traffic=False).values
        expect = pagerank_dense(g)
        assert np.abs(got - expect).max() < 1e-8

    def test_multigraph_flagged(self):
        offsets = np.array([0, 2, 2])
        edges = np.array([1, 1])
        g = CsrGraph(2, 2, offsets, edges)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            r = pagerank(g, collect_traffic=False)
        assert "multigraph" in r.flags
        assert any("multigraph" in str(w.message) for w in caught)

    def test_parameter_validation(self):
        g = undirected_path(3)
        with pytest.raises(ValueError):
            pagerank(g, damping=1.0)
        with pytest.raises(ValueError):
            pagerank(g, damping=0.0)
        with pytest.raises(ValueError):
            pagerank(g, max_iters=0)
        with pytest.raises(ValueError):
            pagerank(g, tol=-1.0)

    def test_full_edge_list_each_iteration(self):
        g = undirected_path(6)
        r = pagerank(g)
        assert len(r.traversed_edges) == r.iterations
        assert all(n == g.num_edges for n in r.traversed_edges)


class TestStrategyIndependence:
    @pytest.mark.filterwarnings("ignore:multigraph input")
    @settings(max_examples=12, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_all_algorithms(self, seed):
        rng = np.random.default_rng(seed)
        g = with_uniform_weights(random_csr(rng, 60, allow_empty=False))
        gu = symmetrized(g)
        src = int(pick_sources(g, 1)[0])
        for fn in (lambda s: bfs(g, src, s, collect_traffic=False).values,
                   lambda s: sssp(g, src, s, collect_traffic=False).values,
                   lambda s: cc(gu, s, collect_traffic=False).values,
                   lambda s: pagerank(g, s, collect_traffic=False).values):
            outs = [fn(s) for s in AccessStrategy]
            assert np.array_equal(outs[0], outs[1])
            assert np.array_equal(outs[0], outs[2])


class TestTrafficAccounting:
    def test_per_iteration_traffic_totals(self):
        g = generate_uniform(200, 1, 7, seed=3)
        src = int(pick_sources(g, 1)[0])
        r = bfs(g, src)
        total = r.total_traffic
        assert total.request_count == sum(s.request_count
                                          for s in r.per_iteration_traffic)
        assert len(r.per_iteration_traffic) == r.iterations

    def test_collect_traffic_off_keeps_results(self):
        g = generate_uniform(150, 1, 6, seed=4)
        src = int(pick_sources(g, 1)[0])
        a = bfs(g, src).values
        b = bfs(g, src, collect_traffic=False).values
        assert np.array_equal(a, b)

    def test_sssp_traffic_includes_weights(self):
        g = with_uniform_weights(generate_uniform(150, 1, 6, seed=4))
        src = int(pick_sources(g, 1)[0])
        weighted = sssp(g, src).total_traffic
        unweighted = bfs(g, src).total_traffic
        assert weighted.payload_bytes > unweighted.payload_bytes


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_bfs_matches_oracle_random(seed):
    rng = np.random.default_rng(seed)
    g = random_csr(rng, 120)
    src = int(rng.integers(g.num_vertices))
    assert bfs(g, src, collect_traffic=False).values.tolist() == bfs_levels(g, src)
