import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mincut import (
    ContractionMap,
    DegenerateCutError,
    UnionFind,
    brute_force_mincut,
    build_graph,
    connected_components,
    contract_clustering,
    contract_marked,
    cut_capacity,
    largest_component,
    min_degree,
)
from mincut.graph import Graph, _contract, _dense_relabel, graph_from_arrays, induced_subgraph

from _graphs import c4, edge_list, graphs, graphs_with_labels, p3, random_connected, triangle


class TestBuildGraph:
    def test_path(self):
        g = p3()
        assert (g.n, g.m) == (3, 2)
        assert g.degrees.tolist() == [1, 2, 1]

    def test_parallel_edges_merge(self):
        g = build_graph([(0, 1, 2), (0, 1, 3)])
        assert edge_list(g) == [(0, 1, 5)]

    def test_reversed_parallel_edges_merge(self):
        assert edge_list(build_graph([(0, 1, 2), (1, 0, 3)])) == [(0, 1, 5)]

    def test_self_loop_dropped(self):
        g = build_graph([(0, 0, 4)])
        assert (g.n, g.m) == (1, 0)
        assert g.degrees.tolist() == [0]

    @pytest.mark.parametrize("w", [0, -3])
    def test_non_positive_weight_rejected(self, w):
        with pytest.raises(ValueError, match="non-positive"):
            build_graph([(0, 1, 1), (1, 2, w)])

    def test_id_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="out of range"):
            build_graph([(0, 3, 1)], n=3)
        with pytest.raises(ValueError):
            build_graph([(-1, 0, 1)], n=3)

    def test_explicit_n_keeps_isolated_vertices(self):
        g = build_graph([(0, 1, 1)], n=4)
        assert g.n == 4 and g.degrees.tolist() == [1, 1, 0, 0]

    def test_arrays_are_read_only(self):
        g = p3()
        for arr in (g.indptr, g.indices, g.weights, g.degrees):
            with pytest.raises(ValueError):
                arr[0] = 7

    def test_large_weights_do_not_overflow(self):
        big = 2**40
        g = build_graph([(0, 1, big), (0, 1, big)])
        assert g.weights.tolist() == [2 * big, 2 * big]

    @given(graphs(min_n=1, max_n=15, connected=False))
    def test_symmetric_and_cached_degrees(self, g):
        entries = set()
        for v in range(g.n):
            nbrs, wts = g.neighbors(v)
            for u, w in zip(nbrs.tolist(), wts.tolist()):
                assert u != v and w >= 1
                entries.add((v, u, w))
            assert g.degrees[v] == wts.sum()
        assert all((u, v, w) in entries for v, u, w in entries)
        assert len(entries) == 2 * g.m

    @given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(1, 9)), max_size=30))
    def test_merge_matches_dictionary_sum(self, raw):
        expected = {}
        for u, v, w in raw:
            if u != v:
                key = (min(u, v), max(u, v))
                expected[key] = expected.get(key, 0) + w
        g = build_graph(raw, n=7)
        assert edge_list(g) == sorted((u, v, w) for (u, v), w in expected.items())

    def test_equality_ignores_adjacency_order(self):
        a = build_graph([(0, 1, 1), (1, 2, 2)])
        b = Graph(np.array([0, 1, 3, 4]), np.array([1, 2, 0, 1]), np.array([1, 2, 1, 2]))
        assert a == b
        assert a != build_graph([(0, 1, 1), (1, 2, 3)])


class TestMinDegree:
    def test_path(self):
        assert min_degree(p3()) == (0, 1)

    def test_weighted_cycle(self):
        assert min_degree(c4()) == (1, 3)

    def test_isolated_vertex(self):
        assert min_degree(build_graph([(0, 1, 1), (1, 2, 1)], n=4)) == (3, 0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            min_degree(Graph.empty(0))


class TestUnionFind:
    def test_union_and_count(self):
        uf = UnionFind(5)
        assert uf.union(0, 1)
        assert not uf.union(1, 0)
        assert uf.union(3, 4)
        assert uf.set_count == 3
        assert uf.find(0) == uf.find(1) != uf.find(2)

    def test_find_is_idempotent(self):
        uf = UnionFind(6)
        for a, b in [(0, 1), (2, 3), (1, 3), (4, 5)]:
            uf.union(a, b)
        roots = [uf.find(x) for x in range(6)]
        assert [uf.find(r) for r in roots] == roots

    @given(st.lists(st.tuples(st.integers(0, 19), st.integers(0, 19)), max_size=40))
    def test_matches_naive_partition(self, pairs):
        uf = UnionFind(20)
        blocks = [{i} for i in range(20)]
        for a, b in pairs:
            ba = next(s for s in blocks if a in s)
            bb = next(s for s in blocks if b in s)
            merged = uf.union(a, b)
            assert merged == (ba is not bb)
            if ba is not bb:
                blocks.remove(bb)
                ba |= bb
        assert uf.set_count == len(blocks) == uf.recount()
        for block in blocks:
            assert len({uf.find(x) for x in block}) == 1


class TestContraction:
    def test_path_two_blocks(self):
        h, cmap = contract_clustering(p3(), [0, 0, 1])
        assert edge_list(h) == [(0, 1, 1)]
        assert cmap.tolist() == [0, 0, 1]

    def test_k4_halves(self):
        k4 = build_graph([(u, v, 1) for u, v in itertools.combinations(range(4), 2)])
        h, _ = contract_clustering(k4, [0, 0, 1, 1])
        assert edge_list(h) == [(0, 1, 4)]

    def test_full_collapse(self):
        h, cmap = contract_clustering(c4(), [5, 5, 5, 5])
        assert (h.n, h.m) == (1, 0)
        assert cmap.tolist() == [0, 0, 0, 0]

    def test_marked_path(self):
        uf = UnionFind(3)
        uf.union(0, 1)
        h, _ = contract_marked(p3(), uf)
        assert edge_list(h) == [(0, 1, 1)]

    def test_marked_triangle_merges_parallel(self):
        uf = UnionFind(3)
        uf.union(1, 2)
        h, _ = contract_marked(triangle(), uf)
        assert edge_list(h) == [(0, 1, 2)]

    def test_nothing_marked_is_a_copy(self):
        g = c4()
        h, level = contract_marked(g, UnionFind(4))
        assert h == g and level.tolist() == [0, 1, 2, 3]

    def test_labels_must_cover_vertices(self):
        with pytest.raises(ValueError):
            contract_clustering(p3(), [0, 1])

    @given(graphs_with_labels(max_n=30))
    def test_cut_preservation(self, case):
        g, labels = case
        h, cmap = contract_clustering(g, labels)
        rng = np.random.default_rng(len(labels))
        for _ in range(5):
            if h.n < 2:
                break
            side = rng.random(h.n) < 0.5
            if side.all() or not side.any():
                side[0] = not side[0]
            assert cut_capacity(h, side) == cut_capacity(g, side[cmap])

    @given(graphs_with_labels(max_n=30))
    def test_weight_conservation(self, case):
        g, labels = case
        h, cmap = contract_clustering(g, labels)
        u, v, w = g.edges()
        assert h.total_weight() == int(w[labels[u] != labels[v]].sum())
        assert h.n == len(np.unique(labels))

    @given(graphs_with_labels(max_n=30))
    def test_all_strategies_agree(self, case):
        g, labels = case
        cid, k = _dense_relabel(labels)
        from mincut.graph import (
            _contract_by_cluster,
            _contract_by_cluster_parallel,
            _contract_dense,
            _contract_dense_parallel,
        )

        reference = Graph(*_contract_by_cluster(g.indptr, g.indices, g.weights, cid, k))
        for arrays in (
            _contract_dense(g.indptr, g.indices, g.weights, cid, k),
            _contract_dense_parallel(g.indptr, g.indices, g.weights, cid, k, 3),
            _contract_by_cluster_parallel(g.indptr, g.indices, g.weights, cid, k, 3),
        ):
            assert Graph(*arrays) == reference
        assert _contract(g, cid, int(k), threads=4) == reference

    @given(graphs(min_n=3, max_n=9))
    def test_contraction_never_lowers_min_cut(self, g):
        rng = np.random.default_rng(g.m)
        labels = rng.integers(0, g.n - 1, size=g.n)
        h, _ = contract_clustering(g, labels)
        if h.n >= 2:
            assert brute_force_mincut(h).value >= brute_force_mincut(g).value


class TestContractionMap:
    def test_lift_single_level(self):
        cmap = ContractionMap([np.array([0, 0, 1])])
        assert cmap.lift(np.array([True, False])).tolist() == [True, True, False]

    def test_identity_level(self):
        cmap = ContractionMap([np.arange(4)])
        marker = np.array([True, False, True, False])
        assert cmap.lift(marker).tolist() == marker.tolist()

    @given(st.integers(2, 40), st.integers(1, 4), st.integers(0, 2**16))
    def test_lift_equals_direct_composition(self, n, depth, seed):
        rng = np.random.default_rng(seed)
        cmap = ContractionMap()
        size = n
        for _ in range(depth):
            labels = rng.integers(0, max(1, size // 2), size=size)
            dense, k = _dense_relabel(labels)
            cmap.append(dense)
            size = int(k)
        marker = rng.random(size) < 0.5
        direct = cmap.compose()
        assert np.array_equal(cmap.lift(marker), marker[direct])
        for level in cmap.levels:
            assert set(level.tolist()) == set(range(int(level.max()) + 1))

    def test_compose_empty(self):
        assert ContractionMap().compose() is None


class TestCutCapacity:
    def test_path(self):
        assert cut_capacity(p3(), [True, False, False]) == 1

    def test_cycle_single_vertex(self):
        assert cut_capacity(c4(), [False, True, False, False]) == 3

    def test_cycle_alternating(self):
        assert cut_capacity(c4(), [True, False, True, False]) == 10

    def test_empty_side_is_degenerate(self):
        with pytest.raises(DegenerateCutError):
            cut_capacity(p3(), [True, True, True])
        with pytest.raises(DegenerateCutError):
            cut_capacity(p3(), [False, False, False])


class TestComponents:
    def test_path_single_component(self):
        assert connected_components(p3())[1] == 1

    def test_isolated_vertex(self):
        g = build_graph([(0, 1, 1), (1, 2, 1)], n=4)
        labels, count = connected_components(g)
        assert count == 2 and labels.tolist() == [0, 0, 0, 1]
        lcc, ids = largest_component(g)
        assert lcc == p3() and ids.tolist() == [0, 1, 2]

    def test_tie_goes_to_smallest_id(self):
        g = build_graph([(3, 4, 1), (4, 5, 1), (3, 5, 1), (0, 1, 2), (1, 2, 2), (0, 2, 2)])
        lcc, ids = largest_component(g)
        assert ids.tolist() == [0, 1, 2]
        assert edge_list(lcc) == [(0, 1, 2), (0, 2, 2), (1, 2, 2)]

    def test_induced_subgraph_relabels(self):
        g = c4()
        sub, ids = induced_subgraph(g, [False, True, True, True])
        assert ids.tolist() == [1, 2, 3]
        assert edge_list(sub) == [(0, 1, 2), (1, 2, 3)]

    def test_components_match_union_find(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 25))
            u = rng.integers(0, n, size=n // 2)
            v = rng.integers(0, n, size=n // 2)
            g = graph_from_arrays(n, u, v, np.ones(len(u), np.int64))
            uf = UnionFind(n)
            for a, b in zip(u, v):
                uf.union(int(a), int(b))
            labels, count = connected_components(g)
            assert count == uf.set_count
            for a in range(n):
                for b in range(n):
                    assert (labels[a] == labels[b]) == (uf.find(a) == uf.find(b))

    def test_random_connected_helper(self, rng):
        for n in range(2, 12):
            assert connected_components(random_connected(rng, n))[1] == 1
