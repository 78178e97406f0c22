import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mincut import (
    Clustering,
    LpaConfig,
    block_shuffled_order,
    build_graph,
    contract_clustering,
    fix_misplaced,
    label_propagation,
    min_degree,
)
from mincut.lpa import misplaced_size_limit

from _graphs import graphs, random_connected


def two_k4s():
    edges = [(u, v, 1) for u in range(4) for v in range(u + 1, 4)]
    edges += [(u + 4, v + 4, 1) for u in range(4) for v in range(u + 1, 4)]
    return build_graph(edges + [(3, 4, 1)])


class TestBlockShuffle:
    def test_blocks_stay_in_order(self):
        order = block_shuffled_order(4, 2, seed=3)
        assert set(order[:2].tolist()) == {0, 1} and set(order[2:].tolist()) == {2, 3}

    def test_single_block(self):
        assert sorted(block_shuffled_order(5, 128, seed=1).tolist()) == list(range(5))

    def test_block_boundary(self):
        order = block_shuffled_order(256, 128, seed=9)
        assert order[:128].max() == 127

    @given(st.integers(1, 500), st.integers(1, 64), st.integers(0, 2**32))
    def test_is_blockwise_permutation(self, n, block, seed):
        order = block_shuffled_order(n, block, seed)
        assert sorted(order.tolist()) == list(range(n))
        assert ((order // block) == (np.arange(n) // block)).all()
        assert np.array_equal(order, block_shuffled_order(n, block, seed))

    def test_seed_changes_order(self):
        a = block_shuffled_order(128, 128, 1)
        assert any(not np.array_equal(a, block_shuffled_order(128, 128, s)) for s in range(2, 6))

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            block_shuffled_order(0, 4, 0)


class TestLabelPropagation:
    def test_cliques_are_a_strict_fixpoint(self):
        g = two_k4s()
        labels = np.array([0] * 4 + [1] * 4)
        for v in range(g.n):
            nbrs, wts = g.neighbors(v)
            score = np.bincount(labels[nbrs], weights=wts, minlength=2)
            assert score[labels[v]] > score[1 - labels[v]]

    def test_two_cliques_usually_found(self):
        # A first-visited bridge vertex faces a four-way tie, so the bridge can
        # be crossed; the single-cluster labeling is also a fixpoint.
        g = two_k4s()
        cliques = 0
        for seed in range(100):
            c = label_propagation(g, LpaConfig(seed=seed))
            cliques += c.cluster_count == 2 and len(set(c.label[:4].tolist())) == 1
        assert cliques >= 90

    def test_single_edge_shares_label(self):
        c = label_propagation(build_graph([(0, 1, 3)]), LpaConfig(iterations=1))
        assert c.cluster_count == 1

    def test_isolated_vertex_keeps_label(self):
        g = build_graph([(0, 1, 1), (1, 2, 1)], n=4)
        for seed in range(10):
            c = label_propagation(g, LpaConfig(seed=seed))
            assert c.cluster_size[c.label[3]] == 1

    def test_heavier_label_wins(self):
        # vertex 0 sees label of 1 with weight 5 and label of 2 with weight 1
        g = build_graph([(0, 1, 5), (0, 2, 1)])
        c = label_propagation(g, LpaConfig(iterations=1, shuffle_block_size=1))
        assert c.label[0] == c.label[1]

    def test_deterministic(self, rng):
        g = random_connected(rng, 200, density=0.05)
        cfg = LpaConfig(seed=42)
        assert np.array_equal(label_propagation(g, cfg).label, label_propagation(g, cfg).label)

    @given(graphs(min_n=1, max_n=40, connected=False), st.integers(0, 1000))
    def test_output_is_partition(self, g, seed):
        c = label_propagation(g, LpaConfig(seed=seed))
        assert len(c.label) == g.n
        assert c.cluster_count == len(np.unique(c.label)) if g.n else c.cluster_count == 0
        assert c.cluster_size.sum() == g.n
        if g.n:
            assert c.label.min() == 0 and c.label.max() == c.cluster_count - 1

    @given(graphs(min_n=2, max_n=60), st.integers(0, 10**6))
    def test_guard_halves_connected_graphs(self, g, seed):
        c = label_propagation(g, LpaConfig(singleton_guard=True, seed=seed))
        assert c.cluster_size.min() >= 2
        assert c.cluster_count <= g.n // 2

    def test_parallel_mode_is_valid_partition(self, rng):
        g = random_connected(rng, 500, density=0.02)
        c = label_propagation(g, LpaConfig(seed=3), threads=4)
        assert c.cluster_size.sum() == 500 and c.cluster_count <= 500

    def test_config_validation(self):
        with pytest.raises(ValueError):
            LpaConfig(iterations=0)
        with pytest.raises(ValueError):
            LpaConfig(shuffle_block_size=0)


def figure_gadget(outside_weight):
    # cluster {0, 1, 2}; vertex 0 has 2 unit edges inside and 3 unit edges to 3, 4, 5
    edges = [(0, 1, 1), (0, 2, 1), (1, 2, 5), (0, 3, 1), (0, 4, 1), (0, 5, 1)]
    edges += [(1, 6, outside_weight), (3, 4, 9), (4, 5, 9), (5, 6, 9), (6, 7, 9)]
    edges += [(8 + i, 9 + i, 1) for i in range(8)]  # padding so log2(n) >= 3
    edges += [(7, 8, 9)]
    return build_graph(edges)


def clustering_for(g, groups):
    labels = np.arange(g.n)
    for i, group in enumerate(groups):
        labels[list(group)] = g.n + i
    return Clustering.from_labels(labels)


class TestFixMisplaced:
    def test_figure_gadget_extracts_center(self):
        g = figure_gadget(outside_weight=1)
        c = clustering_for(g, [{0, 1, 2}])
        fixed = fix_misplaced(g, c)
        assert fixed.cluster_count == c.cluster_count + 1
        assert fixed.cluster_size[fixed.label[0]] == 1
        assert fixed.label[1] == fixed.label[2]

    def test_internal_vertex_never_extracted(self):
        # 0 has all its edges inside the cluster {0, 1, 2} and a degree far
        # below the cluster's boundary weight
        edges = [(0, 1, 1), (0, 2, 1), (1, 3, 50), (2, 3, 50)] + [(3 + i, 4 + i, 1) for i in range(6)]
        g = build_graph(edges)
        fixed = fix_misplaced(g, clustering_for(g, [{0, 1, 2}]))
        assert fixed.label[0] == fixed.label[1] or fixed.label[0] == fixed.label[2]

    def test_large_clusters_untouched(self):
        g = figure_gadget(outside_weight=1)
        big = set(range(misplaced_size_limit(g.n) + 1))
        c = clustering_for(g, [big])
        assert np.array_equal(fix_misplaced(g, c).label, c.label)

    def test_size_limit(self):
        assert misplaced_size_limit(16) == 4
        assert misplaced_size_limit(17) == 4
        assert misplaced_size_limit(1) == 0

    def test_at_most_one_extraction_per_cluster(self, rng):
        for _ in range(30):
            g = random_connected(rng, 60, density=0.1)
            c = label_propagation(g, LpaConfig(seed=int(rng.integers(1000))))
            fixed = fix_misplaced(g, c)
            assert c.cluster_count <= fixed.cluster_count
            for cl in range(c.cluster_count):
                members = np.flatnonzero(c.label == cl)
                assert len(np.unique(fixed.label[members])) <= 2

    def test_never_raises_contracted_min_degree(self, rng):
        for _ in range(100):
            n = int(rng.integers(4, 101))
            g = random_connected(rng, n, density=rng.uniform(0.02, 0.3))
            c = label_propagation(g, LpaConfig(seed=int(rng.integers(1000))))
            before, _ = contract_clustering(g, c)
            after, _ = contract_clustering(g, fix_misplaced(g, c))
            if before.n >= 1 and after.n >= 2:
                assert min_degree(after)[1] <= (min_degree(before)[1] if before.n >= 2 else np.inf)

    def test_parallel_matches_sequential(self, rng):
        for _ in range(20):
            g = random_connected(rng, 300, density=0.03)
            c = label_propagation(g, LpaConfig(seed=int(rng.integers(1000))))
            assert np.array_equal(fix_misplaced(g, c).label, fix_misplaced(g, c, threads=4).label)
