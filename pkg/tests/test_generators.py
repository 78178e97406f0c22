import itertools

import numpy as np
import pytest

from mincut import ClusteredErParams, cut_capacity, generate_clustered_er, min_degree, noi_mincut
from mincut.generators import cluster_of
from mincut.io import write_metis


class TestParams:
    @pytest.mark.parametrize("n, d, expected", [
        (100, 10, 495),
        (2, 100, 1),
        (10, 50, 23),  # 22.5 rounds half up
        (7, 10, 2),    # 2.1
        (1000, 0.1, 500),
    ])
    def test_edge_count(self, n, d, expected):
        assert ClusteredErParams(n, d).m == expected

    @pytest.mark.parametrize("kwargs", [
        dict(n=0, d=10), dict(n=10, d=0), dict(n=10, d=101), dict(n=10, d=5, k=0), dict(n=3, d=5, k=4),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ClusteredErParams(**kwargs)


class TestGenerate:
    def test_weight_ranges(self):
        for seed in range(20):
            p = ClusteredErParams(100, 10, 2, seed)
            g = generate_clustered_er(p)
            assert g.m == 495
            u, v, w = g.edges()
            intra = (u % 2) == (v % 2)
            assert w[intra].min() >= 100 and w[intra].max() <= 10000
            assert (w[intra] % 100 == 0).all()
            assert w[~intra].min() >= 1 and w[~intra].max() <= 100

    def test_single_pair(self):
        g = generate_clustered_er(ClusteredErParams(2, 100, 1, 3))
        assert g.m == 1 and 2 <= g.weights[0] <= 200 and g.weights[0] % 2 == 0

    def test_complete_graph(self):
        g = generate_clustered_er(ClusteredErParams(30, 100, 3, 1))
        assert g.m == 435

    def test_deterministic(self):
        p = ClusteredErParams(300, 5, 4, 11)
        assert write_metis(generate_clustered_er(p)) == write_metis(generate_clustered_er(p))

    def test_seeds_differ(self):
        for seed in range(10):
            a = generate_clustered_er(ClusteredErParams(200, 5, 2, seed))
            b = generate_clustered_er(ClusteredErParams(200, 5, 2, seed + 100))
            assert not np.array_equal(a.edges()[0], b.edges()[0]) or not np.array_equal(a.edges()[1], b.edges()[1])

    def test_sparse_rejection_path(self):
        # pair space above the dense threshold forces rejection sampling
        p = ClusteredErParams(4000, 0.05, 2, 5)
        g = generate_clustered_er(p)
        assert g.m == p.m
        u, v, _ = g.edges()
        assert (u < v).all()

    def test_cluster_sizes_near_equal(self):
        sizes = np.bincount(cluster_of(103, 4))
        assert sizes.max() - sizes.min() <= 1 and sizes.sum() == 103


def best_cluster_bipartition(g, k):
    clusters = cluster_of(g.n, k)
    best = None
    for r in range(1, k):
        for chosen in itertools.combinations(range(1, k), r - 1):
            side = np.isin(clusters, (0,) + chosen)
            if side.all():
                continue
            value = cut_capacity(g, side)
            best = value if best is None else min(best, value)
    return best


def assert_cluster_sides(side, n, k):
    clusters = cluster_of(n, k)
    for c in range(k):
        assert len(set(side[clusters == c].tolist())) == 1


class TestClusterStructure:
    # A vertex's trivial cut is only about k/(k-1) times a single-cluster cut in
    # expectation, so on small or sparse instances a light vertex can win.

    @pytest.mark.parametrize("seed", range(20))
    def test_min_cut_is_cluster_union_or_trivial(self, seed):
        k = (2, 4, 8)[seed % 3]
        d = (5, 10)[seed % 2]
        g = generate_clustered_er(ClusteredErParams(200 + 10 * seed, d, k, seed))
        result = noi_mincut(g)
        planted = best_cluster_bipartition(g, k)
        assert result.value == min(planted, min_degree(g)[1])
        if result.value < min_degree(g)[1]:
            assert_cluster_sides(result.side, g.n, k)

    @pytest.mark.parametrize("n, d, k", [(1000, 10, 2), (2000, 10, 2), (600, 100, 4)])
    @pytest.mark.parametrize("seed", range(3))
    def test_planted_cut_wins_with_enough_intra_edges(self, n, d, k, seed):
        g = generate_clustered_er(ClusteredErParams(n, d, k, seed))
        result = noi_mincut(g)
        assert result.value == best_cluster_bipartition(g, k)
        assert_cluster_sides(result.side, n, k)
