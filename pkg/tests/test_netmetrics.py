import math

import numpy as np
import pytest

from termnet.errors import ValidationError
from termnet.graph import WeightedGraph
from termnet.netmetrics import (
    CcdfCurve,
    NullEnsemble,
    assortativity_categorical,
    assortativity_scalar,
    bimodality_coefficient,
    clustering_null,
    global_clustering,
    histogram,
    local_weighted_clustering,
    node_stats,
)

import _oracles


def graph_from_edges(n, edges, ids=None):
    """edges: iterable of (i, j) or (i, j, w)."""
    w = np.zeros((n, n))
    for edge in edges:
        i, j, weight = edge if len(edge) == 3 else (*edge, 1.0)
        w[i, j] = w[j, i] = weight
    return WeightedGraph(ids=tuple(ids or (f"n{i}" for i in range(n))), weights=w)


def random_graph(rng, n, weighted=True, p=0.4):
    w = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                w[i, j] = w[j, i] = rng.random() if weighted else 1.0
    return WeightedGraph(ids=tuple(f"n{i}" for i in range(n)), weights=w)


class TestGlobalClustering:
    def test_triangle(self):
        assert global_clustering(graph_from_edges(3, [(0, 1), (1, 2), (0, 2)])) == 1.0

    def test_path(self):
        assert global_clustering(graph_from_edges(3, [(0, 1), (1, 2)])) == 0.0

    def test_triangle_with_pendant(self):
        g = graph_from_edges(4, [(0, 1), (1, 2), (0, 2), (0, 3)])
        assert global_clustering(g) == pytest.approx(0.6)
        assert global_clustering(g) == pytest.approx(_oracles.global_clustering(g.adjacency()))

    def test_no_triples_reported_as_nan(self):
        assert math.isnan(global_clustering(graph_from_edges(2, [(0, 1)])))


class TestLocalWeightedClustering:
    def test_triangle_is_one_for_any_weights(self):
        g = graph_from_edges(3, [(0, 1, 0.3), (1, 2, 0.9), (0, 2, 0.5)])
        for node in ("n0", "n1", "n2"):
            assert local_weighted_clustering(g, node) == pytest.approx(1.0)

    def test_worked_example(self):
        # i=0 with neighbours 1, 2, 3; only 1-2 closed;
        # w01=0.5, w02=1.0, w03=0.5 -> c = 1.5 / (2.0 * 2) = 0.375
        g = graph_from_edges(4, [(0, 1, 0.5), (0, 2, 1.0), (0, 3, 0.5), (1, 2, 0.7)])
        assert local_weighted_clustering(g, "n0") == pytest.approx(0.375)
        stats = node_stats(g)
        assert stats.clustering_unweighted[0] == pytest.approx(1 / 3)

    def test_star_centre_is_zero(self):
        g = graph_from_edges(4, [(0, 1, 0.4), (0, 2, 0.8), (0, 3, 0.1)])
        assert local_weighted_clustering(g, "n0") == 0.0

    def test_degree_below_two_is_undefined(self):
        g = graph_from_edges(3, [(0, 1), (1, 2)])
        assert math.isnan(local_weighted_clustering(g, "n0"))

    def test_constant_weights_reduce_to_unweighted(self):
        rng = np.random.default_rng(10)
        for trial in range(20):
            g = random_graph(rng, rng.integers(4, 12), weighted=False)
            constant = g.with_weights(g.adjacency() * 0.37)
            stats = node_stats(constant)
            defined = ~np.isnan(stats.clustering_weighted)
            assert np.array_equal(defined, ~np.isnan(stats.clustering_unweighted))
            assert np.allclose(
                stats.clustering_weighted[defined],
                stats.clustering_unweighted[defined],
                atol=1e-12,
            )

    def test_matches_naive_reference(self):
        rng = np.random.default_rng(11)
        for trial in range(20):
            g = random_graph(rng, rng.integers(3, 14))
            stats = node_stats(g)
            for idx in range(g.n):
                expected_w = _oracles.local_clustering_weighted(g.weights, idx)
                expected_u = _oracles.local_clustering_unweighted(g.adjacency(), idx)
                for ours, theirs in (
                    (stats.clustering_weighted[idx], expected_w),
                    (stats.clustering_unweighted[idx], expected_u),
                ):
                    assert (math.isnan(ours) and math.isnan(theirs)) or ours == pytest.approx(
                        theirs, abs=1e-10
                    )


class TestClusteringNull:
    def test_constant_weight_null_equals_actual(self):
        g = graph_from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
        constant = g.with_weights(g.adjacency() * 0.5)
        result = clustering_null(constant, instances=10, seed=0)
        assert np.array_equal(result["actual_ccdf"].values, result["null_ccdf"].values)
        assert np.array_equal(
            result["actual_ccdf"].probabilities, result["null_ccdf"].probabilities
        )
        assert result["null_mean"] == pytest.approx(result["actual_mean"], abs=1e-12)

    def test_instances_preserve_topology_weights_and_degrees(self):
        rng = np.random.default_rng(12)
        g = random_graph(rng, 10)
        ensemble = NullEnsemble(graph=g, instances=5, seed=3)
        for replica in ensemble.graphs():
            assert np.array_equal(replica.adjacency(), g.adjacency())
            assert np.array_equal(replica.degrees(), g.degrees())
            assert sorted(replica.weights[np.triu_indices(10, 1)]) == pytest.approx(
                sorted(g.weights[np.triu_indices(10, 1)])
            )
            assert replica.weights.sum() == pytest.approx(g.weights.sum())

    def test_null_mean_converges_to_reshuffle_expectation(self):
        # with many instances the pooled null mean stabilizes
        rng = np.random.default_rng(13)
        g = random_graph(rng, 10, p=0.6)
        a = clustering_null(g, instances=400, seed=1)["null_mean"]
        b = clustering_null(g, instances=400, seed=2)["null_mean"]
        assert a == pytest.approx(b, abs=0.01)

    def test_deterministic(self):
        rng = np.random.default_rng(14)
        g = random_graph(rng, 8)
        r1 = clustering_null(g, instances=7, seed=5)
        r2 = clustering_null(g, instances=7, seed=5)
        assert np.array_equal(r1["null_ccdf"].values, r2["null_ccdf"].values)


class TestAssortativityScalar:
    def test_two_disjoint_edges_perfectly_assortative(self):
        g = graph_from_edges(4, [(0, 1), (2, 3)])
        assert assortativity_scalar(g, [1, 1, 9, 9]) == pytest.approx(1.0)

    def test_single_edge_disassortative(self):
        g = graph_from_edges(2, [(0, 1)])
        assert assortativity_scalar(g, [0, 1]) == pytest.approx(-1.0)

    def test_zero_variance_undefined(self):
        g = graph_from_edges(3, [(0, 1), (1, 2), (0, 2)])
        assert math.isnan(assortativity_scalar(g, [4, 4, 4]))

    def test_matches_pearson_over_edge_endpoints(self):
        rng = np.random.default_rng(15)
        for trial in range(30):
            g = random_graph(rng, rng.integers(3, 20))
            if g.m == 0:
                continue
            x = rng.normal(size=g.n)
            ours = assortativity_scalar(g, x)
            theirs = _oracles.assortativity_scalar(g.adjacency(), x)
            assert (math.isnan(ours) and math.isnan(theirs)) or ours == pytest.approx(
                theirs, abs=1e-10
            )

    def test_bounded(self):
        rng = np.random.default_rng(16)
        for trial in range(20):
            g = random_graph(rng, 12, p=0.5)
            r = assortativity_scalar(g, rng.normal(size=12))
            if not math.isnan(r):
                assert -1 - 1e-12 <= r <= 1 + 1e-12


class TestAssortativityCategorical:
    def test_all_edges_within_category(self):
        g = graph_from_edges(4, [(0, 1), (2, 3)])
        assert assortativity_categorical(g, ["a", "a", "b", "b"]) == pytest.approx(1.0)

    def test_bipartite_across_categories_is_negative(self):
        g = graph_from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
        r = assortativity_categorical(g, ["a", "a", "b", "b"])
        assert r == pytest.approx(-1.0)  # hand evaluation of the delta form
        assert r < 0

    def test_single_category_undefined(self):
        g = graph_from_edges(3, [(0, 1), (1, 2)])
        assert math.isnan(assortativity_categorical(g, ["a", "a", "a"]))

    def test_matches_naive_reference(self):
        rng = np.random.default_rng(17)
        for trial in range(30):
            g = random_graph(rng, rng.integers(3, 20))
            if g.m == 0:
                continue
            labels = rng.choice(["a", "b", "c"], size=g.n).tolist()
            ours = assortativity_categorical(g, labels)
            theirs = _oracles.assortativity_categorical(g.adjacency(), labels)
            assert (math.isnan(ours) and math.isnan(theirs)) or ours == pytest.approx(
                theirs, abs=1e-10
            )


class TestHistogram:
    def test_two_bins(self):
        counts, edges = histogram([1, 1, 2], bins=2)
        assert counts.tolist() == [2, 1]

    def test_empty_is_error(self):
        with pytest.raises(ValidationError):
            histogram([], bins=3)


class TestCcdf:
    def test_monotone_and_bounded(self):
        rng = np.random.default_rng(18)
        curve = CcdfCurve.from_samples(rng.random(100))
        assert np.all(np.diff(curve.probabilities) <= 0)
        assert curve.probabilities[0] <= 1.0
        assert curve.probabilities[-1] >= 0.0

    def test_simple_values(self):
        curve = CcdfCurve.from_samples([1.0, 2.0, 2.0, 3.0])
        assert curve.values.tolist() == [1.0, 2.0, 3.0]
        assert curve.probabilities.tolist() == [0.75, 0.25, 0.0]


class TestBimodality:
    def test_uniform_near_five_ninths(self):
        rng = np.random.default_rng(19)
        bc = bimodality_coefficient(rng.random(20000))
        assert bc == pytest.approx(5 / 9, abs=0.02)

    def test_two_point_sample_is_high(self):
        values = np.array([0.0] * 50 + [1.0] * 50)
        assert bimodality_coefficient(values) > 5 / 9
