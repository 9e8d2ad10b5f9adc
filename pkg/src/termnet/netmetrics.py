"""Node statistics, clustering coefficients, assortativity and null ensembles.

The weighted local clustering coefficient follows Barrat et al.:

    c_i = 1 / (s_i (k_i - 1)) * sum_{j,h} (w_ij + w_ih) / 2 * a_ij a_ih a_jh

summed over ordered neighbour pairs, which makes the constant-weight case
collapse exactly onto the unweighted coefficient. Scalar and categorical
assortativity are the Newman mixing coefficients on the binary adjacency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import WeightedGraph, spawn_rng


@dataclass(frozen=True)
class NodeStats:
    ids: tuple[str, ...]
    degree: np.ndarray
    strength: np.ndarray
    clustering_weighted: np.ndarray    # NaN where degree < 2
    clustering_unweighted: np.ndarray  # NaN where degree < 2

    def mean_clustering(self, weighted: bool = True) -> float:
        values = self.clustering_weighted if weighted else self.clustering_unweighted
        defined = values[~np.isnan(values)]
        return float(defined.mean()) if defined.size else math.nan


def _clustering_arrays(graph: WeightedGraph) -> tuple[np.ndarray, np.ndarray]:
    a = graph.adjacency()
    w = graph.weights
    k = a.sum(axis=1)
    s = w.sum(axis=1)
    common = a @ a  # common[i, j] = number of shared neighbours of i and j
    closed_weight = (w * common).sum(axis=1)
    closed_count = (a * common).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        weighted = closed_weight / (s * (k - 1))
        unweighted = closed_count / (k * (k - 1))
    weighted[k < 2] = np.nan
    unweighted[k < 2] = np.nan
    return weighted, unweighted


def node_stats(graph: WeightedGraph) -> NodeStats:
    weighted, unweighted = _clustering_arrays(graph)
    return NodeStats(
        ids=graph.ids,
        degree=graph.degrees(),
        strength=graph.strengths(),
        clustering_weighted=weighted,
        clustering_unweighted=unweighted,
    )


def local_weighted_clustering(graph: WeightedGraph, node: str) -> float:
    """Weighted local clustering of one node; NaN when its degree is < 2."""
    idx = graph.ids.index(node)
    return float(_clustering_arrays(graph)[0][idx])


def global_clustering(graph: WeightedGraph) -> float:
    """Ratio of closed triangles to connected triples, 3 n_triangle / n_triple.

    Returns NaN when the graph has no connected triple (reported, not raised).
    """
    a = graph.adjacency()
    k = a.sum(axis=1)
    triples = float((k * (k - 1)).sum()) / 2.0
    if triples == 0:
        return math.nan
    closed = float(np.trace(a @ a @ a)) / 2.0  # 3 * n_triangle
    return closed / triples


@dataclass(frozen=True)
class CcdfCurve:
    """Empirical P(x > X) evaluated at the sorted sample values."""

    values: np.ndarray
    probabilities: np.ndarray

    @classmethod
    def from_samples(cls, samples) -> "CcdfCurve":
        samples = np.asarray(samples, dtype=np.float64)
        samples = samples[~np.isnan(samples)]
        if samples.size == 0:
            raise ValidationError("ccdf of an empty sample")
        values = np.unique(samples)
        probabilities = np.array([(samples > v).mean() for v in values])
        return cls(values=values, probabilities=probabilities)


@dataclass(frozen=True)
class NullEnsemble:
    """Weight-reshuffled replicas: same topology, permuted edge-weight multiset."""

    graph: WeightedGraph
    instances: int
    seed: int

    def __post_init__(self):
        if self.instances < 1:
            raise ValidationError("ensemble needs at least 1 instance")

    def graphs(self):
        ii, jj, w = self.graph.edge_arrays()
        n = self.graph.n
        for t in range(self.instances):
            rng = spawn_rng(self.seed, t)
            shuffled = w[rng.permutation(w.size)]
            weights = np.zeros((n, n), dtype=np.float64)
            weights[ii, jj] = shuffled
            weights[jj, ii] = shuffled
            yield self.graph.with_weights(weights)


def clustering_null(graph: WeightedGraph, instances: int, seed: int) -> dict:
    """Weighted clustering under the weight-reshuffle null.

    Returns the actual ccdf, the ccdf pooled across instances and the mean
    weighted coefficient per instance, for testing whether the actual curve
    is right-shifted.
    """
    actual_w, _ = _clustering_arrays(graph)
    ensemble = NullEnsemble(graph=graph, instances=instances, seed=seed)
    pooled = []
    instance_means = []
    for replica in ensemble.graphs():
        values, _ = _clustering_arrays(replica)
        defined = values[~np.isnan(values)]
        pooled.append(defined)
        instance_means.append(float(defined.mean()) if defined.size else math.nan)
    pooled_values = np.concatenate(pooled) if pooled else np.array([])
    defined_actual = actual_w[~np.isnan(actual_w)]
    return {
        "actual_ccdf": CcdfCurve.from_samples(defined_actual),
        "null_ccdf": CcdfCurve.from_samples(pooled_values),
        "actual_mean": float(defined_actual.mean()) if defined_actual.size else math.nan,
        "null_means": instance_means,
        "null_mean": float(np.nanmean(instance_means)),
    }


def assortativity_scalar(graph: WeightedGraph, x) -> float:
    """Mixing coefficient for a scalar node attribute on the binary adjacency.

    Equal to the Pearson correlation of the attribute across edge endpoints;
    NaN when the attribute has no variance over endpoints.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (graph.n,):
        raise ValidationError("attribute vector does not match node count")
    a = graph.adjacency()
    k = a.sum(axis=1)
    two_m = float(k.sum())
    if two_m == 0:
        return math.nan
    centered = x - (k @ x) / two_m
    numerator = centered @ a @ centered
    denominator = k @ (centered**2)
    # a relative floor keeps rounding residue on zero-variance attributes
    # from masquerading as a defined coefficient
    if denominator <= 1e-24 * max(1.0, float(k @ (x**2))):
        return math.nan
    return float(numerator / denominator)


def assortativity_categorical(graph: WeightedGraph, f) -> float:
    """Mixing coefficient for a categorical attribute (Kronecker-delta form).

    NaN when fewer than two categories are present (the denominator is zero).
    """
    labels = list(f)
    if len(labels) != graph.n:
        raise ValidationError("attribute vector does not match node count")
    a = graph.adjacency()
    k = a.sum(axis=1)
    two_m = float(k.sum())
    if two_m == 0:
        return math.nan
    categories = sorted(set(labels))
    same_edges = 0.0
    degree_mass = 0.0
    for cat in categories:
        members = np.array([lab == cat for lab in labels])
        same_edges += float(a[np.ix_(members, members)].sum())
        degree_mass += float(k[members].sum()) ** 2
    expected = degree_mass / two_m
    denominator = two_m - expected
    if math.isclose(denominator, 0.0, abs_tol=1e-300):
        return math.nan
    return float((same_edges - expected) / denominator)


def histogram(values, bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Equal-width counts over [min, max]; empty input is an error."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValidationError("histogram of an empty sample")
    if bins < 1:
        raise ValidationError("histogram needs at least 1 bin")
    return np.histogram(values, bins=bins)


def bimodality_coefficient(values) -> float:
    """Sarle's bimodality coefficient; > 5/9 hints at more than one mode.

    Reported alongside the degree/strength histograms as a shape summary,
    never asserted.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    if n < 4:
        return math.nan
    centered = x - x.mean()
    m2 = float((centered**2).mean())
    if m2 == 0:
        return math.nan
    skew = float((centered**3).mean()) / m2**1.5
    kurt = float((centered**4).mean()) / m2**2 - 3.0
    g = skew * math.sqrt(n * (n - 1)) / (n - 2)
    k_corr = ((n + 1) * kurt + 6) * (n - 1) / ((n - 2) * (n - 3))
    return (g**2 + 1) / (k_corr + 3 * (n - 1) ** 2 / ((n - 2) * (n - 3)))
