"""Graph partitions (Louvain, label propagation, greedy modularity), imports,
modularity and pairwise Adjusted Rand comparison."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import networkx as nx
import numpy as np

from .errors import ValidationError
from .graph import WeightedGraph, density

DENSE_GRAPH_WARNING = 0.2


@dataclass(frozen=True)
class Partition:
    """Complete node -> community assignment with dense community ids."""

    method: str
    assignment: dict[str, int]

    def __post_init__(self):
        ids = sorted(set(self.assignment.values()))
        if ids != list(range(len(ids))):
            raise ValidationError(f"partition {self.method!r}: community ids not dense")

    def labels_for(self, node_ids) -> list[int]:
        try:
            return [self.assignment[i] for i in node_ids]
        except KeyError as exc:
            raise ValidationError(f"partition {self.method!r} misses node {exc}") from exc

    def n_communities(self) -> int:
        return len(set(self.assignment.values()))


def _validate_cover(graph: WeightedGraph, assignment: dict[str, int], method: str) -> None:
    if set(assignment) != set(graph.ids):
        raise ValidationError(f"partition {method!r} does not cover the node set exactly")


def _from_communities(graph: WeightedGraph, communities, method: str) -> Partition:
    assignment: dict[str, int] = {}
    # Stable community numbering: order blocks by their smallest node id.
    blocks = sorted((sorted(block) for block in communities), key=lambda b: b[0])
    for label, block in enumerate(blocks):
        for node in block:
            assignment[node] = label
    _validate_cover(graph, assignment, method)
    return Partition(method=method, assignment=assignment)


def _nx_graph(graph: WeightedGraph, binary: bool = False) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(graph.ids)
    for src, dst, w in graph.edges():
        g.add_edge(src, dst, weight=1.0 if binary else w)
    return g


def _warn_if_dense(graph: WeightedGraph) -> None:
    if graph.n >= 2 and density(graph) > DENSE_GRAPH_WARNING:
        warnings.warn(
            "community detection on a dense graph "
            f"(density {density(graph):.3f} > {DENSE_GRAPH_WARNING}); "
            "results may be unstable",
            stacklevel=3,
        )


def louvain(graph: WeightedGraph, seed: int, binary: bool = False) -> Partition:
    """Two-phase greedy modularity optimization with seeded node order."""
    _warn_if_dense(graph)
    communities = nx.community.louvain_communities(
        _nx_graph(graph, binary), weight="weight", seed=seed
    )
    return _from_communities(graph, communities, "louvain")


def label_propagation(graph: WeightedGraph, seed: int, binary: bool = False) -> Partition:
    """Asynchronous weight-majority label propagation, seeded sweep order."""
    _warn_if_dense(graph)
    communities = nx.community.asyn_lpa_communities(
        _nx_graph(graph, binary), weight="weight", seed=seed
    )
    return _from_communities(graph, communities, "label_propagation")


def greedy_modularity(graph: WeightedGraph, binary: bool = False) -> Partition:
    """Agglomerative merging while a positive modularity gain exists."""
    _warn_if_dense(graph)
    communities = nx.community.greedy_modularity_communities(
        _nx_graph(graph, binary), weight="weight"
    )
    return _from_communities(graph, communities, "greedy_modularity")


def modularity(graph: WeightedGraph, partition: Partition) -> float:
    """Q = (1/2m) sum_ij (a_ij - k_i k_j / 2m) delta(P_i, P_j) on the binary adjacency."""
    _validate_cover(graph, partition.assignment, partition.method)
    a = graph.adjacency()
    k = a.sum(axis=1)
    two_m = float(k.sum())
    if two_m == 0:
        return math.nan
    labels = np.array(partition.labels_for(graph.ids))
    q = 0.0
    for community in set(labels.tolist()):
        members = labels == community
        intra = float(a[np.ix_(members, members)].sum())
        degree_sum = float(k[members].sum())
        q += intra / two_m - (degree_sum / two_m) ** 2
    return q


def adjusted_rand_index(p1: Partition, p2: Partition) -> float:
    """Chance-corrected agreement between two partitions of the same node set."""
    if set(p1.assignment) != set(p2.assignment):
        raise ValidationError(
            f"partitions {p1.method!r} and {p2.method!r} cover different node sets"
        )
    nodes = sorted(p1.assignment)
    labels1 = [p1.assignment[n] for n in nodes]
    labels2 = [p2.assignment[n] for n in nodes]
    contingency: dict[tuple[int, int], int] = {}
    row_sums: dict[int, int] = {}
    col_sums: dict[int, int] = {}
    for l1, l2 in zip(labels1, labels2):
        contingency[(l1, l2)] = contingency.get((l1, l2), 0) + 1
        row_sums[l1] = row_sums.get(l1, 0) + 1
        col_sums[l2] = col_sums.get(l2, 0) + 1
    n = len(nodes)
    sum_cells = sum(math.comb(v, 2) for v in contingency.values())
    sum_rows = sum(math.comb(v, 2) for v in row_sums.values())
    sum_cols = sum(math.comb(v, 2) for v in col_sums.values())
    total_pairs = math.comb(n, 2)
    # Both all-singletons or both one-block: identical by construction.
    if sum_rows == sum_cols and sum_rows in (0, total_pairs):
        return 1.0
    expected = sum_rows * sum_cols / total_pairs
    maximum = (sum_rows + sum_cols) / 2
    return (sum_cells - expected) / (maximum - expected)


def ari_matrix(partitions: list[Partition]) -> tuple[list[str], np.ndarray]:
    """All pairwise ARI values; the diagonal is 1 by construction."""
    if len(partitions) < 2:
        raise ValidationError("need at least 2 partitions to compare")
    labels = [p.method for p in partitions]
    size = len(partitions)
    matrix = np.ones((size, size), dtype=np.float64)
    for i in range(size):
        for j in range(i + 1, size):
            value = adjusted_rand_index(partitions[i], partitions[j])
            matrix[i, j] = matrix[j, i] = value
    return labels, matrix


def import_partition(path: str | Path, method: str | None = None) -> Partition:
    """Read a ``node_id,community_id`` CSV; ids are re-mapped to dense integers."""
    path = Path(path)
    raw: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not {"node_id", "community_id"}.issubset(reader.fieldnames or ()):
            raise ValidationError(f"{path}: expected columns node_id,community_id")
        for row in reader:
            if row["node_id"] in raw:
                raise ValidationError(f"{path}: node {row['node_id']!r} assigned twice")
            raw[row["node_id"]] = row["community_id"]
    if not raw:
        raise ValidationError(f"{path}: empty partition")
    dense = {label: i for i, label in enumerate(sorted(set(raw.values())))}
    return Partition(
        method=method or path.stem,
        assignment={node: dense[label] for node, label in raw.items()},
    )


def write_partition(partition: Partition, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "community_id"])
        for node in sorted(partition.assignment):
            writer.writerow([node, partition.assignment[node]])
