"""Shared weighted-graph container plus component extraction and CSV I/O."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError


def spawn_rng(seed: int, instance: int) -> np.random.Generator:
    """Independent, reproducible stream for one randomization instance.

    Mixing the instance index into the seed sequence makes parallel and
    serial schedules agree bit for bit.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(instance,)))


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected weighted graph over string node ids.

    ``weights`` is a dense symmetric matrix with zero diagonal; an edge exists
    wherever the weight is positive. Node attributes are free-form string maps
    (date, speaker, category).
    """

    ids: tuple[str, ...]
    weights: np.ndarray
    attrs: dict[str, dict[str, str]] = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        n = len(self.ids)
        if w.shape != (n, n):
            raise ValidationError("weight matrix shape does not match node count")
        if len(set(self.ids)) != n:
            raise ValidationError("duplicate node ids")
        if not np.array_equal(w, w.T):
            raise ValidationError("weight matrix is not symmetric")
        if np.any(np.diag(w) != 0):
            raise ValidationError("self-loops are not allowed")
        if np.any(w < 0):
            raise ValidationError("negative edge weights")

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def m(self) -> int:
        return int(np.count_nonzero(np.triu(self.weights, k=1)))

    def adjacency(self) -> np.ndarray:
        return (self.weights > 0).astype(np.float64)

    def degrees(self) -> np.ndarray:
        return (self.weights > 0).sum(axis=1).astype(np.int64)

    def strengths(self) -> np.ndarray:
        return self.weights.sum(axis=1)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(i, j, w) arrays over the upper triangle, i < j."""
        ii, jj = np.nonzero(np.triu(self.weights, k=1))
        return ii, jj, self.weights[ii, jj]

    def edges(self):
        for i, j, w in zip(*self.edge_arrays()):
            yield self.ids[i], self.ids[j], float(w)

    def with_weights(self, weights: np.ndarray) -> "WeightedGraph":
        return WeightedGraph(ids=self.ids, weights=weights, attrs=self.attrs)

    def subgraph(self, indices) -> "WeightedGraph":
        indices = np.asarray(sorted(indices), dtype=np.int64)
        ids = tuple(self.ids[i] for i in indices)
        return WeightedGraph(
            ids=ids,
            weights=self.weights[np.ix_(indices, indices)],
            attrs={i: self.attrs[i] for i in ids if i in self.attrs},
        )

    def attribute(self, name: str) -> list[str]:
        return [self.attrs.get(i, {}).get(name, "") for i in self.ids]


def density(graph: WeightedGraph) -> float:
    """Fraction of realized node pairs, 2m / (n(n-1))."""
    if graph.n < 2:
        raise ValidationError("density needs at least 2 nodes")
    return 2.0 * graph.m / (graph.n * (graph.n - 1))


def connected_components(graph: WeightedGraph) -> list[list[int]]:
    adjacency = graph.weights > 0
    unseen = set(range(graph.n))
    components = []
    while unseen:
        start = min(unseen)
        stack, comp = [start], []
        unseen.discard(start)
        while stack:
            node = stack.pop()
            comp.append(node)
            for neighbor in np.nonzero(adjacency[node])[0]:
                if neighbor in unseen:
                    unseen.discard(int(neighbor))
                    stack.append(int(neighbor))
        components.append(sorted(comp))
    return components


def largest_component(graph: WeightedGraph) -> WeightedGraph:
    """Induced subgraph on the largest component; ties go to the smallest node id."""
    if graph.n == 0:
        raise ValidationError("graph is empty")
    components = connected_components(graph)
    best = min(components, key=lambda comp: (-len(comp), graph.ids[comp[0]]))
    return graph.subgraph(best)


def write_graph(graph: WeightedGraph, edges_path: str | Path, nodes_path: str | Path) -> None:
    with open(edges_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "weight"])
        for src, dst, w in graph.edges():
            writer.writerow([src, dst, repr(w)])
    with open(nodes_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "date", "speaker", "category"])
        for node_id in graph.ids:
            attrs = graph.attrs.get(node_id, {})
            writer.writerow(
                [node_id, attrs.get("date", ""), attrs.get("speaker", ""), attrs.get("category", "")]
            )


def read_graph(edges_path: str | Path, nodes_path: str | Path) -> WeightedGraph:
    ids: list[str] = []
    attrs: dict[str, dict[str, str]] = {}
    with open(nodes_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"id", "date", "speaker", "category"}
        if not required.issubset(reader.fieldnames or ()):
            raise ValidationError(f"{nodes_path}: expected columns {sorted(required)}")
        for row in reader:
            ids.append(row["id"])
            attrs[row["id"]] = {
                "date": row["date"],
                "speaker": row["speaker"],
                "category": row["category"],
            }
    index = {node_id: i for i, node_id in enumerate(ids)}
    weights = np.zeros((len(ids), len(ids)), dtype=np.float64)
    with open(edges_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not {"src", "dst", "weight"}.issubset(reader.fieldnames or ()):
            raise ValidationError(f"{edges_path}: expected columns src,dst,weight")
        for row in reader:
            try:
                i, j = index[row["src"]], index[row["dst"]]
            except KeyError as exc:
                raise ValidationError(f"{edges_path}: edge endpoint {exc} not in node table") from exc
            w = float(row["weight"])
            weights[i, j] = w
            weights[j, i] = w
    return WeightedGraph(ids=tuple(ids), weights=weights, attrs=attrs)
