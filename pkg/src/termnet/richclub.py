"""Rich-club coefficients, weight-reshuffle normalization and core/periphery split.

phi(threshold) is the binary density of the subgraph induced by the nodes
above a degree, strength or strength-rank threshold. The normalized curve
divides by the mean coefficient across a weight-reshuffled ensemble with
identical topology; in rank mode the strength ranks are recomputed inside
every ensemble instance, because the reshuffle does not preserve strengths.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .graph import WeightedGraph
from .netmetrics import NullEnsemble

MODES = ("degree", "strength", "rank")


def strength_ranks(graph: WeightedGraph, strengths: np.ndarray | None = None) -> np.ndarray:
    """Ranks 1..n by increasing strength; ties broken by node id ascending."""
    s = graph.strengths() if strengths is None else np.asarray(strengths)
    order = sorted(range(graph.n), key=lambda i: (s[i], graph.ids[i]))
    ranks = np.empty(graph.n, dtype=np.int64)
    for position, node in enumerate(order, start=1):
        ranks[node] = position
    return ranks


def _club_mask(graph: WeightedGraph, mode: str, threshold: float,
               strengths: np.ndarray | None = None) -> np.ndarray:
    if mode == "degree":
        return graph.degrees() > threshold
    if mode == "strength":
        s = graph.strengths() if strengths is None else strengths
        return s > threshold
    if mode == "rank":
        return strength_ranks(graph, strengths) > threshold
    raise ValidationError(f"unknown rich-club mode {mode!r}; use one of {MODES}")


def _club_density(adjacency: np.ndarray, mask: np.ndarray) -> float:
    size = int(mask.sum())
    if size < 2:
        return math.nan
    sub = adjacency[np.ix_(mask, mask)]
    return float(sub.sum()) / (size * (size - 1))


def phi(graph: WeightedGraph, mode: str, threshold: float) -> float:
    """Binary density of the club above ``threshold``; NaN for clubs of < 2 nodes."""
    if graph.n == 0:
        raise ValidationError("graph is empty")
    return _club_density(graph.adjacency(), _club_mask(graph, mode, threshold))


def _thresholds(graph: WeightedGraph, mode: str) -> list[float]:
    if mode == "degree":
        return sorted(set(graph.degrees().tolist()))
    if mode == "strength":
        return sorted(set(graph.strengths().tolist()))
    if mode == "rank":
        return list(range(1, graph.n))
    raise ValidationError(f"unknown rich-club mode {mode!r}; use one of {MODES}")


@dataclass(frozen=True)
class RichClubPoint:
    threshold: float
    phi: float            # NaN marks an undefined point (club size < 2)
    phi_null_mean: float
    phi_norm: float
    club_size: int


@dataclass(frozen=True)
class RichClubCurve:
    mode: str
    points: tuple[RichClubPoint, ...]
    regime_start: float | None = None

    def defined_points(self) -> list[RichClubPoint]:
        return [p for p in self.points if not math.isnan(p.phi_norm)]


def _scores(graph: WeightedGraph, mode: str, strengths: np.ndarray | None = None) -> np.ndarray:
    if mode == "degree":
        return graph.degrees().astype(np.float64)
    if mode == "strength":
        return (graph.strengths() if strengths is None else strengths).astype(np.float64)
    if mode == "rank":
        return strength_ranks(graph, strengths).astype(np.float64)
    raise ValidationError(f"unknown rich-club mode {mode!r}; use one of {MODES}")


def _phi_by_threshold(adjacency: np.ndarray, scores: np.ndarray, thresholds) -> np.ndarray:
    """Club density at every threshold in one O(n^2) sweep.

    Walking the thresholds from the top down, the club only ever grows, so
    the induced edge count can be updated incrementally as nodes join.
    """
    order = np.argsort(-scores, kind="stable")
    results = np.full(len(thresholds), math.nan)
    club = np.zeros(scores.size, dtype=bool)
    pair_edges = 0.0
    joined = 0
    for idx in range(len(thresholds) - 1, -1, -1):
        t = thresholds[idx]
        while joined < scores.size and scores[order[joined]] > t:
            node = order[joined]
            pair_edges += float(adjacency[node][club].sum())
            club[node] = True
            joined += 1
        if joined >= 2:
            results[idx] = 2.0 * pair_edges / (joined * (joined - 1))
    return results


def normalized_curve(graph: WeightedGraph, mode: str, ensemble: NullEnsemble) -> RichClubCurve:
    """phi on the graph against its mean across the weight-reshuffled ensemble."""
    if ensemble.graph is not graph and ensemble.graph.ids != graph.ids:
        raise ValidationError("ensemble was not built over this graph")
    thresholds = _thresholds(graph, mode)
    adjacency = graph.adjacency()
    actual = _phi_by_threshold(adjacency, _scores(graph, mode), thresholds)
    sizes = [int((_scores(graph, mode) > t).sum()) for t in thresholds]

    null_sums = np.zeros(len(thresholds))
    null_counts = np.zeros(len(thresholds), dtype=np.int64)
    for replica in ensemble.graphs():
        # Topology is shared across instances, so the density sweep can reuse
        # the original adjacency; only strength-derived scores change.
        scores = _scores(replica, mode, strengths=replica.strengths())
        values = _phi_by_threshold(adjacency, scores, thresholds)
        defined = ~np.isnan(values)
        null_sums[defined] += values[defined]
        null_counts += defined

    points = []
    for idx, t in enumerate(thresholds):
        null_mean = null_sums[idx] / null_counts[idx] if null_counts[idx] else math.nan
        if math.isnan(actual[idx]) or math.isnan(null_mean) or null_mean == 0:
            norm = math.nan
        else:
            norm = actual[idx] / null_mean
        points.append(
            RichClubPoint(
                threshold=float(t),
                phi=float(actual[idx]),
                phi_null_mean=float(null_mean),
                phi_norm=float(norm),
                club_size=sizes[idx],
            )
        )
    curve = RichClubCurve(mode=mode, points=tuple(points))
    return RichClubCurve(mode=mode, points=tuple(points), regime_start=detect_regime(curve))


def detect_regime(curve: RichClubCurve, sustained_fraction: float = 0.9) -> float | None:
    """Smallest threshold whose point exceeds 1 and stays above 1 from there on.

    "Stays above" is a sustained-fraction rule: at least ``sustained_fraction``
    of the defined points at thresholds >= the candidate must have
    phi_norm > 1, which tolerates noisy re-crossings near the boundary.
    """
    defined = curve.defined_points()
    if not defined:
        return None
    defined = sorted(defined, key=lambda p: p.threshold)
    exceeds = [p.phi_norm > 1 for p in defined]
    remaining_exceeds = 0
    remaining_total = 0
    best: float | None = None
    for point, above in zip(reversed(defined), reversed(exceeds)):
        remaining_total += 1
        remaining_exceeds += above
        if above and remaining_exceeds / remaining_total >= sustained_fraction:
            best = point.threshold
    return best


@dataclass(frozen=True)
class CoreMembership:
    """Strength-rank core/periphery assignment at a given rank cut."""

    ids: tuple[str, ...]
    rank: np.ndarray
    in_core: np.ndarray
    cut: float

    def core_ids(self) -> list[str]:
        return [i for i, flag in zip(self.ids, self.in_core) if flag]

    def periphery_ids(self) -> list[str]:
        return [i for i, flag in zip(self.ids, self.in_core) if not flag]


def core_periphery_split(graph: WeightedGraph, cut: float | None) -> CoreMembership:
    """Nodes with strength rank above ``cut`` form the core.

    ``cut`` is normally the detected regime start; when no regime was found
    the caller must supply an explicit cut (or switch rich-club mode).
    """
    if cut is None:
        raise ValidationError(
            "no rich-club regime detected; pass an explicit cut or try another mode"
        )
    ranks = strength_ranks(graph)
    return CoreMembership(ids=graph.ids, rank=ranks, in_core=ranks > cut, cut=float(cut))


def group_composition(graph: WeightedGraph, membership: CoreMembership, attribute: str) -> dict:
    """Attribute value counts inside and outside the core."""
    values = graph.attribute(attribute)
    composition = {"core": {}, "periphery": {}}
    for value, flag in zip(values, membership.in_core):
        bucket = composition["core" if flag else "periphery"]
        bucket[value] = bucket.get(value, 0) + 1
    return composition


def write_curve(curve: RichClubCurve, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "phi", "phi_null_mean", "phi_norm", "club_size"])
        for p in curve.points:
            writer.writerow(
                [p.threshold, _fmt(p.phi), _fmt(p.phi_null_mean), _fmt(p.phi_norm), p.club_size]
            )


def write_membership(membership: CoreMembership, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "rank", "in_core"])
        for node_id, rank, flag in zip(membership.ids, membership.rank, membership.in_core):
            writer.writerow([node_id, int(rank), str(bool(flag)).lower()])


def read_membership(path: str | Path) -> dict[str, bool]:
    members: dict[str, bool] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not {"node_id", "in_core"}.issubset(reader.fieldnames or ()):
            raise ValidationError(f"{path}: expected columns node_id,rank,in_core")
        for row in reader:
            members[row["node_id"]] = row["in_core"].strip().lower() in ("true", "1", "yes")
    if not members:
        raise ValidationError(f"{path}: empty membership table")
    return members


def _fmt(value: float) -> str:
    return "" if math.isnan(value) else repr(value)
