"""Cosine similarity network with permutation-test edge filtering.

The observed cosine of every document pair is tested against a null built by
independently reshuffling the entries of each document's frequency row. An
edge survives when its estimated exceedance probability beats the (Bonferroni
corrected) threshold alpha / C(n, 2).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import WeightedGraph, spawn_rng
from .termmatrix import DocTermMatrix


def cosine(x, y) -> float:
    """Cosine similarity (x . y) / (|x| |y|) of two non-negative vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValidationError("cosine arguments must have the same dimension")
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise ValidationError("cosine of a zero vector is undefined")
    return float(min(1.0, max(0.0, float(x @ y) / (nx * ny))))


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric matrix of pairwise cosines with a zero diagonal."""

    w: np.ndarray

    @property
    def n(self) -> int:
        return self.w.shape[0]

    def pair_values(self) -> np.ndarray:
        iu = np.triu_indices(self.n, k=1)
        return self.w[iu]


@dataclass(frozen=True)
class PValueMatrix:
    """Estimated exceedance probabilities from the row-reshuffle null."""

    p: np.ndarray
    n_perm: int
    seed: int
    smoothing: bool = False

    @property
    def n(self) -> int:
        return self.p.shape[0]


def _frequency_rows(source, use: str = "abs") -> np.ndarray:
    if isinstance(source, DocTermMatrix):
        rows = source.abs if use == "abs" else source.rel
    else:
        rows = source
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise ValidationError("need a 2-d matrix with at least 2 rows")
    return rows


def _row_normalized(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1)
    zero = np.nonzero(norms == 0)[0]
    if zero.size:
        raise ValidationError(f"all-zero rows at indices {zero.tolist()}")
    return rows / norms[:, None]

def _pairwise_cosines(unit_rows: np.ndarray) -> np.ndarray:
    w = unit_rows @ unit_rows.T
    np.clip(w, 0.0, 1.0, out=w)
    np.fill_diagonal(w, 0.0)
    return w


def similarity_matrix(source, use: str = "abs") -> SimilarityMatrix:
    """All C(n, 2) pairwise cosines; loops (the diagonal) are set to zero."""
    unit = _row_normalized(_frequency_rows(source, use))
    return SimilarityMatrix(w=_pairwise_cosines(unit))


def permutation_pvalues(
    source,
    n_perm: int,
    seed: int,
    use: str = "abs",
    workers: int = 1,
    smoothing: bool = False,
) -> PValueMatrix:
    """Row-reshuffle permutation test over all document pairs.

    For each of ``n_perm`` instances every row is independently permuted
    (preserving its value multiset, hence its norm) and the full cosine
    matrix of the randomized rows is compared against the observed one:
    p[i, j] is the fraction of instances whose randomized cosine reaches
    the observed value. Ties count against significance.

    The randomized matrices are never materialized as an ensemble; exceedance
    counters accumulate instance by instance, and instances are distributed
    over ``workers`` threads (the count merge is order independent, so any
    schedule gives bit-identical results for a fixed seed).

    With ``smoothing`` the estimate becomes (count + 1) / (n_perm + 1), a
    guard against literal zero p-values at finite resolution.
    """
    if n_perm < 1:
        raise ValidationError("n_perm must be >= 1")
    unit = _row_normalized(_frequency_rows(source, use))
    n = unit.shape[0]
    observed = unit @ unit.T

    def accumulate(instances) -> np.ndarray:
        counts = np.zeros((n, n), dtype=np.int64)
        for t in instances:
            rng = spawn_rng(seed, int(t))
            randomized = rng.permuted(unit, axis=1)
            counts += (randomized @ randomized.T) >= observed
        return counts

    if workers <= 1:
        counts = accumulate(range(n_perm))
    else:
        chunks = np.array_split(np.arange(n_perm), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = sum(pool.map(accumulate, chunks))

    if smoothing:
        p = (counts + 1) / (n_perm + 1)
    else:
        p = counts / n_perm
    np.fill_diagonal(p, 1.0)
    return PValueMatrix(p=p, n_perm=n_perm, seed=seed, smoothing=smoothing)


def bonferroni_threshold(alpha: float, n: int) -> float:
    """Per-pair significance threshold alpha / C(n, 2)."""
    if not 0 < alpha < 1:
        raise ValidationError("alpha must be in (0, 1)")
    if n < 2:
        raise ValidationError("need at least 2 nodes for a comparison")
    return alpha / math.comb(n, 2)


def filter_network(
    similarity: SimilarityMatrix,
    pvalues: PValueMatrix,
    tau: float,
    ids,
    attrs: dict[str, dict[str, str]] | None = None,
) -> WeightedGraph:
    """Keep edge (i, j) with its cosine weight iff p[i, j] < tau."""
    if similarity.n != pvalues.n:
        raise ValidationError("similarity and p-value matrices differ in size")
    ids = tuple(ids)
    if len(ids) != similarity.n:
        raise ValidationError("node id count does not match matrix size")
    keep = pvalues.p < tau
    weights = np.where(keep, similarity.w, 0.0)
    weights = np.triu(weights, k=1)
    weights = weights + weights.T
    return WeightedGraph(ids=ids, weights=weights, attrs=dict(attrs or {}))
