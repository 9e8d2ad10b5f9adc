"""Document-term counting with longest-match-first consumption.

Counting walks the length buckets from the longest locutions down to single
words so that e.g. an occurrence of "tax rate" is never double counted as
"tax": once an n-gram matches, its token positions are consumed and cannot
take part in any shorter (or later) match.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus
from .errors import ValidationError
from .glossary import Glossary


def count_occurrences(tokens, glossary: Glossary) -> dict[str, int]:
    """Count glossary occurrences in a token stream.

    For each token length from the longest bucket down to 1, the stream is
    scanned left to right; a window matches only if none of its positions has
    been consumed by an earlier (longer or more leftward) match. Variant
    counts roll up into their canonical term.
    """
    counts: dict[str, int] = {}
    tokens = tuple(tokens)
    n = len(tokens)
    consumed = bytearray(n)
    for length in range(glossary.max_len, 0, -1):
        bucket = glossary.buckets.get(length)
        if not bucket or length > n:
            continue
        i = 0
        while i + length <= n:
            if any(consumed[i : i + length]):
                i += 1
                continue
            canonical = bucket.get(tokens[i : i + length])
            if canonical is None:
                i += 1
                continue
            counts[canonical] = counts.get(canonical, 0) + 1
            consumed[i : i + length] = b"\x01" * length
            i += length
    return counts


@dataclass(frozen=True)
class DocTermMatrix:
    """Documents x canonical terms, absolute counts and relative frequencies."""

    doc_ids: tuple[str, ...]
    terms: tuple[str, ...]
    abs: np.ndarray
    rel: np.ndarray
    doc_lengths: np.ndarray

    def __post_init__(self):
        n_docs, n_terms = self.abs.shape
        if len(self.doc_ids) != n_docs or len(self.terms) != n_terms:
            raise ValidationError("matrix labels do not match matrix shape")
        if self.rel.shape != self.abs.shape or len(self.doc_lengths) != n_docs:
            raise ValidationError("matrix companions do not match matrix shape")

    @property
    def shape(self) -> tuple[int, int]:
        return self.abs.shape

    def row(self, doc_id: str, kind: str = "rel") -> np.ndarray:
        idx = self.doc_ids.index(doc_id)
        return (self.rel if kind == "rel" else self.abs)[idx]

    def content_scores(self) -> np.ndarray:
        """Per-document sum of relative frequencies (the content proxy)."""
        return self.rel.sum(axis=1)


def economic_content(rel_row) -> float:
    """Share of a document devoted to glossary terms: sum of its relative row."""
    return float(np.asarray(rel_row, dtype=float).sum())


def build_matrix(corpus: Corpus, glossary: Glossary) -> tuple[DocTermMatrix, list[str]]:
    """Count every document and assemble the matrix.

    Documents without a single occurrence are removed and returned separately;
    terms that never occur are dropped.
    """
    terms = glossary.canonicals()
    col = {t: j for j, t in enumerate(terms)}
    abs_counts = np.zeros((len(corpus), len(terms)), dtype=np.int64)
    lengths = np.zeros(len(corpus), dtype=np.int64)
    for i, doc in enumerate(corpus.documents):
        lengths[i] = doc.raw_length
        for canonical, count in count_occurrences(doc.tokens, glossary).items():
            abs_counts[i, col[canonical]] = count

    keep_rows = abs_counts.sum(axis=1) > 0
    removed = [doc.id for doc, keep in zip(corpus.documents, keep_rows) if not keep]
    if not keep_rows.any():
        raise ValidationError("no glossary occurrences in corpus")
    abs_counts = abs_counts[keep_rows]
    lengths = lengths[keep_rows]
    doc_ids = tuple(doc.id for doc, keep in zip(corpus.documents, keep_rows) if keep)

    keep_cols = abs_counts.sum(axis=0) > 0
    abs_counts = abs_counts[:, keep_cols]
    kept_terms = tuple(t for t, keep in zip(terms, keep_cols) if keep)

    rel = abs_counts / lengths[:, None]
    matrix = DocTermMatrix(
        doc_ids=doc_ids,
        terms=kept_terms,
        abs=abs_counts,
        rel=rel,
        doc_lengths=lengths,
    )
    return matrix, removed


def write_matrix(matrix: DocTermMatrix, path: str | Path, removed: list[str] | None = None) -> None:
    """CSV with doc ids in the first column plus a JSON sidecar (<stem>.meta.json)."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", *matrix.terms])
        for doc_id, row in zip(matrix.doc_ids, matrix.abs):
            writer.writerow([doc_id, *row.tolist()])
    sidecar = {
        "doc_lengths": {d: int(l) for d, l in zip(matrix.doc_ids, matrix.doc_lengths)},
        "removed_docs": list(removed or []),
    }
    sidecar_path(path).write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")


def sidecar_path(matrix_path: str | Path) -> Path:
    return Path(matrix_path).with_suffix(".meta.json")


def read_matrix(path: str | Path) -> tuple[DocTermMatrix, list[str]]:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "id":
            raise ValidationError(f"{path}: expected header starting with 'id'")
        terms = tuple(header[1:])
        doc_ids, rows = [], []
        for rec in reader:
            doc_ids.append(rec[0])
            rows.append([int(v) for v in rec[1:]])
    meta = sidecar_path(path)
    if not meta.exists():
        raise ValidationError(f"matrix sidecar {meta} not found")
    sidecar = json.loads(meta.read_text(encoding="utf-8"))
    try:
        lengths = np.array([sidecar["doc_lengths"][d] for d in doc_ids], dtype=np.int64)
    except KeyError as exc:
        raise ValidationError(f"matrix sidecar {meta} lacks doc_length for {exc}") from exc
    abs_counts = np.array(rows, dtype=np.int64)
    rel = abs_counts / lengths[:, None]
    matrix = DocTermMatrix(
        doc_ids=tuple(doc_ids),
        terms=terms,
        abs=abs_counts,
        rel=rel,
        doc_lengths=lengths,
    )
    return matrix, list(sidecar.get("removed_docs", []))
