"""Corpus ingestion from local files and mechanical text normalization."""

from __future__ import annotations

import csv
import datetime as dt
import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from unicodedata import category as _unicode_category

from .errors import ValidationError

METADATA_COLUMNS = ("id", "date", "speaker", "category")


@lru_cache(maxsize=None)
def _space_out(char: str) -> str:
    # Every Unicode punctuation character becomes a space, so hyphenated
    # spellings match their split glossary variants.
    return " " if _unicode_category(char).startswith("P") else char


def normalize(text: str, cut_marker: str | None = None) -> list[str]:
    """Turn raw text into a lowercase token stream.

    Punctuation (including hyphens) is replaced by whitespace, everything
    after the first occurrence of ``cut_marker`` is discarded, and tokens
    are split on whitespace runs. Idempotent on its own space-joined output.
    """
    if cut_marker:
        pos = text.find(cut_marker)
        if pos >= 0:
            text = text[:pos]
    return "".join(_space_out(c) for c in text.lower()).split()


@dataclass(frozen=True)
class Document:
    """One document plus the metadata used as node attributes downstream."""

    id: str
    date: dt.date
    speaker: str
    category: str
    tokens: tuple[str, ...]

    @property
    def raw_length(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Corpus:
    """Immutable, id-ordered document collection."""

    documents: tuple[Document, ...]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.documents:
            raise ValidationError("corpus is empty")
        ids = [d.id for d in self.documents]
        if ids != sorted(ids):
            object.__setattr__(
                self, "documents", tuple(sorted(self.documents, key=lambda d: d.id))
            )

    def __len__(self) -> int:
        return len(self.documents)

    def ids(self) -> list[str]:
        return [d.id for d in self.documents]

    def empty_document_ids(self) -> list[str]:
        return [d.id for d in self.documents if d.raw_length == 0]


def _read_metadata(path: Path) -> dict[str, dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in METADATA_COLUMNS if c not in header]
        if missing:
            raise ValidationError(
                f"metadata {path} is missing column(s): {', '.join(missing)}"
            )
        rows = list(reader)
    problems = []
    seen: dict[str, int] = {}
    table: dict[str, dict[str, str]] = {}
    for row in rows:
        doc_id = (row["id"] or "").strip()
        if not doc_id:
            problems.append("row with empty id")
            continue
        if doc_id in seen:
            problems.append(f"duplicate id {doc_id!r}")
            continue
        seen[doc_id] = 1
        try:
            dt.date.fromisoformat(row["date"].strip())
        except (ValueError, AttributeError):
            problems.append(f"unparseable date {row['date']!r} for id {doc_id!r}")
            continue
        table[doc_id] = row
    if problems:
        raise ValidationError("bad metadata: " + "; ".join(problems))
    return table


def ingest(
    corpus_dir: str | Path,
    metadata: str | Path,
    cut_marker: str | None = None,
) -> Corpus:
    """Read ``<id>.txt`` files and their metadata rows into a Corpus.

    Every file must match exactly one metadata row and vice versa; all
    offenders are reported in a single error.
    """
    corpus_dir = Path(corpus_dir)
    table = _read_metadata(Path(metadata))
    files = {p.stem: p for p in sorted(corpus_dir.glob("*.txt"))}
    if not files:
        raise ValidationError(f"no .txt documents found in {corpus_dir}")

    unmatched_files = sorted(set(files) - set(table))
    unmatched_rows = sorted(set(table) - set(files))
    problems = []
    if unmatched_files:
        problems.append("files without metadata row: " + ", ".join(unmatched_files))
    if unmatched_rows:
        problems.append("metadata rows without file: " + ", ".join(unmatched_rows))
    if problems:
        raise ValidationError("; ".join(problems))

    documents = []
    for doc_id, path in files.items():
        row = table[doc_id]
        tokens = normalize(path.read_text(encoding="utf-8"), cut_marker=cut_marker)
        documents.append(
            Document(
                id=doc_id,
                date=dt.date.fromisoformat(row["date"].strip()),
                speaker=row["speaker"].strip(),
                category=row["category"].strip(),
                tokens=tuple(tokens),
            )
        )
    provenance = {
        "corpus_dir": str(corpus_dir),
        "metadata": str(metadata),
        "cut_marker": cut_marker,
        "ingested_at": dt.datetime.now(dt.timezone.utc).isoformat(),
    }
    return Corpus(documents=tuple(sorted(documents, key=lambda d: d.id)), provenance=provenance)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write one JSON record per document (id, date, speaker, category, tokens)."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            fh.write(
                json.dumps(
                    {
                        "id": doc.id,
                        "date": doc.date.isoformat(),
                        "speaker": doc.speaker,
                        "category": doc.category,
                        "tokens": list(doc.tokens),
                    }
                )
                + "\n"
            )


def load_corpus(path: str | Path) -> Corpus:
    documents = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            documents.append(
                Document(
                    id=rec["id"],
                    date=dt.date.fromisoformat(rec["date"]),
                    speaker=rec["speaker"],
                    category=rec["category"],
                    tokens=tuple(rec["tokens"]),
                )
            )
    return Corpus(documents=tuple(documents), provenance={"corpus_file": str(path)})
