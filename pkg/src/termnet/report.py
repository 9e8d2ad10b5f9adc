"""Figure-ready aggregates: content time series, period labels, group term tables."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .termmatrix import DocTermMatrix

PERIOD_LABELS = ("recession", "normal")


@dataclass(frozen=True)
class Period:
    start: dt.date
    end: dt.date
    label: str

    def __post_init__(self):
        if self.end < self.start:
            raise ValidationError(f"period {self.start}..{self.end} ends before it starts")
        if self.label not in PERIOD_LABELS:
            raise ValidationError(f"period label {self.label!r} not in {PERIOD_LABELS}")

    def contains(self, date: dt.date) -> bool:
        return self.start <= date <= self.end


def load_periods(path: str | Path) -> list[Period]:
    periods = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not {"start", "end", "label"}.issubset(reader.fieldnames or ()):
            raise ValidationError(f"{path}: expected columns start,end,label")
        for row in reader:
            try:
                start = dt.date.fromisoformat(row["start"].strip())
                end = dt.date.fromisoformat(row["end"].strip())
            except ValueError as exc:
                raise ValidationError(f"{path}: {exc}") from exc
            periods.append(Period(start=start, end=end, label=row["label"].strip()))
    return periods


def period_label(date: dt.date, periods: list[Period]) -> str:
    """Label for a date; overlaps resolve to recession, unmatched dates to normal."""
    if any(p.label == "recession" and p.contains(date) for p in periods):
        return "recession"
    return "normal"


@dataclass(frozen=True)
class ContentRow:
    doc_id: str
    date: dt.date
    score: float
    period: str


def content_timeseries(
    matrix: DocTermMatrix,
    dates: dict[str, dt.date],
    periods: list[Period] | None = None,
) -> list[ContentRow]:
    """Per-document content score joined with its date and period label."""
    periods = periods or []
    missing = [d for d in matrix.doc_ids if d not in dates]
    if missing:
        raise ValidationError(f"no date for document(s): {', '.join(missing[:5])}")
    rows = []
    for doc_id, score in zip(matrix.doc_ids, matrix.content_scores()):
        date = dates[doc_id]
        rows.append(
            ContentRow(
                doc_id=doc_id,
                date=date,
                score=float(score),
                period=period_label(date, periods),
            )
        )
    return rows


def write_timeseries(rows: list[ContentRow], path: str | Path) -> None:
    # Both the raw score and its x100 percentage are emitted.
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", "date", "score", "percentage", "period"])
        for row in rows:
            writer.writerow(
                [row.doc_id, row.date.isoformat(), repr(row.score), repr(100 * row.score), row.period]
            )


@dataclass(frozen=True)
class GroupTermTable:
    """Aggregate term frequencies for one side of the core/periphery split."""

    group: str
    rows: tuple[tuple[str, int], ...]  # (term, frequency), descending
    cutoff_applied: bool

    def terms(self) -> list[str]:
        return [term for term, _ in self.rows]


def _table(matrix: DocTermMatrix, member_rows: np.ndarray, group: str,
           dropped: set[str], cutoff_applied: bool) -> GroupTermTable:
    sums = matrix.abs[member_rows].sum(axis=0)
    rows = [
        (term, int(total))
        for term, total in zip(matrix.terms, sums)
        if total > 0 and term not in dropped
    ]
    rows.sort(key=lambda item: (-item[1], item[0]))
    return GroupTermTable(group=group, rows=tuple(rows), cutoff_applied=cutoff_applied)


def group_terms(
    matrix: DocTermMatrix,
    in_core: dict[str, bool],
    cutoff: float | None = None,
) -> tuple[GroupTermTable, GroupTermTable]:
    """Column sums of absolute frequencies for the core and periphery groups.

    ``cutoff`` removes the globally most frequent terms before emission: the
    top ceil(cutoff * n_terms) terms ranked by total mass over the grouped
    documents. Without it, core and periphery column sums add up exactly to
    the whole-matrix column sums over those documents.
    """
    unknown = [d for d in in_core if d not in set(matrix.doc_ids)]
    if unknown:
        raise ValidationError(f"membership mentions unknown document(s): {', '.join(unknown[:5])}")
    core_mask = np.array([in_core.get(d, False) for d in matrix.doc_ids])
    periphery_mask = np.array([d in in_core and not in_core[d] for d in matrix.doc_ids])
    if not core_mask.any():
        raise ValidationError("core group is empty")
    if not periphery_mask.any():
        raise ValidationError("periphery group is empty")

    dropped: set[str] = set()
    if cutoff is not None:
        if not 0 < cutoff < 1:
            raise ValidationError("cutoff must be a fraction in (0, 1)")
        grouped = core_mask | periphery_mask
        global_mass = matrix.abs[grouped].sum(axis=0)
        k = math.ceil(cutoff * len(matrix.terms))
        by_mass = sorted(zip(matrix.terms, global_mass), key=lambda item: (-item[1], item[0]))
        dropped = {term for term, _ in by_mass[:k]}

    applied = cutoff is not None
    return (
        _table(matrix, core_mask, "core", dropped, applied),
        _table(matrix, periphery_mask, "periphery", dropped, applied),
    )


def write_group_table(table: GroupTermTable, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["term", "frequency"])
        for term, frequency in table.rows:
            writer.writerow([term, frequency])
