"""Glossary handling: merge raw sources, expand surface variants, bucket by length.

A glossary entry (locution) is one or more tokens, e.g. "tax rate". Matching
happens on normalized token tuples, so the buckets map token tuples of a given
length to the canonical form the count is booked under.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import normalize
from .errors import ValidationError

_SIBILANT_ENDINGS = ("s", "x", "z", "ch", "sh")
_VOWELS = "aeiou"


def pluralize(text: str) -> str:
    """Rule-based plural of the final word: +s, +es after sibilants, y -> ies."""
    head, _, last = text.rpartition(" ")
    if len(last) > 1 and last.endswith("y") and last[-2] not in _VOWELS:
        plural = last[:-1] + "ies"
    elif last.endswith(_SIBILANT_ENDINGS):
        plural = last + "es"
    else:
        plural = last + "s"
    return f"{head} {plural}" if head else plural


@dataclass(frozen=True)
class RawEntry:
    """One line of a glossary source before variant expansion."""

    text: str
    variants: tuple[str, ...] = ()
    source: str = ""


@dataclass(frozen=True)
class Locution:
    canonical: str
    variants: frozenset[str]
    sources: frozenset[str]

    def merged_with(self, other: "Locution") -> "Locution":
        if other.canonical != self.canonical:
            raise ValueError("cannot merge locutions with different canonicals")
        return Locution(
            canonical=self.canonical,
            variants=self.variants | other.variants,
            sources=self.sources | other.sources,
        )


def generate_variants(entry: RawEntry) -> Locution:
    """Expand one raw entry into its surface variants.

    The variant set holds the normalized form, hyphen-joined and hyphen-split
    spellings when the entry contains a hyphen, a rule-based plural of each of
    those, and any explicit variants (acronym expansions, surname reductions)
    passed through verbatim.
    """
    tokens = normalize(entry.text)
    if not tokens:
        raise ValidationError(f"glossary entry {entry.text!r} has no tokens")
    canonical = " ".join(tokens)
    surfaces = {canonical}
    as_written = entry.text.strip().lower()
    if as_written and as_written != canonical:
        surfaces.add(as_written)
    variants = set(surfaces)
    for surface in surfaces:
        variants.add(pluralize(surface))
    for explicit in entry.variants:
        explicit = explicit.strip().lower()
        if explicit:
            variants.add(explicit)
    sources = frozenset({entry.source} if entry.source else set())
    return Locution(canonical=canonical, variants=frozenset(variants), sources=sources)


class Glossary:
    """Immutable set of locutions with variants bucketed by token length."""

    def __init__(self, locutions: tuple[Locution, ...]):
        self.locutions = tuple(sorted(locutions, key=lambda l: l.canonical))
        buckets: dict[int, dict[tuple[str, ...], str]] = {}
        owner: dict[tuple[str, ...], str] = {}
        for loc in self.locutions:
            for surface in loc.variants:
                key = tuple(normalize(surface))
                if not key:
                    continue
                taken = owner.get(key)
                if taken is not None and taken != loc.canonical:
                    raise ValidationError(
                        f"variant {' '.join(key)!r} belongs to both "
                        f"{taken!r} and {loc.canonical!r}"
                    )
                owner[key] = loc.canonical
                buckets.setdefault(len(key), {})[key] = loc.canonical
        self.buckets = buckets
        self.max_len = max(buckets) if buckets else 0

    def __len__(self) -> int:
        return len(self.locutions)

    def canonicals(self) -> list[str]:
        return [loc.canonical for loc in self.locutions]

    def variant_universe(self) -> set[tuple[str, ...]]:
        return {key for bucket in self.buckets.values() for key in bucket}


def build_glossary(entries) -> Glossary:
    """Expand and merge raw entries; entries identical after normalization merge."""
    by_canonical: dict[str, Locution] = {}
    for entry in entries:
        loc = generate_variants(entry)
        prev = by_canonical.get(loc.canonical)
        by_canonical[loc.canonical] = loc if prev is None else prev.merged_with(loc)
    if not by_canonical:
        raise ValidationError("no glossary entries supplied")
    return Glossary(tuple(by_canonical.values()))


def merge_glossaries(a, b) -> Glossary:
    """Deduplicated union of two raw term lists."""
    return build_glossary(list(a) + list(b))


def load_source(path: str | Path, source: str | None = None) -> list[RawEntry]:
    """Read a glossary source file.

    Plain text: one entry per line, ``canonical<TAB>variant1|variant2|...``
    with ``#`` comments. JSON: a list of objects with ``canonical`` and
    optional ``variants`` / ``source`` fields.
    """
    path = Path(path)
    tag = source if source is not None else path.stem
    if path.suffix.lower() == ".json":
        data = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(data, list):
            raise ValidationError(f"glossary JSON {path} must be a list of entries")
        entries = []
        for item in data:
            if "canonical" not in item:
                raise ValidationError(f"glossary JSON {path}: entry without 'canonical'")
            entries.append(
                RawEntry(
                    text=item["canonical"],
                    variants=tuple(item.get("variants", ())),
                    source=item.get("source", tag),
                )
            )
        return entries
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        text, _, rest = line.partition("\t")
        if not text.strip():
            raise ValidationError(f"{path}:{lineno}: empty canonical")
        variants = tuple(v.strip() for v in rest.split("|") if v.strip()) if rest else ()
        entries.append(RawEntry(text=text.strip(), variants=variants, source=tag))
    return entries


def save_glossary(glossary: Glossary, path: str | Path) -> None:
    payload = [
        {
            "canonical": loc.canonical,
            "variants": sorted(loc.variants),
            "sources": sorted(loc.sources),
        }
        for loc in glossary.locutions
    ]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_glossary(path: str | Path) -> Glossary:
    """Load a glossary previously written by :func:`save_glossary`."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    locutions = []
    for item in data:
        locutions.append(
            Locution(
                canonical=item["canonical"],
                variants=frozenset(item["variants"]),
                sources=frozenset(item.get("sources", ())),
            )
        )
    return Glossary(tuple(locutions))
