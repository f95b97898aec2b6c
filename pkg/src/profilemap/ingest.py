"""Parse, normalize, and filter publication records into an analyzable corpus.

Input is one row per (paper, institution) pair: co-authored papers are counted
in full for every participating institution.  Identifiers are normalized
deterministically (trim, Unicode case-fold, collapse internal whitespace) so
that two byte-identical inputs always produce the same corpus ordering.
"""

from __future__ import annotations

import csv
import io
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

from .errors import ConfigError, DataError

DOC_TYPES = ("article", "review", "note", "letter", "other")

#: Document types that count toward an institution's citable output.
CITABLE_DOC_TYPES = frozenset({"article", "review", "note", "letter"})

CSV_COLUMNS = ("institution", "journal", "year", "doc_type", "categories", "is_q1")

_WHITESPACE_RE = re.compile(r"\s+")

_BOOL_STRINGS = {"0": False, "1": True, "true": True, "false": False}


def normalize_id(raw: str) -> str:
    """Canonical form of an institution/journal/category identifier."""
    return _WHITESPACE_RE.sub(" ", raw.strip()).casefold()


@dataclass(frozen=True)
class PublicationRecord:
    """One paper occurrence for one institution."""

    institution: str
    journal: str
    year: int
    doc_type: str
    categories: frozenset[str]
    is_q1: bool


@dataclass(frozen=True)
class Corpus:
    """Immutable set of records plus deterministic institution/journal indexes.

    ``institutions`` and ``journals`` are sorted lexicographically by
    normalized id; every record's institution and journal appear there.
    ``unknown_doc_type_count`` counts input rows whose document type was not
    recognized and was mapped to ``other`` during parsing.
    """

    records: tuple[PublicationRecord, ...]
    institutions: tuple[str, ...]
    journals: tuple[str, ...]
    period: tuple[int, int] | None = None
    unknown_doc_type_count: int = 0


@dataclass(frozen=True)
class InstitutionMeta:
    """Descriptive metadata for one institution.

    ``q1_share`` is the fraction of records flagged as first-quartile; it is
    None when the institution has no records.  ``category_counts`` may sum to
    more than ``ndocs`` because a record can carry several categories.
    """

    id: str
    ndocs: int
    q1_share: float | None
    category_counts: dict[str, int] = field(default_factory=dict)


def build_corpus(
    records: Iterable[PublicationRecord],
    period: tuple[int, int] | None = None,
    unknown_doc_type_count: int = 0,
) -> Corpus:
    """Assemble a Corpus, deriving the sorted institution/journal index sets."""
    recs = tuple(records)
    institutions = tuple(sorted({r.institution for r in recs}))
    journals = tuple(sorted({r.journal for r in recs}))
    if period is None and recs:
        years = [r.year for r in recs]
        period = (min(years), max(years))
    return Corpus(recs, institutions, journals, period, unknown_doc_type_count)


def load_alias_table(source: IO[bytes] | bytes) -> dict[str, str]:
    """Read a ``raw_name,canonical_name`` CSV mapping; both sides normalized."""
    text = _as_text(source)
    reader = csv.reader(text)
    try:
        header = next(reader)
    except StopIteration:
        return {}
    if [h.strip() for h in header[:2]] != ["raw_name", "canonical_name"]:
        raise DataError("alias table must start with header 'raw_name,canonical_name'")
    aliases: dict[str, str] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) < 2:
            raise DataError(f"alias table row {lineno}: expected 2 columns")
        aliases[normalize_id(row[0])] = normalize_id(row[1])
    return aliases


def load_field_map(source: IO[bytes] | bytes) -> dict[str, frozenset[str]]:
    """Read a JSON object mapping field names to arrays of category names."""
    text = _as_text(source).read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"field map is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise DataError("field map must be a JSON object")
    fields: dict[str, frozenset[str]] = {}
    for name, cats in data.items():
        if not isinstance(cats, list):
            raise DataError(f"field map entry {name!r} must be an array of categories")
        fields[name] = frozenset(normalize_id(str(c)) for c in cats)
    return fields


def _as_text(source: IO[bytes] | bytes) -> io.TextIOBase:
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    return io.TextIOWrapper(source, encoding="utf-8", newline="")


def _parse_doc_type(raw: str) -> tuple[str, bool]:
    """Map a raw doc_type string to the enum; flags unknown values."""
    value = normalize_id(raw)
    if value in DOC_TYPES:
        return value, False
    return "other", True


def _parse_bool(raw: object, where: str) -> bool:
    if isinstance(raw, bool):
        return raw
    if isinstance(raw, int) and raw in (0, 1):
        return bool(raw)
    if isinstance(raw, str):
        value = raw.strip().casefold()
        if value in _BOOL_STRINGS:
            return _BOOL_STRINGS[value]
    raise DataError(f"{where}: is_q1 must be one of 0, 1, true, false (got {raw!r})")


def _parse_year(raw: object, where: str) -> int:
    if isinstance(raw, bool):
        raise DataError(f"{where}: year must be an integer (got {raw!r})")
    if isinstance(raw, int):
        return raw
    try:
        return int(str(raw).strip())
    except ValueError:
        raise DataError(f"{where}: year must be an integer (got {raw!r})") from None


def _parse_categories(raw: object, where: str) -> frozenset[str]:
    if raw is None:
        return frozenset()
    if isinstance(raw, str):
        parts = raw.split(";")
    elif isinstance(raw, list):
        parts = [str(p) for p in raw]
    else:
        raise DataError(f"{where}: categories must be a ';'-separated string or a list")
    return frozenset(c for c in (normalize_id(p) for p in parts) if c)


def parse_records(
    source: IO[bytes] | bytes,
    format: str = "csv",
    aliases: Mapping[str, str] | None = None,
) -> Corpus:
    """Parse a UTF-8 byte stream of publication rows into a Corpus.

    ``format`` is ``csv`` (header row required, columns
    institution,journal,year,doc_type,categories,is_q1) or ``jsonl`` (one
    object per line, same field names).  Institution names are passed through
    the optional alias table after normalization.  Unknown doc_type values map
    to ``other`` and increment ``Corpus.unknown_doc_type_count``.
    """
    if format not in ("csv", "jsonl"):
        raise ConfigError(f"unknown input format {format!r} (expected csv or jsonl)")
    text = _as_text(source)
    try:
        if format == "csv":
            rows = _iter_csv(text)
        else:
            rows = _iter_jsonl(text)
        records: list[PublicationRecord] = []
        warn_count = 0
        for where, raw in rows:
            institution = normalize_id(str(raw["institution"]))
            journal = normalize_id(str(raw["journal"]))
            if aliases:
                institution = aliases.get(institution, institution)
            if not institution or not journal:
                raise DataError(f"{where}: empty institution or journal id")
            doc_type, unknown = _parse_doc_type(str(raw["doc_type"]))
            if unknown:
                warn_count += 1
            records.append(
                PublicationRecord(
                    institution=institution,
                    journal=journal,
                    year=_parse_year(raw["year"], where),
                    doc_type=doc_type,
                    categories=_parse_categories(raw["categories"], where),
                    is_q1=_parse_bool(raw["is_q1"], where),
                )
            )
    except UnicodeDecodeError as exc:
        raise DataError(f"input is not valid UTF-8: {exc}") from exc
    return build_corpus(records, unknown_doc_type_count=warn_count)


def _iter_csv(text: io.TextIOBase):
    reader = csv.reader(text)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("csv input is empty (header row required)") from None
    positions = {name.strip(): idx for idx, name in enumerate(header)}
    missing = [c for c in CSV_COLUMNS if c not in positions]
    if missing:
        raise DataError(f"csv header missing column(s): {', '.join(missing)}")
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) <= max(positions[c] for c in CSV_COLUMNS):
            raise DataError(f"row {lineno}: expected {len(header)} columns, got {len(row)}")
        yield f"row {lineno}", {c: row[positions[c]] for c in CSV_COLUMNS}


def _iter_jsonl(text: io.TextIOBase):
    for lineno, line in enumerate(text, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise DataError(f"line {lineno}: expected a JSON object")
        missing = [c for c in CSV_COLUMNS if c not in obj and c != "categories"]
        if missing:
            raise DataError(f"line {lineno}: missing field(s): {', '.join(missing)}")
        yield f"line {lineno}", {c: obj.get(c) for c in CSV_COLUMNS}


def filter_citable(corpus: Corpus) -> Corpus:
    """Keep only articles, reviews, notes, and letters."""
    kept = tuple(r for r in corpus.records if r.doc_type in CITABLE_DOC_TYPES)
    return build_corpus(kept, corpus.period, corpus.unknown_doc_type_count)


def filter_period(corpus: Corpus, start: int, end: int) -> Corpus:
    """Keep records with start <= year <= end and stamp the period."""
    if start > end:
        raise ConfigError(f"period start {start} is after end {end}")
    kept = tuple(r for r in corpus.records if start <= r.year <= end)
    return build_corpus(kept, (start, end), corpus.unknown_doc_type_count)


def filter_field(corpus: Corpus, field_name: str, field_map: Mapping[str, frozenset[str]]) -> Corpus:
    """Keep records whose categories intersect the field's category set."""
    if field_name not in field_map:
        known = ", ".join(sorted(field_map)) or "(none)"
        raise ConfigError(f"unknown field {field_name!r}; known fields: {known}")
    wanted = field_map[field_name]
    kept = tuple(r for r in corpus.records if r.categories & wanted)
    return build_corpus(kept, corpus.period, corpus.unknown_doc_type_count)


def apply_min_output(corpus: Corpus, min_docs: int = 50) -> Corpus:
    """Drop institutions with fewer than ``min_docs`` records (strict <)."""
    if min_docs < 0:
        raise ConfigError(f"min_docs must be >= 0 (got {min_docs})")
    counts = Counter(r.institution for r in corpus.records)
    keep = {inst for inst, n in counts.items() if n >= min_docs}
    kept = tuple(r for r in corpus.records if r.institution in keep)
    return build_corpus(kept, corpus.period, corpus.unknown_doc_type_count)


def institution_meta(corpus: Corpus) -> list[InstitutionMeta]:
    """Per-institution document counts, Q1 shares, and category tallies."""
    ndocs: Counter[str] = Counter()
    q1: Counter[str] = Counter()
    cats: dict[str, Counter[str]] = {inst: Counter() for inst in corpus.institutions}
    for r in corpus.records:
        ndocs[r.institution] += 1
        if r.is_q1:
            q1[r.institution] += 1
        cats[r.institution].update(r.categories)
    out = []
    for inst in corpus.institutions:
        n = ndocs[inst]
        share = q1[inst] / n if n > 0 else None
        counts = {c: cats[inst][c] for c in sorted(cats[inst])}
        out.append(InstitutionMeta(id=inst, ndocs=n, q1_share=share, category_counts=counts))
    return out


def category_profile(corpus: Corpus, institution: str) -> dict[str, float]:
    """Fraction of an institution's category assignments per category.

    Fractions sum to 1 (within float tolerance); the map is empty when the
    institution's records carry no categories.
    """
    if institution not in corpus.institutions:
        raise ConfigError(f"unknown institution {institution!r}")
    counts: Counter[str] = Counter()
    for r in corpus.records:
        if r.institution == institution:
            counts.update(r.categories)
    total = sum(counts.values())
    if total == 0:
        return {}
    return {c: counts[c] / total for c in sorted(counts)}


__all__ = [
    "CITABLE_DOC_TYPES",
    "CSV_COLUMNS",
    "DOC_TYPES",
    "Corpus",
    "InstitutionMeta",
    "PublicationRecord",
    "apply_min_output",
    "build_corpus",
    "category_profile",
    "filter_citable",
    "filter_field",
    "filter_period",
    "institution_meta",
    "load_alias_table",
    "load_field_map",
    "normalize_id",
    "parse_records",
]
