"""Journal-by-institution frequency counts and inverse-frequency weights.

A journal used by researchers at many institutions discriminates poorly
between them, so each raw publication count is scaled by log(N / n_m), where
N is the number of institutions and n_m the number of institutions that
published in journal m.  Journals used by every institution get weight zero
and are elided from storage; they contribute nothing downstream.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from typing import IO, Mapping

import numpy as np

from .errors import ConfigError, DataError
from .ingest import Corpus

LOG_BASES = ("natural", "base10")


@dataclass(frozen=True)
class FreqMatrix:
    """Sparse journal-by-institution publication counts.

    ``entries`` maps (journal_index, institution_index) to a positive count;
    absent means zero.  ``journal_doc_counts[m]`` is n_m, the number of
    distinct institutions with at least one paper in journal m.
    """

    journals: tuple[str, ...]
    institutions: tuple[str, ...]
    entries: Mapping[tuple[int, int], int]
    journal_doc_counts: tuple[int, ...]

    @property
    def n_journals(self) -> int:
        return len(self.journals)

    @property
    def n_institutions(self) -> int:
        return len(self.institutions)


@dataclass(frozen=True)
class WeightMatrix:
    """Sparse journal weights; column i is institution i's journal vector.

    An entry is stored only when the underlying count is positive and the
    journal is not used by every institution, so stored weights are > 0.
    """

    journals: tuple[str, ...]
    institutions: tuple[str, ...]
    entries: Mapping[tuple[int, int], float]
    log_base: str = "natural"

    @property
    def n_journals(self) -> int:
        return len(self.journals)

    @property
    def n_institutions(self) -> int:
        return len(self.institutions)

    def to_dense(self) -> np.ndarray:
        """Dense (n_journals, n_institutions) array of weights."""
        dense = np.zeros((len(self.journals), len(self.institutions)))
        for (m, i), w in self.entries.items():
            dense[m, i] = w
        return dense

    def zero_norm_institutions(self) -> list[str]:
        """Institutions whose whole weight column is zero."""
        seen = {i for (_, i) in self.entries}
        return [inst for i, inst in enumerate(self.institutions) if i not in seen]


def count_frequencies(corpus: Corpus) -> FreqMatrix:
    """Tally records into per-(journal, institution) publication counts."""
    if not corpus.institutions or not corpus.journals:
        raise DataError("corpus has no institutions or journals to count")
    j_index = {j: m for m, j in enumerate(corpus.journals)}
    i_index = {u: i for i, u in enumerate(corpus.institutions)}
    counts: Counter[tuple[int, int]] = Counter()
    for r in corpus.records:
        counts[(j_index[r.journal], i_index[r.institution])] += 1
    per_journal = [set() for _ in corpus.journals]
    for (m, i) in counts:
        per_journal[m].add(i)
    return FreqMatrix(
        journals=corpus.journals,
        institutions=corpus.institutions,
        entries=dict(counts),
        journal_doc_counts=tuple(len(s) for s in per_journal),
    )


def inverse_frequency(n_m: int, n_institutions: int, log_base: str = "natural") -> float:
    """log(N / n_m) in the configured base; exactly 0 when n_m == N."""
    if log_base not in LOG_BASES:
        raise ConfigError(f"unknown log base {log_base!r} (expected natural or base10)")
    if not 1 <= n_m <= n_institutions:
        raise ConfigError(f"n_m must satisfy 1 <= n_m <= N (got n_m={n_m}, N={n_institutions})")
    if n_m == n_institutions:
        return 0.0
    ratio = n_institutions / n_m
    return math.log(ratio) if log_base == "natural" else math.log10(ratio)


def compute_weights(freq: FreqMatrix, log_base: str = "natural") -> WeightMatrix:
    """Scale each count by the journal's inverse-frequency factor.

    Rows of journals used by every institution are all-zero and not stored.
    """
    n = freq.n_institutions
    factors = [inverse_frequency(n_m, n, log_base) for n_m in freq.journal_doc_counts]
    entries = {
        (m, i): count * factors[m]
        for (m, i), count in freq.entries.items()
        if freq.journal_doc_counts[m] != n
    }
    return WeightMatrix(
        journals=freq.journals,
        institutions=freq.institutions,
        entries=entries,
        log_base=log_base,
    )


def write_triplets(matrix: FreqMatrix | WeightMatrix, stream: IO[str]) -> None:
    """Write the sparse matrix as ``journal,institution,value`` rows.

    Rows are sorted by (journal index, institution index); float values use
    repr so they round-trip exactly.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["journal", "institution", "value"])
    for (m, i) in sorted(matrix.entries):
        value = matrix.entries[(m, i)]
        writer.writerow([matrix.journals[m], matrix.institutions[i], repr(value) if isinstance(value, float) else value])


def read_weight_triplets(stream: IO[str], log_base: str = "natural") -> WeightMatrix:
    """Rebuild a WeightMatrix from a triplet CSV produced by write_triplets."""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or [h.strip() for h in header[:3]] != ["journal", "institution", "value"]:
        raise DataError("weight triplets must start with header 'journal,institution,value'")
    raw: list[tuple[str, str, float]] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) < 3:
            raise DataError(f"weight triplets row {lineno}: expected 3 columns")
        try:
            raw.append((row[0], row[1], float(row[2])))
        except ValueError:
            raise DataError(f"weight triplets row {lineno}: value is not a number") from None
    journals = tuple(sorted({j for j, _, _ in raw}))
    institutions = tuple(sorted({i for _, i, _ in raw}))
    j_index = {j: m for m, j in enumerate(journals)}
    i_index = {u: i for i, u in enumerate(institutions)}
    entries = {(j_index[j], i_index[i]): w for j, i, w in raw}
    return WeightMatrix(journals=journals, institutions=institutions, entries=entries, log_base=log_base)


__all__ = [
    "LOG_BASES",
    "FreqMatrix",
    "WeightMatrix",
    "compute_weights",
    "count_frequencies",
    "inverse_frequency",
    "read_weight_triplets",
    "write_triplets",
]
