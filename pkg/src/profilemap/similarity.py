"""First- and second-order cosine similarity between institutions.

First-order similarity is the cosine between two institutions' journal-weight
vectors.  Second-order similarity is the cosine between their columns of the
first-order matrix: two institutions are alike when they are similar to the
same set of other institutions, which smooths sparse direct overlaps.

All dot products are accumulated with np.einsum in its unoptimized mode,
which sums in ascending index order in a single thread, so results are
reproducible bit-for-bit across runs and thread counts.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import ConfigError, ConsistencyError, DataError
from .weighting import WeightMatrix


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric institution-by-institution cosine matrix in [0, 1].

    ``order`` is "first" for the weight-vector cosine and "second" for the
    cosine over first-order columns.  The diagonal is exactly 1.
    """

    order: str
    institutions: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values.setflags(write=False)


@dataclass(frozen=True)
class DissimilarityMatrix:
    """1 - similarity, with an exactly-zero diagonal."""

    derived_from: str
    institutions: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values.setflags(write=False)


def _finish_cosine(gram: np.ndarray, norms: np.ndarray) -> np.ndarray:
    """Normalize a Gram matrix into a cosine matrix: clip, mirror, unit diagonal."""
    cos = gram / np.outer(norms, norms)
    cos = np.minimum(cos, 1.0)
    # Mirror the upper triangle so symmetry is exact by construction.
    upper = np.triu(cos, 1)
    cos = upper + upper.T
    np.fill_diagonal(cos, 1.0)
    return cos


def first_order(weights: WeightMatrix) -> SimilarityMatrix:
    """Cosine similarity between institutions' journal-weight columns.

    Institutions whose whole weight column is zero (no records, or only
    journals shared by every institution) have no direction to compare; they
    are reported as an error and must be dropped by the caller.
    """
    zero = weights.zero_norm_institutions()
    if zero:
        raise DataError(
            "cannot compute cosine similarity for institutions with all-zero "
            f"journal weights: {', '.join(zero)}"
        )
    dense = weights.to_dense()
    gram = np.einsum("mi,mj->ij", dense, dense)
    norms = np.sqrt(np.einsum("mi,mi->i", dense, dense))
    return SimilarityMatrix(
        order="first",
        institutions=weights.institutions,
        values=_finish_cosine(gram, norms),
    )


def second_order(first: SimilarityMatrix) -> SimilarityMatrix:
    """Cosine similarity between columns of the first-order matrix.

    The sums run over every institution, including the two being compared;
    columns always contain their diagonal 1, so norms are positive.
    """
    if first.order != "first":
        raise ConfigError(f"second_order expects a first-order matrix (got {first.order!r})")
    b = first.values
    gram = np.einsum("ki,kj->ij", b, b)
    norms = np.sqrt(np.einsum("ki,ki->i", b, b))
    return SimilarityMatrix(
        order="second",
        institutions=first.institutions,
        values=_finish_cosine(gram, norms),
    )


def to_dissimilarity(similarity: SimilarityMatrix) -> DissimilarityMatrix:
    """Convert similarities to distances by subtracting from 1."""
    values = similarity.values
    if values.min() < -1e-9 or values.max() > 1.0 + 1e-9:
        raise ConsistencyError(
            f"similarity entries outside [0, 1]: min={values.min()!r}, max={values.max()!r}"
        )
    d = 1.0 - np.clip(values, 0.0, 1.0)
    np.fill_diagonal(d, 0.0)
    return DissimilarityMatrix(
        derived_from=similarity.order,
        institutions=similarity.institutions,
        values=d,
    )


def write_matrix_csv(matrix: SimilarityMatrix | DissimilarityMatrix, stream: IO[str]) -> None:
    """Write the full symmetric matrix with an institution header row/column.

    Values are printed with 12 significant digits.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([""] + list(matrix.institutions))
    for label, row in zip(matrix.institutions, matrix.values):
        writer.writerow([label] + [f"{v:.12g}" for v in row])


def _read_matrix(stream: IO[str], what: str) -> tuple[tuple[str, ...], np.ndarray]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if not header or len(header) < 2:
        raise DataError(f"{what} matrix csv needs a header row of institution ids")
    institutions = tuple(header[1:])
    n = len(institutions)
    values = np.zeros((n, n))
    rows_seen = 0
    for row in reader:
        if not row:
            continue
        if rows_seen >= n or len(row) != n + 1 or row[0] != institutions[rows_seen]:
            raise DataError(f"{what} matrix csv rows do not mirror the header columns")
        try:
            values[rows_seen] = [float(v) for v in row[1:]]
        except ValueError:
            raise DataError(f"{what} matrix csv contains a non-numeric value") from None
        rows_seen += 1
    if rows_seen != n:
        raise DataError(f"{what} matrix csv has {rows_seen} rows for {n} institutions")
    return institutions, values


def read_similarity_csv(stream: IO[str], order: str) -> SimilarityMatrix:
    """Read a matrix written by write_matrix_csv back as a SimilarityMatrix."""
    institutions, values = _read_matrix(stream, "similarity")
    return SimilarityMatrix(order=order, institutions=institutions, values=values)


def read_dissimilarity_csv(stream: IO[str], derived_from: str = "second") -> DissimilarityMatrix:
    """Read a matrix written by write_matrix_csv back as a DissimilarityMatrix."""
    institutions, values = _read_matrix(stream, "dissimilarity")
    return DissimilarityMatrix(derived_from=derived_from, institutions=institutions, values=values)


__all__ = [
    "DissimilarityMatrix",
    "SimilarityMatrix",
    "first_order",
    "read_dissimilarity_csv",
    "read_similarity_csv",
    "second_order",
    "to_dissimilarity",
    "write_matrix_csv",
]
