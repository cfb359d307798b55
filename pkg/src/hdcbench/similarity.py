"""Similarity metrics of the eleven architectures.

Scalar comparisons go through :func:`similarity`.  Bulk comparisons (item
memories, similarity matrices) use :func:`prepare` once per row set and
:func:`score` for the matrix of scores; both paths agree to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import UndefinedSimilarityError, VectorTypeError
from .spaces import SPACE_OF, Hypervector, Space, VsaConfig, VsaKind, check_conforms

COSINE_SPACES = (Space.DENSE_REAL, Space.BIPOLAR, Space.INTEGER)


def similarity_bounds(kind: VsaKind) -> tuple[float, float]:
    """Smallest and largest attainable similarity value for ``kind``."""
    space = SPACE_OF[kind]
    if space in COSINE_SPACES or space is Space.ANGLE:
        return -1.0, 1.0
    return 0.0, 1.0


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = a.astype(np.float64, copy=False)
    b = b.astype(np.float64, copy=False)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise UndefinedSimilarityError("cosine similarity of a zero-norm vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def overlap(a: Hypervector, b: Hypervector) -> int:
    """Number of shared on-bits of two sparse vectors."""
    return int(np.intersect1d(a.data, b.data, assume_unique=True).size)


def similarity(cfg: VsaConfig, a: Hypervector, b: Hypervector) -> float:
    check_conforms(cfg, a, b)
    space = cfg.space
    if space in COSINE_SPACES:
        return _cosine(a.data, b.data)
    if space is Space.DENSE_BINARY:
        return 1.0 - np.count_nonzero(a.data != b.data) / cfg.dim
    if space is Space.ANGLE:
        return float(np.mean(np.cos(a.data - b.data)))
    # sparse: overlap normalized by the smaller popcount
    return overlap(a, b) / max(1, min(a.data.size, b.data.size))


@dataclass(frozen=True)
class Prepared:
    """Row set with the per-row quantities its metric needs precomputed."""

    kind: VsaKind
    main: np.ndarray
    aux: np.ndarray | None = None
    extra: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.main.shape[0]


def prepare(kind: VsaKind, rows, allow_zero: bool = False) -> Prepared:
    """Precompute a row set for :func:`score`.

    ``rows`` is a 2-D array of dense payload views or a sequence of
    hypervectors of kind ``kind``.  With ``allow_zero`` a zero-norm row of a
    cosine kind scores 0 against everything instead of raising.
    """
    kind = VsaKind.parse(kind)
    if not isinstance(rows, np.ndarray):
        rows = np.vstack([v.to_dense() for v in rows])
    rows = np.atleast_2d(rows)
    space = SPACE_OF[kind]
    if space in COSINE_SPACES:
        m = rows.astype(np.float64)
        norms = np.linalg.norm(m, axis=1)
        if np.any(norms == 0.0):
            if not allow_zero:
                raise UndefinedSimilarityError("cosine similarity of a zero-norm vector")
            norms = np.where(norms == 0.0, 1.0, norms)
        return Prepared(kind, m / norms[:, None])
    if space is Space.ANGLE:
        return Prepared(kind, np.cos(rows), extra=np.sin(rows))
    m = rows.astype(np.float64)
    return Prepared(kind, m, aux=m.sum(axis=1))


def score(query: Prepared, base: Prepared) -> np.ndarray:
    """Similarity matrix of shape ``(query.n, base.n)``."""
    if query.kind is not base.kind:
        raise VectorTypeError(f"cannot compare {query.kind} with {base.kind}")
    if query.main.shape[1] != base.main.shape[1]:
        raise VectorTypeError("row sets have different dimensions")
    space = SPACE_OF[query.kind]
    D = query.main.shape[1]
    if space in COSINE_SPACES:
        return np.clip(query.main @ base.main.T, -1.0, 1.0)
    if space is Space.ANGLE:
        return (query.main @ base.main.T + query.extra @ base.extra.T) / D
    dot = query.main @ base.main.T
    if space is Space.DENSE_BINARY:
        ham = query.aux[:, None] + base.aux[None, :] - 2.0 * dot
        return 1.0 - ham / D
    denom = np.maximum(1.0, np.minimum(query.aux[:, None], base.aux[None, :]))
    return dot / denom


def similarity_matrix(cfg: VsaConfig, rows_a, rows_b) -> np.ndarray:
    """All-pairs similarities ``S[i, j] = sim(a_i, b_j)``."""
    for rows in (rows_a, rows_b):
        if not isinstance(rows, np.ndarray):
            check_conforms(cfg, *rows)
    return score(prepare(cfg.kind, rows_a), prepare(cfg.kind, rows_b))


def rank_by_similarity(
    cfg: VsaConfig, query: Hypervector, candidates: Sequence[Hypervector]
) -> list[int]:
    """Candidate indices, most similar first; ties keep ascending index order."""
    if len(candidates) == 0:
        raise ValueError("no candidates to rank")
    check_conforms(cfg, query, *candidates)
    s = similarity_matrix(cfg, [query], candidates)[0]
    return [int(i) for i in np.argsort(-s, kind="stable")]
