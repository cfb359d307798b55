"""Sequence-based visual place recognition on image descriptors.

Pipeline: standardize each descriptor set, project both with one random
matrix, encode rows into a VSA space, compare database and query sets
pairwise, and optionally exploit image sequences either by filtering the
similarity matrix along diagonals (SeqSLAM) or by bundling each descriptor
with its position-bound neighbours before comparing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .algebra import Accumulator, bind_rows
from .errors import DataError, UnsupportedOperationError, VectorTypeError
from .serialization import VSAD_MAGIC, read_matrix_csv, read_vsad, write_matrix_csv, write_vsad
from .similarity import prepare, score
from .spaces import Hypervector, SeededRng, VsaConfig, VsaKind, from_rows, random_vectors, stack

MODES = ("pairwise", "seqslam", "vsa")


@dataclass(frozen=True)
class DescriptorSet:
    """Row-major descriptor matrix (one image per row)."""

    data: np.ndarray
    name: str = ""

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DataError("descriptor set must be a non-empty 2-D matrix")
        bad = ~np.isfinite(arr)
        if bad.any():
            row = int(np.argwhere(bad)[0, 0])
            raise DataError(f"non-finite descriptor value in row {row}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]


def load_descriptors(path: str | Path) -> DescriptorSet:
    """Read a VSAD file or a headerless numeric CSV."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"descriptor file {path} does not exist")
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == VSAD_MAGIC:
        data = read_vsad(path)
    elif path.suffix.lower() == ".vsad":
        raise DataError(f"{path}: malformed VSAD header")
    else:
        data = read_matrix_csv(path)
    if data.size == 0:
        raise DataError(f"{path}: no descriptors")
    return DescriptorSet(data, path.stem)


def save_descriptors(ds: DescriptorSet, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        write_matrix_csv(path, ds.data)
    else:
        write_vsad(path, ds.data)


def load_ground_truth(path: str | Path) -> np.ndarray:
    gt = read_matrix_csv(path)
    if not np.isin(gt, (0, 1)).all():
        raise DataError(f"{path}: ground truth must contain only 0 and 1")
    if not gt.any():
        raise DataError(f"{path}: ground truth has no positive match")
    return gt.astype(bool)


def standardize(ds: DescriptorSet) -> DescriptorSet:
    """Zero-mean, unit-variance columns; constant columns become 0."""
    if ds.rows < 2:
        raise ValueError("standardization needs at least two descriptors")
    x = ds.data
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    z = np.zeros_like(x)
    ok = sd > 0
    z[:, ok] = (x[:, ok] - mu[ok]) / sd[ok]
    return DescriptorSet(z, ds.name)


def projection_matrix(m: int, n: int, rng: SeededRng) -> np.ndarray:
    """``m x n`` standard-normal matrix with unit-norm rows."""
    if n < 1:
        raise ValueError("projection size must be positive")
    p = rng.generator().standard_normal((m, n))
    return p / np.linalg.norm(p, axis=1, keepdims=True)


def random_project(
    ds: DescriptorSet, n: int, rng: SeededRng, matrix: np.ndarray | None = None
) -> DescriptorSet:
    """Multiply descriptors by a random projection (or an explicit ``matrix``)."""
    p = projection_matrix(ds.cols, n, rng) if matrix is None else np.asarray(matrix, dtype=np.float64)
    if p.shape != (ds.cols, n):
        raise ValueError(f"projection matrix must be {ds.cols}x{n}, got {p.shape}")
    return DescriptorSet(ds.data @ p, ds.name)


def slsbh_bits(z: np.ndarray, n_bits: int) -> np.ndarray:
    """Sparse code of ``[z, -z]``: the ``ceil(sqrt(2D))`` largest entries set to 1."""
    z = np.atleast_2d(z)
    full = np.hstack([z, -z])
    if full.shape[1] != n_bits:
        raise ValueError(f"sLSBH of {z.shape[1]} values has {full.shape[1]} bits, not {n_bits}")
    top = int(math.ceil(math.sqrt(n_bits) - 1e-12))
    # stable order keeps the result deterministic on ties
    order = np.argsort(-full, axis=1, kind="stable")[:, :top]
    out = np.zeros(full.shape, dtype=np.uint8)
    np.put_along_axis(out, order, 1, axis=1)
    return out


def encode_rows(ds: DescriptorSet, cfg: VsaConfig) -> np.ndarray:
    """Dense views of the encoded descriptors (0/1 rows for sparse kinds)."""
    x = ds.data
    kind = cfg.kind
    if cfg.is_sparse:
        if 2 * ds.cols != cfg.dim:
            raise ValueError(f"sparse encoding maps {ds.cols} columns to {2 * ds.cols} bits, config has {cfg.dim}")
        return slsbh_bits(x, cfg.dim)
    if ds.cols != cfg.dim:
        raise ValueError(f"descriptor has {ds.cols} columns, config dimension is {cfg.dim}")
    if kind in (VsaKind.MAP_B, VsaKind.MAP_I):
        return np.where(x > 0, 1, -1).astype(np.int8 if kind is VsaKind.MAP_B else np.int64)
    if kind is VsaKind.BSC:
        return (x > 0).astype(np.uint8)
    if kind is VsaKind.MAP_C:
        return np.clip(x, -1.0, 1.0)
    if kind is VsaKind.FHRR:
        theta = np.angle(np.fft.fft(x, axis=1))
        return np.where(theta <= -math.pi, math.pi, theta)
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ValueError("cannot scale a zero descriptor to unit norm")
    return x / norms


def encode_for_space(ds: DescriptorSet, cfg: VsaConfig) -> list[Hypervector]:
    """Convert each descriptor into a hypervector of ``cfg``'s kind."""
    return from_rows(cfg.kind, encode_rows(ds, cfg))


def _rows_of(vectors) -> np.ndarray:
    if isinstance(vectors, np.ndarray):
        return np.atleast_2d(vectors)
    return stack(list(vectors))


def pairwise_similarity(cfg: VsaConfig, db, query) -> np.ndarray:
    """``S[i, j] = sim(db_i, query_j)`` for hypervectors or dense-view rows."""
    for vs in (db, query):
        if not isinstance(vs, np.ndarray):
            for v in vs:
                if v.kind is not cfg.kind:
                    raise VectorTypeError(f"vector of kind {v.kind} does not match {cfg.kind}")
    return score(prepare(cfg.kind, _rows_of(db)), prepare(cfg.kind, _rows_of(query)))


def seqslam_filter(S: np.ndarray, d: int) -> np.ndarray:
    """Mean of ``S`` along each diagonal window ``k = -d..d``; borders use in-range terms only."""
    if d < 0:
        raise ValueError("sequence half-length must be non-negative")
    S = np.asarray(S, dtype=np.float64)
    m, n = S.shape
    total = np.zeros_like(S)
    count = np.zeros_like(S)
    for k in range(-d, d + 1):
        i0, i1 = max(0, -k), min(m, m - k)
        j0, j1 = max(0, -k), min(n, n - k)
        if i0 >= i1 or j0 >= j1:
            continue
        total[i0:i1, j0:j1] += S[i0 + k : i1 + k, j0 + k : j1 + k]
        count[i0:i1, j0:j1] += 1
    return total / np.maximum(count, 1)


def position_vectors(cfg: VsaConfig, d: int) -> list[Hypervector]:
    """Fixed random vectors ``P_{-d} .. P_d`` shared by database and query sets."""
    return random_vectors(cfg, SeededRng(cfg.seed, ("positions", d)), 2 * d + 1)


def vsa_sequence_rows(cfg: VsaConfig, rows: np.ndarray, d: int) -> np.ndarray:
    """Row-level :func:`vsa_sequence_encode`."""
    if d < 0:
        raise ValueError("sequence half-length must be non-negative")
    if cfg.kind is VsaKind.BSDC_CDT:
        raise UnsupportedOperationError("BSDC-CDT binding is not implemented")
    rows = np.atleast_2d(rows)
    n = rows.shape[0]
    pos = position_vectors(cfg, d)
    bound = [bind_rows(cfg, p.to_dense()[None, :], rows) for p in pos]
    out = []
    for i in range(n):
        acc = Accumulator(cfg)
        for k in range(-d, d + 1):
            if 0 <= i + k < n:
                acc.add_rows(bound[k + d][i + k : i + k + 1])
        out.append(acc.finalize_row(SeededRng(cfg.seed, ("sequence-ties", i))))
    return np.vstack(out)


def vsa_sequence_encode(cfg: VsaConfig, vectors: Sequence[Hypervector], d: int) -> list[Hypervector]:
    """``Y_i`` = bundle over ``k = -d..d`` of ``bind(P_k, X_{i+k})``, in-range terms only.

    The position vector is the binding key, so hash-based bindings keep the
    descriptor's similarity structure.
    """
    return from_rows(cfg.kind, vsa_sequence_rows(cfg, _rows_of(vectors), d))


def pr_auc(S: np.ndarray, gt: np.ndarray) -> float:
    """Area under the precision-recall curve over all distinct score thresholds.

    The curve starts at recall 0 with the precision of the highest threshold
    and is integrated with the trapezoidal rule.
    """
    S = np.asarray(S, dtype=np.float64)
    gt = np.asarray(gt).astype(bool)
    if S.shape != gt.shape:
        raise ValueError(f"score shape {S.shape} does not match ground truth {gt.shape}")
    n_pos = int(gt.sum())
    if n_pos == 0:
        raise ValueError("ground truth has no positive match")
    s = S.ravel()
    g = gt.ravel()
    order = np.argsort(-s, kind="stable")
    s, g = s[order], g[order]
    tp = np.cumsum(g)
    fp = np.cumsum(~g)
    last = np.r_[np.flatnonzero(np.diff(s) != 0), s.size - 1]  # end of each distinct score
    tp, fp = tp[last], fp[last]
    precision = tp / (tp + fp)
    recall = tp / n_pos
    precision = np.r_[precision[0], precision]
    recall = np.r_[0.0, recall]
    return float(np.sum(np.diff(recall) * (precision[1:] + precision[:-1]) / 2.0))


# --------------------------------------------------------------------------
# pipeline


@dataclass
class PlaceRecResult:
    kind: VsaKind
    mode: str
    auc: float
    similarity: np.ndarray


def prepare_sets(
    db: DescriptorSet, query: DescriptorSet, dim: int, seed: int, project: bool = True
) -> tuple[DescriptorSet, DescriptorSet]:
    """Standardize both sets and apply one shared random projection."""
    if db.cols != query.cols:
        raise DataError(f"database has {db.cols} columns, query has {query.cols}")
    db_s, q_s = standardize(db), standardize(query)
    if not project:
        return db_s, q_s
    rng = SeededRng(seed, ("projection",))
    p = projection_matrix(db.cols, dim, rng)
    return random_project(db_s, dim, rng, p), random_project(q_s, dim, rng, p)


def run_place_recognition(
    cfg: VsaConfig,
    db: DescriptorSet,
    query: DescriptorSet,
    gt: np.ndarray,
    modes: Sequence[str] = MODES,
    d: int = 5,
) -> list[PlaceRecResult]:
    """Encode, compare and score every requested mode for one kind.

    ``cfg.dim`` is the working dimension; sparse kinds use twice as many bits,
    so descriptors are projected to ``cfg.dim // 2`` for them.
    """
    gt = np.asarray(gt).astype(bool)
    if gt.shape != (db.rows, query.rows):
        raise DataError(f"ground truth is {gt.shape}, expected {(db.rows, query.rows)}")
    for m in modes:
        if m not in MODES:
            raise ValueError(f"unknown mode {m!r}; choose from {', '.join(MODES)}")
    proj_dim = cfg.dim // 2 if cfg.is_sparse else cfg.dim
    if cfg.is_sparse and cfg.dim % 2:
        raise ValueError("sparse kinds need an even number of bits")
    db_p, q_p = prepare_sets(db, query, proj_dim, cfg.seed)
    X_db = encode_rows(db_p, cfg)
    X_q = encode_rows(q_p, cfg)
    results = []
    S = None
    if "pairwise" in modes or "seqslam" in modes:
        S = pairwise_similarity(cfg, X_db, X_q)
    for m in modes:
        if m == "pairwise":
            R = S
        elif m == "seqslam":
            R = seqslam_filter(S, d)
        else:
            R = pairwise_similarity(cfg, vsa_sequence_rows(cfg, X_db, d), vsa_sequence_rows(cfg, X_q, d))
        results.append(PlaceRecResult(cfg.kind, m, pr_auc(R, gt), R))
    return results


def synthetic_fixture(
    n: int = 200, cols: int = 1024, noise: float = 10.0, seed: int = 0
) -> tuple[DescriptorSet, DescriptorSet, np.ndarray]:
    """Database of random place descriptors, noisy query copies, diagonal ground truth."""
    gen = SeededRng(seed, ("placerec-fixture",)).generator()
    places = gen.standard_normal((n, cols))
    query = places + noise * gen.standard_normal((n, cols))
    return DescriptorSet(places, "db"), DescriptorSet(query, "query"), np.eye(n, dtype=bool)
