"""Bundling, binding, unbinding, thinning and permutation.

Two layers live here.  The named operators (``bind_xor``, ``bind_vtb``...)
take and return :class:`Hypervector` objects and follow the usual operand
order of each architecture.  The dispatchers :func:`bind` / :func:`unbind`
always put the *key* first, so that ``unbind(cfg, a, bind(cfg, a, b))``
recovers ``b`` for every kind.  Experiments that process many vectors at
once use the ``*_rows`` kernels, which work on 2-D arrays of dense views
(sparse vectors as 0/1 rows).
"""

from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, UnsupportedOperationError, VectorTypeError
from .spaces import (
    SPACE_OF,
    Hypervector,
    RngLike,
    SeededRng,
    Space,
    VsaConfig,
    VsaKind,
    as_generator,
    check_conforms,
    check_same,
    wrap_angle,
)

# --------------------------------------------------------------------------
# traits


@dataclass(frozen=True)
class BindingTraits:
    """Algebraic properties of one architecture's binding and unbinding.

    ``has_unbind`` is false only for BSDC-CDT, whose binding procedure is
    not implemented here.
    """

    commutative: bool
    associative: bool
    unbind_commutative: bool
    unbind_associative: bool
    self_inverse: bool
    exact_inverse: bool
    quasi_orthogonal: bool
    has_unbind: bool = True


_SELF_INV_EXACT = BindingTraits(True, True, True, True, True, True, True)

TRAITS: dict[VsaKind, BindingTraits] = {
    VsaKind.MAP_C: BindingTraits(True, True, True, True, True, False, True),
    VsaKind.MAP_B: _SELF_INV_EXACT,
    VsaKind.MAP_I: _SELF_INV_EXACT,
    VsaKind.BSC: _SELF_INV_EXACT,
    VsaKind.HRR: BindingTraits(True, True, False, False, False, False, True),
    VsaKind.VTB: BindingTraits(False, False, False, False, False, False, True),
    VsaKind.MBAT: BindingTraits(False, False, False, False, False, True, True),
    VsaKind.FHRR: BindingTraits(True, True, False, False, False, True, True),
    VsaKind.BSDC_S: BindingTraits(False, False, False, False, False, True, True),
    VsaKind.BSDC_SEG: BindingTraits(True, True, False, False, False, True, True),
    VsaKind.BSDC_CDT: BindingTraits(True, True, False, False, False, False, False, has_unbind=False),
}


def traits(kind: VsaKind | str) -> BindingTraits:
    return TRAITS[VsaKind.parse(kind)]


SELF_INVERSE_KINDS = frozenset(k for k, t in TRAITS.items() if t.self_inverse)

# --------------------------------------------------------------------------
# helpers


def _row(v: Hypervector) -> np.ndarray:
    return v.to_dense()[None, :]


def _wrap(kind: VsaKind, row: np.ndarray, dim: int) -> Hypervector:
    if SPACE_OF[kind] is Space.SPARSE_BINARY:
        return Hypervector(kind, np.flatnonzero(row), dim=dim)
    return Hypervector(kind, row)


def _pair_rows(A: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    if A.shape[1] != B.shape[1]:
        raise VectorTypeError(f"operand dimensions differ: {A.shape[1]} vs {B.shape[1]}")
    n = max(A.shape[0], B.shape[0])
    if A.shape[0] not in (1, n) or B.shape[0] not in (1, n):
        raise VectorTypeError("row counts must match or be 1")
    return np.broadcast_to(A, (n, A.shape[1])), np.broadcast_to(B, (n, B.shape[1]))


def _expect(kinds: Iterable[VsaKind], *vs: Hypervector) -> None:
    check_same(*vs)
    kinds = tuple(kinds)
    if vs[0].kind not in kinds:
        names = ", ".join(k.value for k in kinds)
        raise VectorTypeError(f"operator applies to {names}, not {vs[0].kind}")


def sparse_hash(bits: np.ndarray) -> np.ndarray:
    """Sum of on-bit indices modulo D, one value per row of ``bits``.

    The same rule serves the MBAT role hash (indices of positive entries).
    """
    bits = np.atleast_2d(bits)
    D = bits.shape[1]
    idx = np.arange(D, dtype=np.int64)
    return ((bits > 0).astype(np.int64) @ idx) % D


def _cyclic_shift_rows(X: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    D = X.shape[1]
    cols = (np.arange(D)[None, :] - np.asarray(shifts)[:, None]) % D
    return np.take_along_axis(X, cols, axis=1)


def segment_offsets(bits: np.ndarray, n_segments: int) -> np.ndarray:
    """Offset of the first on-bit inside each segment (0 for an empty segment)."""
    bits = np.atleast_2d(bits)
    n, D = bits.shape
    if D % n_segments:
        raise ConfigError(f"segment count {n_segments} does not divide dimension {D}")
    seg = bits.reshape(n, n_segments, D // n_segments) > 0
    first = np.argmax(seg, axis=2)
    return np.where(seg.any(axis=2), first, 0)


def _segment_shift_rows(X: np.ndarray, offsets: np.ndarray, n_segments: int) -> np.ndarray:
    n, D = X.shape
    L = D // n_segments
    seg = X.reshape(n, n_segments, L)
    cols = (np.arange(L)[None, None, :] - offsets[:, :, None]) % L
    return np.take_along_axis(seg, cols, axis=2).reshape(n, D)


def _vtb_side(D: int) -> tuple[int, float]:
    side = math.isqrt(D)
    if side * side != D:
        raise ConfigError(f"VTB needs a perfect-square dimension, got {D}")
    return side, D**0.25


# --------------------------------------------------------------------------
# MBAT base matrix

_CACHE_ENV = "HDCB_CACHE_DIR"


def _build_mbat_base(seed: int, dim: int) -> np.ndarray:
    gen = SeededRng(seed, ("mbat-base",)).generator()
    raw = gen.random((dim, dim))
    u, _, vt = np.linalg.svd(raw)
    return u @ vt


@functools.lru_cache(maxsize=8)
def mbat_base_matrix(seed: int, dim: int) -> np.ndarray:
    """Orthonormal D x D base matrix for MBAT binding, read-only and cached.

    Built from uniform [0, 1) entries orthonormalized through the singular
    value decomposition.  The SVD costs O(D^3); set ``HDCB_CACHE_DIR`` to
    keep the matrices on disk between processes.
    """
    cache_dir = os.environ.get(_CACHE_ENV)
    path = Path(cache_dir) / f"mbat_{seed}_{dim}.npy" if cache_dir else None
    m = None
    if path is not None and path.exists():
        m = np.load(path)
        if m.shape != (dim, dim):
            m = None
    if m is None:
        m = _build_mbat_base(seed, dim)
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(f".{os.getpid()}.tmp.npy")
            np.save(tmp, m)
            os.replace(tmp, path)
    m.setflags(write=False)
    return m


def mbat_role_matrix(base: np.ndarray, shift: int) -> np.ndarray:
    """Base matrix with rows and columns cyclically shifted by ``shift``."""
    return np.roll(base, (shift, shift), axis=(0, 1))


def _mbat_rows(seed: int, K: np.ndarray, X: np.ndarray, transpose: bool) -> np.ndarray:
    D = X.shape[1]
    base = mbat_base_matrix(seed, D)
    op = base if transpose else base.T  # row form: M @ x == x @ M.T
    hashes = sparse_hash(K)
    out = np.empty(X.shape, dtype=np.float64)
    for h in np.unique(hashes):
        sel = np.flatnonzero(hashes == h)
        shifted = np.roll(X[sel], -int(h), axis=1) @ op
        out[sel] = np.roll(shifted, int(h), axis=1)
    return out


# --------------------------------------------------------------------------
# row kernels (key-first)


def bind_rows(cfg: VsaConfig, K: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Bind every row of ``X`` with the matching row of ``K`` (broadcasts 1 row).

    The key comes first: ``unbind_rows(cfg, K, bind_rows(cfg, K, X))``
    recovers ``X`` exactly or approximately depending on the kind.
    """
    K, X = _pair_rows(K, X)
    kind = cfg.kind
    D = X.shape[1]
    if kind in (VsaKind.MAP_C, VsaKind.MAP_B, VsaKind.MAP_I):
        return K * X
    if kind is VsaKind.BSC:
        return np.bitwise_xor(K, X)
    if kind is VsaKind.HRR:
        return np.fft.irfft(np.fft.rfft(K, axis=1) * np.fft.rfft(X, axis=1), n=D, axis=1)
    if kind is VsaKind.FHRR:
        return wrap_angle(K + X)
    if kind is VsaKind.VTB:
        side, scale = _vtb_side(D)
        n = X.shape[0]
        Km = K.reshape(n, side, side)
        Xm = X.reshape(n, side, side)
        return (scale * np.matmul(Xm, Km.transpose(0, 2, 1))).reshape(n, D)
    if kind is VsaKind.MBAT:
        return _mbat_rows(cfg.seed, K, X, transpose=False)
    if kind is VsaKind.BSDC_S:
        return _cyclic_shift_rows(X, sparse_hash(K))
    if kind is VsaKind.BSDC_SEG:
        return _segment_shift_rows(X, segment_offsets(K, cfg.n_segments), cfg.n_segments)
    raise UnsupportedOperationError(_CDT_MESSAGE)


def unbind_rows(cfg: VsaConfig, K: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Remove key ``K`` from bound rows ``C``."""
    K, C = _pair_rows(K, C)
    kind = cfg.kind
    D = C.shape[1]
    if kind in SELF_INVERSE_KINDS:
        return bind_rows(cfg, K, C)
    if kind is VsaKind.HRR:
        return np.fft.irfft(np.conj(np.fft.rfft(K, axis=1)) * np.fft.rfft(C, axis=1), n=D, axis=1)
    if kind is VsaKind.FHRR:
        return wrap_angle(C - K)
    if kind is VsaKind.VTB:
        side, scale = _vtb_side(D)
        n = C.shape[0]
        Km = K.reshape(n, side, side)
        Cm = C.reshape(n, side, side)
        return (scale * np.matmul(Cm, Km)).reshape(n, D)
    if kind is VsaKind.MBAT:
        return _mbat_rows(cfg.seed, K, C, transpose=True)
    if kind is VsaKind.BSDC_S:
        return _cyclic_shift_rows(C, -sparse_hash(K))
    if kind is VsaKind.BSDC_SEG:
        return _segment_shift_rows(C, -segment_offsets(K, cfg.n_segments), cfg.n_segments)
    raise UnsupportedOperationError(_CDT_MESSAGE)


def recover_key_rows(cfg: VsaConfig, X: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Recover the key of ``C = bind(key, X)`` given the other operand ``X``.

    Commutative kinds reuse :func:`unbind_rows`; VTB unbinds through the
    transposed bound matrix.  MBAT and BSDC-S keep only a hash of the key,
    so the key cannot be recovered.
    """
    kind = cfg.kind
    if TRAITS[kind].commutative and TRAITS[kind].has_unbind:
        return unbind_rows(cfg, X, C)
    if kind is VsaKind.VTB:
        X, C = _pair_rows(X, C)
        side, scale = _vtb_side(C.shape[1])
        n = C.shape[0]
        Xm = X.reshape(n, side, side)
        Cm = C.reshape(n, side, side)
        return (scale * np.matmul(Cm.transpose(0, 2, 1), Xm)).reshape(n, C.shape[1])
    if kind is VsaKind.BSDC_CDT:
        raise UnsupportedOperationError(_CDT_MESSAGE)
    raise UnsupportedOperationError(
        f"{kind} binding keeps only a hash of the key; the key cannot be recovered "
        "from the bound vector"
    )


def permute_rows(X: np.ndarray, order: int) -> np.ndarray:
    X = np.atleast_2d(X)
    return np.roll(X, int(order) % X.shape[1], axis=1)


# --------------------------------------------------------------------------
# bundling


def thin_target(max_density: float, dim: int) -> int:
    """Number of on-bits kept when thinning to ``max_density``."""
    return int(math.ceil(round(max_density * dim, 9)))


def _check_max_density(max_density: float) -> None:
    if not (isinstance(max_density, (int, float)) and 0.0 < max_density <= 1.0):
        raise ValueError(f"max_density must lie in (0, 1], got {max_density!r}")


def thin(hv: Hypervector, max_density: float, rng: RngLike | None = None) -> Hypervector:
    """Uniformly drop on-bits until the density is at most ``max_density``.

    Vectors already at or below the limit are returned unchanged, so
    thinning is idempotent.
    """
    _check_max_density(max_density)
    if hv.space is Space.DENSE_BINARY:
        bits = hv.data
        on = np.flatnonzero(bits)
    elif hv.space is Space.SPARSE_BINARY:
        on = hv.data
    else:
        raise VectorTypeError("thinning needs a binary vector")
    target = thin_target(max_density, hv.dim)
    if on.size <= target:
        return hv
    gen = as_generator(rng, SeededRng(0, ("thin",)))
    keep = np.sort(gen.choice(on, size=target, replace=False))
    if hv.space is Space.SPARSE_BINARY:
        return Hypervector(hv.kind, keep, dim=hv.dim)
    out = np.zeros(hv.dim, dtype=np.uint8)
    out[keep] = 1
    return Hypervector(hv.kind, out)


def thin_by_count(counts: np.ndarray, max_density: float, gen: np.random.Generator) -> np.ndarray:
    """Indices of the most frequently set bits, capped at ``max_density``.

    ``counts`` holds how many bundled vectors set each bit.  Bits with equal
    counts at the cut are chosen at random.
    """
    _check_max_density(max_density)
    counts = np.asarray(counts)
    on = np.flatnonzero(counts > 0)
    target = thin_target(max_density, counts.size)
    if on.size <= target:
        return on
    order = np.lexsort((gen.random(on.size), -counts[on]))
    return np.sort(on[order[:target]])


class Accumulator:
    """Running bundle of one architecture.

    Sums are kept exactly (integers for discrete kinds, a complex sum for
    FHRR) and the kind's normalization is applied once in :meth:`finalize`.
    This makes the result independent of the order vectors were added in.
    """

    def __init__(self, cfg: VsaConfig):
        self.cfg = cfg
        space = cfg.space
        D = cfg.dim
        if space is Space.ANGLE:
            self._sum = np.zeros(D, dtype=np.complex128)
        elif space is Space.DENSE_REAL:
            self._sum = np.zeros(D, dtype=np.float64)
        else:
            self._sum = np.zeros(D, dtype=np.int64)
        self.count = 0

    def add_rows(self, rows: np.ndarray, weights: np.ndarray | None = None) -> "Accumulator":
        """Add dense-view rows; ``weights`` holds non-negative integer multiplicities."""
        rows = np.atleast_2d(rows)
        if rows.shape[1] != self.cfg.dim:
            raise VectorTypeError(f"rows have dimension {rows.shape[1]}, expected {self.cfg.dim}")
        if self.cfg.space is Space.ANGLE:
            rows = np.exp(1j * rows)
        if weights is None:
            self._sum += rows.sum(axis=0, dtype=self._sum.dtype)
            self.count += rows.shape[0]
            return self
        w = np.asarray(weights)
        if w.shape != (rows.shape[0],) or np.any(w < 0) or np.any(w != np.round(w)):
            raise ValueError("weights must be one non-negative integer per row")
        w = w.astype(np.int64)
        if self._sum.dtype == np.int64:
            self._sum += w @ rows.astype(np.int64)
        else:
            self._sum += w.astype(np.float64) @ rows
        self.count += int(w.sum())
        return self

    def add(self, *vectors: Hypervector) -> "Accumulator":
        check_conforms(self.cfg, *vectors)
        for v in vectors:
            self.add_rows(_row(v))
        return self

    @property
    def sums(self) -> np.ndarray:
        """Raw per-dimension sums (bit counts for binary kinds)."""
        return self._sum.copy()

    def finalize_row(self, rng: RngLike | None = None, thinning: str = "uniform") -> np.ndarray:
        if self.count == 0:
            raise ValueError("cannot bundle an empty set of vectors")
        cfg = self.cfg
        kind = cfg.kind
        s = self._sum
        fallback = SeededRng(cfg.seed, ("bundle",))
        if kind is VsaKind.MAP_C:
            return np.clip(s, -1.0, 1.0)
        if kind is VsaKind.MAP_I:
            return s.copy()
        if cfg.space is Space.DENSE_REAL:
            norm = np.linalg.norm(s)
            return s / norm if norm > 0.0 else s.copy()
        if kind is VsaKind.MAP_B:
            out = np.sign(s).astype(np.int8)
            ties = out == 0
            if ties.any():
                gen = as_generator(rng, fallback)
                out[ties] = gen.integers(0, 2, int(ties.sum())) * 2 - 1
            return out
        if kind is VsaKind.BSC:
            twice = 2 * s
            out = (twice > self.count).astype(np.uint8)
            ties = twice == self.count
            if ties.any():
                gen = as_generator(rng, fallback)
                out[ties] = gen.integers(0, 2, int(ties.sum()))
            return out
        if kind is VsaKind.FHRR:
            out = np.angle(s)
            flat = np.abs(s) <= 1e-9 * self.count
            if flat.any():
                gen = as_generator(rng, fallback)
                out[flat] = gen.uniform(-math.pi, math.pi, int(flat.sum()))
            return wrap_angle(out)
        # sparse: disjunction with optional thinning
        bits = (s > 0).astype(np.uint8)
        if cfg.max_density is None:
            return bits
        if thinning == "uniform":
            hv = Hypervector(kind, np.flatnonzero(bits), dim=cfg.dim)
            return thin(hv, cfg.max_density, as_generator(rng, fallback)).to_dense()
        if thinning == "frequency":
            keep = thin_by_count(s, cfg.max_density, as_generator(rng, fallback))
            out = np.zeros(cfg.dim, dtype=np.uint8)
            out[keep] = 1
            return out
        raise ValueError(f"unknown thinning rule {thinning!r}")

    def finalize(self, rng: RngLike | None = None, thinning: str = "uniform") -> Hypervector:
        return _wrap(self.cfg.kind, self.finalize_row(rng, thinning), self.cfg.dim)


def bundle(cfg: VsaConfig, vectors: Sequence[Hypervector], rng: RngLike | None = None) -> Hypervector:
    """Superpose ``vectors`` with the architecture's bundling rule.

    Ties of the thresholded kinds and undefined FHRR angles are resolved
    with ``rng`` (default: a stream derived from ``cfg.seed``).
    """
    if len(vectors) == 0:
        raise ValueError("cannot bundle an empty set of vectors")
    check_conforms(cfg, *vectors)
    acc = Accumulator(cfg)
    acc.add_rows(np.vstack([v.to_dense() for v in vectors]))
    return acc.finalize(rng)


def bundle_rows(cfg: VsaConfig, rows: np.ndarray, rng: RngLike | None = None) -> np.ndarray:
    """Row-level :func:`bundle`; returns the dense view of the result."""
    return Accumulator(cfg).add_rows(rows).finalize_row(rng)


# --------------------------------------------------------------------------
# named operators

_CDT_MESSAGE = (
    "BSDC-CDT binding is not implemented; use BSDC-SEG (segment shifting) or "
    "BSDC-S (shifting) for sparse binding"
)


def _bin(cfg: VsaConfig, K: Hypervector, X: Hypervector) -> Hypervector:
    return _wrap(cfg.kind, bind_rows(cfg, _row(K), _row(X))[0], cfg.dim)


def _unbin(cfg: VsaConfig, K: Hypervector, C: Hypervector) -> Hypervector:
    return _wrap(cfg.kind, unbind_rows(cfg, _row(K), _row(C))[0], cfg.dim)


def _cfg_of(v: Hypervector, seed: int = 0) -> VsaConfig:
    # segment count for BSDC-SEG operands is read off the default layout
    return VsaConfig(v.kind, v.dim, seed=seed)


def bind_elementwise(a: Hypervector, b: Hypervector) -> Hypervector:
    """MAP binding: element-wise product."""
    _expect((VsaKind.MAP_C, VsaKind.MAP_B, VsaKind.MAP_I), a, b)
    return _bin(_cfg_of(a), a, b)


def bind_xor(a: Hypervector, b: Hypervector) -> Hypervector:
    """BSC binding: bit-wise exclusive or."""
    _expect((VsaKind.BSC,), a, b)
    return _bin(_cfg_of(a), a, b)


def bind_circular_convolution(a: Hypervector, b: Hypervector) -> Hypervector:
    """HRR binding ``c_j = sum_k b_k a_{(j-k) mod D}``, computed with the FFT."""
    _expect((VsaKind.HRR,), a, b)
    return _bin(_cfg_of(a), a, b)


def unbind_circular_correlation(b: Hypervector, c: Hypervector) -> Hypervector:
    """HRR unbinding ``a_j = sum_k b_k c_{(k+j) mod D}``, approximately inverting convolution."""
    _expect((VsaKind.HRR,), b, c)
    return _unbin(_cfg_of(b), b, c)


def bind_vtb(a: Hypervector, b: Hypervector) -> Hypervector:
    """VTB binding ``c = V_b a`` with block-diagonal ``V_b`` built from reshaped ``b``."""
    _expect((VsaKind.VTB,), a, b)
    return _bin(_cfg_of(a), b, a)


def unbind_vtb(b: Hypervector, c: Hypervector) -> Hypervector:
    """VTB unbinding ``a ~ V_b^T c``."""
    _expect((VsaKind.VTB,), b, c)
    return _unbin(_cfg_of(b), b, c)


def bind_mbat(role: Hypervector, filler: Hypervector, seed: int = 0) -> Hypervector:
    """MBAT binding: ``M_role @ filler`` with the base matrix shifted by hash(role)."""
    _expect((VsaKind.MBAT,), role, filler)
    return _bin(_cfg_of(role, seed), role, filler)


def unbind_mbat(role: Hypervector, c: Hypervector, seed: int = 0) -> Hypervector:
    """MBAT unbinding with the transposed (inverse) role matrix."""
    _expect((VsaKind.MBAT,), role, c)
    return _unbin(_cfg_of(role, seed), role, c)


def bind_shift(a: Hypervector, b: Hypervector) -> Hypervector:
    """BSDC-S binding: cyclic shift of ``b`` by hash(``a``)."""
    _expect((VsaKind.BSDC_S,), a, b)
    h = int(sparse_hash(_row(a))[0])
    return Hypervector(b.kind, np.sort((b.data + h) % b.dim), dim=b.dim)


def unbind_shift(a: Hypervector, c: Hypervector) -> Hypervector:
    _expect((VsaKind.BSDC_S,), a, c)
    h = int(sparse_hash(_row(a))[0])
    return Hypervector(c.kind, np.sort((c.data - h) % c.dim), dim=c.dim)


def bind_segment_shift(a: Hypervector, b: Hypervector, n_segments: int | None = None) -> Hypervector:
    """BSDC-SEG binding: shift each segment of ``b`` by the first on-bit offset of ``a`` there.

    ``n_segments`` defaults to the layout a default :class:`VsaConfig` picks for D.
    """
    _expect((VsaKind.BSDC_SEG,), a, b)
    cfg = VsaConfig(VsaKind.BSDC_SEG, a.dim, segments=n_segments)
    return _bin(cfg, a, b)


def unbind_segment_shift(a: Hypervector, c: Hypervector, n_segments: int | None = None) -> Hypervector:
    _expect((VsaKind.BSDC_SEG,), a, c)
    cfg = VsaConfig(VsaKind.BSDC_SEG, a.dim, segments=n_segments)
    return _unbin(cfg, a, c)


def bind_fhrr(a: Hypervector, b: Hypervector) -> Hypervector:
    """FHRR binding: angle addition wrapped into (-pi, pi]."""
    _expect((VsaKind.FHRR,), a, b)
    return Hypervector(a.kind, wrap_angle(a.data + b.data))


def unbind_fhrr(a: Hypervector, c: Hypervector) -> Hypervector:
    """FHRR unbinding: angle subtraction wrapped into (-pi, pi]."""
    _expect((VsaKind.FHRR,), a, c)
    return Hypervector(a.kind, wrap_angle(c.data - a.data))


# --------------------------------------------------------------------------
# dispatchers


def bind(cfg: VsaConfig, a: Hypervector, b: Hypervector) -> Hypervector:
    """Bind ``b`` under key ``a``.

    For VTB the key is the operand that forms the binding matrix, so this
    equals ``bind_vtb(b, a)``.  BSDC-CDT raises
    :class:`UnsupportedOperationError`.
    """
    check_conforms(cfg, a, b)
    if cfg.kind is VsaKind.BSDC_CDT:
        raise UnsupportedOperationError(_CDT_MESSAGE)
    return _bin(cfg, a, b)


def unbind(cfg: VsaConfig, a: Hypervector, c: Hypervector) -> Hypervector:
    """Remove key ``a`` from ``c``: ``unbind(cfg, a, bind(cfg, a, b)) ~ b``."""
    check_conforms(cfg, a, c)
    if cfg.kind is VsaKind.BSDC_CDT:
        raise UnsupportedOperationError(_CDT_MESSAGE)
    return _unbin(cfg, a, c)


def recover_key(cfg: VsaConfig, b: Hypervector, c: Hypervector) -> Hypervector:
    """Recover ``a`` from ``c = bind(cfg, a, b)`` given ``b``."""
    check_conforms(cfg, b, c)
    return _wrap(cfg.kind, recover_key_rows(cfg, _row(b), _row(c))[0], cfg.dim)


def permute(hv: Hypervector, order: int) -> Hypervector:
    """Cyclic shift of every position by ``order`` (taken modulo D)."""
    shift = int(order) % hv.dim
    if hv.space is Space.SPARSE_BINARY:
        return Hypervector(hv.kind, np.sort((hv.data + shift) % hv.dim), dim=hv.dim)
    return Hypervector(hv.kind, np.roll(hv.data, shift))
