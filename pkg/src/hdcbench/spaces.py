"""Vector spaces, architecture configurations and atomic vector generation.

Eleven architectures share five payload layouts.  A :class:`Hypervector`
always carries the :class:`VsaKind` it belongs to, so every operation can
dispatch without extra context.
"""

from __future__ import annotations

import enum
import functools
import math
import zlib
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ConfigError, UnsupportedOperationError, VectorTypeError

TWO_PI = 2.0 * math.pi


class VsaKind(str, enum.Enum):
    MAP_C = "MAP-C"
    MAP_B = "MAP-B"
    MAP_I = "MAP-I"
    HRR = "HRR"
    FHRR = "FHRR"
    VTB = "VTB"
    MBAT = "MBAT"
    BSC = "BSC"
    BSDC_CDT = "BSDC-CDT"
    BSDC_S = "BSDC-S"
    BSDC_SEG = "BSDC-SEG"

    @classmethod
    def parse(cls, name: Union[str, "VsaKind"]) -> "VsaKind":
        if isinstance(name, VsaKind):
            return name
        key = str(name).strip().upper().replace("_", "-")
        for kind in cls:
            if kind.value == key:
                return kind
        valid = ", ".join(k.value for k in cls)
        raise ConfigError(f"unknown VSA kind {name!r}; valid kinds: {valid}")

    @property
    def tag(self) -> int:
        """Stable small integer used by the binary container formats."""
        return list(VsaKind).index(self)

    @classmethod
    def from_tag(cls, tag: int) -> "VsaKind":
        kinds = list(cls)
        if not 0 <= tag < len(kinds):
            raise ConfigError(f"unknown kind tag {tag}")
        return kinds[tag]

    def __str__(self) -> str:
        return self.value


class Space(enum.Enum):
    """Concrete payload layout of a hypervector."""

    DENSE_REAL = "dense-real"
    BIPOLAR = "bipolar"
    INTEGER = "integer"
    DENSE_BINARY = "dense-binary"
    SPARSE_BINARY = "sparse-binary"
    ANGLE = "angle"


SPACE_OF = {
    VsaKind.MAP_C: Space.DENSE_REAL,
    VsaKind.MAP_B: Space.BIPOLAR,
    VsaKind.MAP_I: Space.INTEGER,
    VsaKind.HRR: Space.DENSE_REAL,
    VsaKind.VTB: Space.DENSE_REAL,
    VsaKind.MBAT: Space.DENSE_REAL,
    VsaKind.BSC: Space.DENSE_BINARY,
    VsaKind.BSDC_CDT: Space.SPARSE_BINARY,
    VsaKind.BSDC_S: Space.SPARSE_BINARY,
    VsaKind.BSDC_SEG: Space.SPARSE_BINARY,
    VsaKind.FHRR: Space.ANGLE,
}

SPARSE_KINDS = frozenset({VsaKind.BSDC_CDT, VsaKind.BSDC_S, VsaKind.BSDC_SEG})

_DTYPES = {
    Space.DENSE_REAL: np.float64,
    Space.BIPOLAR: np.int8,
    Space.INTEGER: np.int64,
    Space.DENSE_BINARY: np.uint8,
    Space.SPARSE_BINARY: np.int64,
    Space.ANGLE: np.float64,
}


def wrap_angle(x):
    """Map angles into the half-open interval (-pi, pi]."""
    return math.pi - np.mod(math.pi - np.asarray(x, dtype=np.float64), TWO_PI)


@functools.lru_cache(maxsize=256)
def _nearest_divisor(n: int, target: float) -> int:
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    return min(divisors, key=lambda d: (abs(d - target), d))


@dataclass(frozen=True)
class VsaConfig:
    """Architecture kind plus the numeric parameters every operation needs.

    ``density`` and ``segments`` keep what the caller passed (``None`` means
    "use the default"); the values actually used are :attr:`p` and
    :attr:`n_segments`.  Sparse kinds default to ``p = 1/sqrt(dim)``.  For
    BSDC-SEG the segment count defaults to the divisor of ``dim`` closest to
    ``dim * p``, and ``p`` then becomes exactly ``n_segments / dim``.
    """

    kind: VsaKind
    dim: int
    density: float | None = None
    segments: int | None = None
    seed: int = 0
    max_density: float | None = None

    def __post_init__(self):
        kind = VsaKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 1:
            raise ConfigError(f"dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))
        if self.max_density is not None and not 0.0 < self.max_density <= 1.0:
            raise ConfigError("max_density must lie in (0, 1]")
        if self.density is not None and not 0.0 < self.density <= 1.0:
            raise ConfigError(f"density must lie in (0, 1], got {self.density}")
        if kind is VsaKind.VTB and math.isqrt(self.dim) ** 2 != self.dim:
            raise ConfigError(f"VTB needs a perfect-square dimension, got {self.dim}")
        if kind is VsaKind.BSDC_SEG:
            s = self.n_segments
            if s < 1 or self.dim % s:
                raise ConfigError(f"segment count {s} does not divide dimension {self.dim}")

    @property
    def space(self) -> Space:
        return SPACE_OF[self.kind]

    @property
    def is_sparse(self) -> bool:
        return self.kind in SPARSE_KINDS

    @property
    def n_segments(self) -> int:
        if self.kind is not VsaKind.BSDC_SEG:
            raise ConfigError(f"{self.kind} has no segment layout")
        if self.segments is not None:
            return int(self.segments)
        p = self.density if self.density is not None else 1.0 / math.sqrt(self.dim)
        return _nearest_divisor(self.dim, self.dim * p)

    @property
    def segment_length(self) -> int:
        return self.dim // self.n_segments

    @property
    def p(self) -> float | None:
        """Effective on-bit probability of atomic vectors, ``None`` for dense kinds."""
        if self.kind is VsaKind.BSDC_SEG:
            return self.n_segments / self.dim
        if self.kind in SPARSE_KINDS:
            return self.density if self.density is not None else 1.0 / math.sqrt(self.dim)
        return None

    def with_dim(self, dim: int) -> "VsaConfig":
        return replace(self, dim=dim)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "dim": self.dim,
            "density": self.density,
            "segments": self.segments,
            "seed": self.seed,
            "max_density": self.max_density,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VsaConfig":
        return cls(
            kind=VsaKind.parse(d["kind"]),
            dim=int(d["dim"]),
            density=d.get("density"),
            segments=d.get("segments"),
            seed=int(d.get("seed", 0)),
            max_density=d.get("max_density"),
        )


def _stream_key(part) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("stream ids must be non-negative")
        return int(part)
    return zlib.crc32(str(part).encode("utf-8"))


@dataclass(frozen=True)
class SeededRng:
    """Deterministic random stream keyed by ``(seed, stream id...)``.

    Streams are derived with :class:`numpy.random.SeedSequence` spawn keys
    and PCG64, which produce identical draws on every platform.  String
    stream ids are folded to integers with CRC-32.
    """

    seed: int
    stream: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "stream", tuple(_stream_key(p) for p in self.stream))

    def child(self, *parts) -> "SeededRng":
        return SeededRng(self.seed, self.stream + tuple(_stream_key(p) for p in parts))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.PCG64(seq))


RngLike = Union[SeededRng, np.random.Generator]


def as_generator(rng: RngLike | None, fallback: SeededRng | None = None) -> np.random.Generator:
    if rng is None:
        rng = fallback if fallback is not None else SeededRng(0)
    if isinstance(rng, SeededRng):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected SeededRng or numpy Generator, got {type(rng).__name__}")


class Hypervector:
    """Immutable hypervector of one architecture.

    ``data`` holds the payload: a length-``dim`` array for the dense layouts
    or the sorted on-bit indices for sparse binary vectors.
    """

    __slots__ = ("kind", "dim", "data")

    def __init__(self, kind: VsaKind | str, data, dim: int | None = None):
        kind = VsaKind.parse(kind)
        space = SPACE_OF[kind]
        arr = np.array(data, copy=True)
        if arr.ndim != 1:
            raise VectorTypeError("hypervector payload must be one-dimensional")
        if space is Space.SPARSE_BINARY:
            if dim is None:
                raise VectorTypeError("sparse vectors need an explicit dimension")
            arr = arr.astype(np.int64, copy=False)
            if arr.size and (arr[0] < 0 or arr[-1] >= dim or np.any(np.diff(arr) <= 0)):
                raise VectorTypeError("sparse indices must be strictly increasing and < dim")
        else:
            if dim is not None and dim != arr.size:
                raise VectorTypeError(f"payload length {arr.size} != dim {dim}")
            dim = arr.size
            if space is Space.BIPOLAR:
                if np.any((arr != 1) & (arr != -1)):
                    raise VectorTypeError("bipolar payload must contain only -1 and +1")
            elif space is Space.DENSE_BINARY:
                if np.any((arr != 0) & (arr != 1)):
                    raise VectorTypeError("binary payload must contain only 0 and 1")
            elif space is Space.INTEGER:
                if arr.dtype.kind == "f" and np.any(arr != np.round(arr)):
                    raise VectorTypeError("integer payload must hold integral values")
            arr = arr.astype(_DTYPES[space], copy=False)
            if space is Space.ANGLE:
                if np.any(~((arr > -math.pi) & (arr <= math.pi))):
                    raise VectorTypeError("angles must lie in (-pi, pi]")
        if dim < 1:
            raise VectorTypeError("dimension must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Hypervector is immutable")

    @property
    def space(self) -> Space:
        return SPACE_OF[self.kind]

    def to_dense(self) -> np.ndarray:
        """Length-``dim`` array view of the payload (0/1 for sparse vectors)."""
        if self.space is Space.SPARSE_BINARY:
            out = np.zeros(self.dim, dtype=np.uint8)
            out[self.data] = 1
            return out
        return self.data

    @classmethod
    def from_dense_bits(cls, kind: VsaKind | str, bits) -> "Hypervector":
        bits = np.asarray(bits)
        return cls(kind, np.flatnonzero(bits), dim=bits.size)

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypervector):
            return NotImplemented
        return (
            self.kind is other.kind
            and self.dim == other.dim
            and np.array_equal(self.data, other.data)
        )

    __hash__ = None

    def __repr__(self) -> str:
        if self.space is Space.SPARSE_BINARY:
            return f"Hypervector({self.kind.value}, dim={self.dim}, on={self.data.size})"
        return f"Hypervector({self.kind.value}, dim={self.dim})"


def check_conforms(cfg: VsaConfig, *vectors: Hypervector) -> None:
    for v in vectors:
        if not isinstance(v, Hypervector):
            raise VectorTypeError(f"expected Hypervector, got {type(v).__name__}")
        if v.kind is not cfg.kind:
            raise VectorTypeError(f"vector of kind {v.kind} does not match config {cfg.kind}")
        if v.dim != cfg.dim:
            raise VectorTypeError(f"vector dimension {v.dim} does not match config {cfg.dim}")


def check_same(*vectors: Hypervector) -> None:
    first = vectors[0]
    for v in vectors:
        if not isinstance(v, Hypervector):
            raise VectorTypeError(f"expected Hypervector, got {type(v).__name__}")
        if v.kind is not first.kind or v.dim != first.dim:
            raise VectorTypeError(
                f"mismatched operands: {first.kind}/{first.dim} vs {v.kind}/{v.dim}"
            )


def random_array(cfg: VsaConfig, gen: np.random.Generator) -> np.ndarray:
    """Raw payload of one atomic vector drawn from ``gen``."""
    D = cfg.dim
    kind = cfg.kind
    if kind is VsaKind.MAP_C:
        return gen.uniform(-1.0, 1.0, D)
    if kind in (VsaKind.MAP_B, VsaKind.MAP_I):
        return gen.integers(0, 2, D) * 2 - 1
    if kind in (VsaKind.HRR, VsaKind.VTB, VsaKind.MBAT):
        return gen.normal(0.0, 1.0 / math.sqrt(D), D)
    if kind is VsaKind.BSC:
        return gen.integers(0, 2, D)
    if kind is VsaKind.FHRR:
        return wrap_angle(gen.uniform(-math.pi, math.pi, D))
    if kind is VsaKind.BSDC_SEG:
        L = cfg.segment_length
        s = cfg.n_segments
        return np.arange(s) * L + gen.integers(0, L, s)
    # BSDC-CDT, BSDC-S
    return np.flatnonzero(gen.random(D) < cfg.p)


def random_vector(cfg: VsaConfig, rng: RngLike) -> Hypervector:
    """Draw one atomic hypervector following the architecture's init rule."""
    gen = as_generator(rng)
    return Hypervector(cfg.kind, random_array(cfg, gen), dim=cfg.dim)


def random_vectors(cfg: VsaConfig, rng: SeededRng, n: int, start: int = 0) -> list[Hypervector]:
    """``n`` atomic vectors, vector ``i`` drawn from stream ``rng.child(start + i)``."""
    return [random_vector(cfg, rng.child(start + i)) for i in range(n)]


def identity_vector(kind: VsaKind | str, dim: int) -> Hypervector:
    """Binding identity of an architecture.

    For BSDC-S the empty vector is returned; it hashes to shift 0 and is
    therefore a left identity only.
    """
    kind = VsaKind.parse(kind)
    if kind is VsaKind.MAP_C:
        return Hypervector(kind, np.ones(dim))
    if kind in (VsaKind.MAP_B, VsaKind.MAP_I):
        return Hypervector(kind, np.ones(dim, dtype=np.int64))
    if kind is VsaKind.BSC:
        return Hypervector(kind, np.zeros(dim, dtype=np.uint8))
    if kind is VsaKind.HRR:
        e = np.zeros(dim)
        e[0] = 1.0
        return Hypervector(kind, e)
    if kind is VsaKind.FHRR:
        return Hypervector(kind, np.zeros(dim))
    if kind is VsaKind.BSDC_S:
        return Hypervector(kind, np.empty(0, dtype=np.int64), dim=dim)
    raise UnsupportedOperationError(f"{kind} has no closed-form binding identity")


def density(hv: Hypervector) -> float:
    """Fraction of on-bits of a binary hypervector."""
    if hv.space is Space.SPARSE_BINARY:
        return hv.data.size / hv.dim
    if hv.space is Space.DENSE_BINARY:
        return float(np.count_nonzero(hv.data)) / hv.dim
    raise VectorTypeError(f"density is only defined for binary vectors, not {hv.space.value}")


def stack(vectors: Sequence[Hypervector]) -> np.ndarray:
    """Row-stack the dense views of ``vectors`` into a 2-D array."""
    if not vectors:
        raise ValueError("nothing to stack")
    rows = [v.to_dense() for v in vectors]
    return np.vstack(rows)


def from_rows(kind: VsaKind, rows: np.ndarray) -> list[Hypervector]:
    """Inverse of :func:`stack` for any kind."""
    if SPACE_OF[kind] is Space.SPARSE_BINARY:
        return [Hypervector.from_dense_bits(kind, r) for r in rows]
    return [Hypervector(kind, r) for r in rows]


def all_kinds() -> Iterable[VsaKind]:
    return iter(VsaKind)
