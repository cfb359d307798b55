"""Clean-up memory: labeled atomic vectors with exact nearest-neighbor search."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, EmptyMemoryError, VectorTypeError
from .serialization import read_container, write_container, write_rows_csv
from .similarity import Prepared, prepare, score
from .spaces import Hypervector, SeededRng, VsaConfig, check_conforms, random_vectors


class ItemMemory:
    """Ordered store of ``(label, vector)`` entries.

    Retrieval is a linear scan over a precomputed matrix; ties rank by
    insertion order.
    """

    def __init__(self, cfg: VsaConfig, entries: Iterable[tuple[str, Hypervector]] = ()):
        self.cfg = cfg
        self._labels: list[str] = []
        self._vectors: list[Hypervector] = []
        self._index: dict[str, int] = {}
        self._prepared: Prepared | None = None
        for label, vec in entries:
            self.add(label, vec)

    def add(self, label: str, vector: Hypervector) -> None:
        check_conforms(self.cfg, vector)
        label = str(label)
        if label in self._index:
            raise ValueError(f"duplicate label {label!r}")
        self._index[label] = len(self._labels)
        self._labels.append(label)
        self._vectors.append(vector)
        self._prepared = None

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def __getitem__(self, label: str) -> Hypervector:
        try:
            return self._vectors[self._index[label]]
        except KeyError:
            raise KeyError(f"no entry labeled {label!r}") from None

    @property
    def labels(self) -> list[str]:
        return list(self._labels)

    @property
    def vectors(self) -> list[Hypervector]:
        return list(self._vectors)

    def entries(self) -> list[tuple[str, Hypervector]]:
        return list(zip(self._labels, self._vectors))

    def index_of(self, label: str) -> int:
        return self._index[label]

    def matrix(self) -> Prepared:
        if not self._labels:
            raise EmptyMemoryError("item memory is empty")
        if self._prepared is None:
            self._prepared = prepare(self.cfg.kind, self._vectors)
        return self._prepared

    def scores(self, probes: Sequence[Hypervector] | np.ndarray) -> np.ndarray:
        """Similarity of each probe (row) to every entry, shape ``(n_probes, N)``."""
        if not isinstance(probes, np.ndarray):
            check_conforms(self.cfg, *probes)
        return score(prepare(self.cfg.kind, probes), self.matrix())

    def query_top_k(self, probe: Hypervector, k: int) -> list[tuple[str, float]]:
        """The ``k`` most similar entries in descending order of similarity."""
        if not self._labels:
            raise EmptyMemoryError("item memory is empty")
        if not 1 <= k <= len(self):
            raise ValueError(f"k must lie in [1, {len(self)}], got {k}")
        s = self.scores([probe])[0]
        order = np.argsort(-s, kind="stable")[:k]
        return [(self._labels[i], float(s[i])) for i in order]

    def cleanup(self, probe: Hypervector) -> tuple[str, Hypervector]:
        """Nearest stored entry of ``probe``."""
        label, _ = self.query_top_k(probe, 1)[0]
        return label, self[label]

    def save(self, path: str | Path) -> None:
        write_container(
            path,
            {"items": self.entries()},
            metadata={"config": self.cfg.to_dict()},
        )

    @classmethod
    def load(cls, path: str | Path) -> "ItemMemory":
        sections, meta = read_container(path)
        if "items" not in sections or "config" not in meta:
            raise DataError(f"{path} does not hold an item memory")
        return cls(VsaConfig.from_dict(meta["config"]), sections["items"])

    def export_similarity_csv(self, path: str | Path) -> None:
        """Write the pairwise similarity matrix with labels as header and first column."""
        m = self.matrix()
        s = score(m, m)
        rows = ([lab] + [f"{x:.9g}" for x in row] for lab, row in zip(self._labels, s))
        write_rows_csv(path, [""] + self._labels, rows)


def populate_random(cfg: VsaConfig, n: int, rng: SeededRng | None = None) -> ItemMemory:
    """Memory of ``n`` atomic vectors ``item_0 .. item_{n-1}``, one RNG stream each."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"item memory size must be a positive integer, got {n!r}")
    if rng is None:
        rng = SeededRng(cfg.seed, ("items",))
    if not isinstance(rng, SeededRng):
        raise VectorTypeError("populate_random needs a SeededRng to derive per-item streams")
    vecs = random_vectors(cfg, rng, int(n))
    return ItemMemory(cfg, ((f"item_{i}", v) for i, v in enumerate(vecs)))
