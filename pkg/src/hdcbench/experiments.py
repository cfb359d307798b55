"""Synthetic studies: bundling capacity, bundled pairs, item-memory size and
approximate unbinding chains.

Every cell derives its random streams from ``(cfg.seed, study, D, repeat,
k)``, so results do not depend on evaluation order or thread count.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .algebra import TRAITS, bind_rows, bundle_rows, recover_key_rows, unbind_rows
from .errors import UnsupportedOperationError
from .similarity import prepare, score, similarity_bounds
from .spaces import SeededRng, VsaConfig, VsaKind, random_array

DEFAULT_DIMS = tuple(i * i for i in range(2, 35))
FAST_DIMS = tuple(i * i for i in range(2, 35, 4))
DEFAULT_KS = tuple(range(2, 51))
FAST_KS = tuple(range(2, 51, 4))
APPROX_KINDS = (VsaKind.MAP_C, VsaKind.HRR, VsaKind.VTB)

# kinds whose binding keeps only a hash of the key; their roles cannot be
# read back from a bundle of pairs
KEY_HASH_KINDS = frozenset({VsaKind.MBAT, VsaKind.BSDC_S})


def parallel_map(fn: Callable, tasks: Sequence, threads: int = 1) -> list:
    """``[fn(t) for t in tasks]``, optionally on a thread pool; order is kept."""
    if threads is None or threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


def memory_rows(cfg: VsaConfig, n: int, stream: tuple) -> np.ndarray:
    """Dense views of ``n`` atomic vectors, item ``i`` drawn from ``stream + (i,)``."""
    base = SeededRng(cfg.seed, stream)
    arrays = [random_array(cfg, base.child(i).generator()) for i in range(n)]
    if cfg.is_sparse:
        out = np.zeros((n, cfg.dim), dtype=np.uint8)
        for i, a in enumerate(arrays):
            out[i, a] = 1
        return out
    return np.vstack(arrays)


# --------------------------------------------------------------------------
# result types


@dataclass
class CapacityGrid:
    """Mean retrieval accuracy per (dimension, k); ``cells`` keeps every repeat."""

    kind: VsaKind
    mode: str
    dims: tuple[int, ...]
    ks: tuple[int, ...]
    repeats: int
    n_items: int
    cells: np.ndarray  # dims x ks x repeats

    @property
    def accuracy(self) -> np.ndarray:
        return self.cells.mean(axis=2)

    def records(self) -> Iterator[tuple]:
        for i, D in enumerate(self.dims):
            for j, k in enumerate(self.ks):
                for r in range(self.repeats):
                    yield (self.kind.value, D, k, r, float(self.cells[i, j, r]))


@dataclass
class LineFit:
    slope: float
    intercept: float
    residuals: list[float]

    def __call__(self, k: float) -> float:
        return self.intercept + self.slope * k


@dataclass
class MinDimsSummary:
    """Smallest sampled dimension reaching ``threshold`` for each k."""

    kind: VsaKind
    threshold: float
    ks: tuple[int, ...]
    min_dims: list[int | None]
    fit: LineFit | None = None

    def at(self, k: int) -> int | None:
        return self.min_dims[self.ks.index(k)]

    def estimate(self, k: int) -> float | None:
        """Line-fit value at ``k`` (falls back to the raw grid value)."""
        if self.fit is not None:
            return self.fit(k)
        return self.at(k) if k in self.ks else None

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind.value,
            "threshold": self.threshold,
            "min_dims": {str(k): m for k, m in zip(self.ks, self.min_dims)},
            "fit": None,
        }
        if self.fit is not None:
            d["fit"] = {
                "slope": self.fit.slope,
                "intercept": self.fit.intercept,
                "residuals": self.fit.residuals,
            }
        return d


def fit_line(xs: Sequence[float], ys: Sequence[float]) -> LineFit | None:
    """Ordinary least-squares line; ``None`` with fewer than two points."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size < 2 or np.ptp(xs) == 0:
        return None
    slope, intercept = np.polyfit(xs, ys, 1)
    res = ys - (intercept + slope * xs)
    return LineFit(float(slope), float(intercept), [float(r) for r in res])


def min_dims(grid: CapacityGrid, threshold: float = 0.99) -> MinDimsSummary:
    """Per k the first sampled dimension whose mean accuracy meets ``threshold``.

    Unreached k are reported as ``None`` and left out of the line fit.
    """
    acc = grid.accuracy
    out: list[int | None] = []
    for j in range(len(grid.ks)):
        hit = np.flatnonzero(acc[:, j] >= threshold - 1e-12)
        out.append(int(grid.dims[hit[0]]) if hit.size else None)
    pts = [(k, m) for k, m in zip(grid.ks, out) if m is not None]
    fit = fit_line([p[0] for p in pts], [p[1] for p in pts]) if pts else None
    return MinDimsSummary(grid.kind, threshold, tuple(grid.ks), out, fit)


# --------------------------------------------------------------------------
# bundling capacity and bundled pairs


def _top_k_hits(scores: np.ndarray, members: np.ndarray, k: int) -> int:
    top = np.argsort(-scores, kind="stable")[:k]
    return int(np.isin(top, members).sum())


def _capacity_cell(cfg: VsaConfig, D: int, rep: int, ks: Sequence[int], n_items: int) -> list[float]:
    c = cfg.with_dim(D)
    rows = memory_rows(c, n_items, ("capacity-items", D, rep))
    mem = prepare(c.kind, rows)
    out = []
    for k in ks:
        gen = SeededRng(cfg.seed, ("capacity-draw", D, rep, k)).generator()
        idx = gen.choice(n_items, size=k, replace=False)
        b = bundle_rows(c, rows[idx], SeededRng(cfg.seed, ("capacity-ties", D, rep, k)))
        s = score(prepare(c.kind, b[None, :], allow_zero=True), mem)[0]
        out.append(_top_k_hits(s, idx, k) / k)
    return out


def _pairs_cell(cfg: VsaConfig, D: int, rep: int, ks: Sequence[int], n_items: int) -> list[float]:
    c = cfg.with_dim(D)
    rows = memory_rows(c, n_items, ("pairs-items", D, rep))
    mem = prepare(c.kind, rows)
    out = []
    for k in ks:
        gen = SeededRng(cfg.seed, ("pairs-draw", D, rep, k)).generator()
        idx = gen.choice(n_items, size=2 * k, replace=False)
        roles, fillers = idx[:k], idx[k:]
        bound = bind_rows(c, rows[roles], rows[fillers])
        R = bundle_rows(c, bound, SeededRng(cfg.seed, ("pairs-ties", D, rep, k)))[None, :]
        probes = [unbind_rows(c, rows[roles], R)]
        targets = [fillers]
        if c.kind not in KEY_HASH_KINDS:
            probes.append(recover_key_rows(c, rows[fillers], R))
            targets.append(roles)
        s = score(prepare(c.kind, np.vstack(probes), allow_zero=True), mem)
        best = np.argmax(s, axis=1)
        truth = np.concatenate(targets)
        out.append(float(np.mean(best == truth)))
    return out


def _run_grid(cell, mode, cfg, n_items, dims, ks, repeats, threads, progress) -> CapacityGrid:
    if cfg.kind is VsaKind.BSDC_CDT and mode == "pairs":
        raise UnsupportedOperationError("BSDC-CDT binding is not implemented")
    dims = tuple(int(d) for d in dims)
    ks = tuple(int(k) for k in ks)
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    need = 2 * max(ks) if mode == "pairs" else max(ks)
    if need > n_items:
        raise ValueError(f"k={max(ks)} needs {need} distinct items but the memory holds {n_items}")
    if min(ks) < 1:
        raise ValueError("k must be positive")
    tasks = [(D, r) for D in dims for r in range(repeats)]

    def run(task):
        res = cell(cfg, task[0], task[1], ks, n_items)
        if progress is not None:
            progress(task)
        return res

    results = parallel_map(run, tasks, threads)
    cells = np.zeros((len(dims), len(ks), repeats))
    for (D, r), accs in zip(tasks, results):
        cells[dims.index(D), :, r] = accs
    return CapacityGrid(cfg.kind, mode, dims, ks, repeats, n_items, cells)


def run_capacity(
    cfg: VsaConfig,
    n_items: int = 1000,
    dims: Iterable[int] = DEFAULT_DIMS,
    ks: Iterable[int] = DEFAULT_KS,
    repeats: int = 10,
    threads: int = 1,
    progress=None,
) -> CapacityGrid:
    """Bundle k distinct items and count how many of them the top-k query returns."""
    return _run_grid(_capacity_cell, "bundle", cfg, n_items, dims, ks, repeats, threads, progress)


def run_bundled_pairs(
    cfg: VsaConfig,
    n_items: int = 1000,
    dims: Iterable[int] = DEFAULT_DIMS,
    ks: Iterable[int] = DEFAULT_KS,
    repeats: int = 10,
    threads: int = 1,
    progress=None,
) -> CapacityGrid:
    """Bundle k bound role-filler pairs and recover every item by unbinding its partner.

    Accuracy is the fraction of recovered items whose clean-up is correct.
    MBAT and BSDC-S bind through a hash of the role, so only their fillers
    can be recovered and accuracy is taken over the k fillers.
    """
    return _run_grid(_pairs_cell, "pairs", cfg, n_items, dims, ks, repeats, threads, progress)


# --------------------------------------------------------------------------
# item-memory size


@dataclass
class ItemMemSweep:
    kind: VsaKind
    k: int
    ns: tuple[int, ...]
    dims: tuple[int, ...]
    repeats: int
    threshold: float
    cells: np.ndarray  # ns x dims x repeats

    @property
    def accuracy(self) -> np.ndarray:
        return self.cells.mean(axis=2)

    @property
    def min_dims(self) -> list[int | None]:
        out = []
        for row in self.accuracy:
            hit = np.flatnonzero(row >= self.threshold - 1e-12)
            out.append(int(self.dims[hit[0]]) if hit.size else None)
        return out

    def records(self) -> Iterator[tuple]:
        for i, n in enumerate(self.ns):
            for j, D in enumerate(self.dims):
                for r in range(self.repeats):
                    yield (self.kind.value, n, D, self.k, r, float(self.cells[i, j, r]))


def _itemmem_cell(cfg: VsaConfig, D: int, rep: int, k: int, ns: Sequence[int]) -> list[float]:
    c = cfg.with_dim(D)
    rows = memory_rows(c, max(ns), ("itemmem-items", D, rep))
    out = []
    for n in ns:
        sub = rows[:n]
        gen = SeededRng(cfg.seed, ("itemmem-draw", D, rep, n)).generator()
        idx = gen.choice(n, size=k, replace=False)
        b = bundle_rows(c, sub[idx], SeededRng(cfg.seed, ("itemmem-ties", D, rep, n)))
        s = score(prepare(c.kind, b[None, :], allow_zero=True), prepare(c.kind, sub))[0]
        out.append(_top_k_hits(s, idx, k) / k)
    return out


def run_itemmem_sweep(
    cfg: VsaConfig,
    k: int = 10,
    ns: Iterable[int] = (10, 100, 1000, 10000),
    dims: Iterable[int] = DEFAULT_DIMS,
    repeats: int = 10,
    threshold: float = 0.99,
    threads: int = 1,
) -> ItemMemSweep:
    """Minimum dimension for ``k`` bundled items as the item memory grows.

    Memories of one (D, repeat) cell are prefixes of a single draw, so a
    larger N only adds candidates.
    """
    ns = tuple(int(n) for n in ns)
    dims = tuple(int(d) for d in dims)
    if list(ns) != sorted(ns):
        raise ValueError("memory sizes must be ascending")
    if k > ns[0]:
        raise ValueError(f"k={k} exceeds the smallest memory size {ns[0]}")
    tasks = [(D, r) for D in dims for r in range(repeats)]
    results = parallel_map(lambda t: _itemmem_cell(cfg, t[0], t[1], k, ns), tasks, threads)
    cells = np.zeros((len(ns), len(dims), repeats))
    for (D, r), accs in zip(tasks, results):
        cells[:, dims.index(D), r] = accs
    return ItemMemSweep(cfg.kind, k, ns, dims, repeats, threshold, cells)


# --------------------------------------------------------------------------
# approximate unbinding


@dataclass
class UnbindCurve:
    kind: VsaKind
    dim: int
    values: np.ndarray  # repeats x (n_max + 1), normalized similarity

    @property
    def mean(self) -> np.ndarray:
        return self.values.mean(axis=0)

    def records(self) -> Iterator[tuple]:
        for r, row in enumerate(self.values):
            for n, v in enumerate(row):
                yield (self.kind.value, self.dim, n, r, float(v))


def normalized_similarity(kind: VsaKind, s: np.ndarray) -> np.ndarray:
    """Map similarity onto [0, 1] between the kind's minimum and maximum value."""
    lo, hi = similarity_bounds(kind)
    return (np.asarray(s) - lo) / (hi - lo)


def _chain_curve(cfg: VsaConfig, rep: int, n_max: int) -> np.ndarray:
    rows = memory_rows(cfg, n_max + 1, ("unbind-chain", rep))
    v, keys = rows[:1], rows[1:]
    ref = prepare(cfg.kind, v)
    out = np.empty(n_max + 1)
    S = v
    for n in range(n_max + 1):
        if n:
            S = bind_rows(cfg, keys[n - 1 : n], S)
        rec = S
        for j in range(n - 1, -1, -1):
            rec = unbind_rows(cfg, keys[j : j + 1], rec)
        out[n] = score(prepare(cfg.kind, rec, allow_zero=True), ref)[0, 0]
    return normalized_similarity(cfg.kind, out)


def run_approx_unbind(
    kinds: Iterable[VsaKind | str] = APPROX_KINDS,
    dim: int = 1024,
    n_max: int = 40,
    repeats: int = 20,
    seed: int = 0,
    threads: int = 1,
) -> dict[VsaKind, UnbindCurve]:
    """Bind a vector with n random keys in turn, unbind them in reverse, compare.

    Exact-inverse kinds are accepted with a warning and serve as controls.
    """
    out = {}
    for kind in kinds:
        kind = VsaKind.parse(kind)
        if not TRAITS[kind].has_unbind:
            raise UnsupportedOperationError(f"{kind} has no unbinding operator")
        if TRAITS[kind].exact_inverse:
            warnings.warn(f"{kind} unbinds exactly; its curve stays at 1.0", stacklevel=2)
        cfg = VsaConfig(kind, dim, seed=seed)
        vals = parallel_map(lambda r: _chain_curve(cfg, r, n_max), list(range(repeats)), threads)
        out[kind] = UnbindCurve(kind, dim, np.vstack(vals))
    return out
