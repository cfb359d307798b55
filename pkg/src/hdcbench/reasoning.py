"""Role-filler records and analogical queries between two records.

The demo asks "what is the Dollar of Mexico?" given one record describing
the USA and one describing Mexico, each with Name, Currency and Capital
pairs.  Self-inverse architectures answer with a single mapping vector;
all others need two unbinding steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    SELF_INVERSE_KINDS,
    TRAITS,
    bind,
    bind_rows,
    bundle,
    recover_key,
    unbind,
    unbind_rows,
)
from .errors import UnsupportedOperationError
from .item_memory import ItemMemory
from .similarity import prepare, score
from .spaces import Hypervector, SeededRng, VsaConfig, VsaKind, check_conforms, random_vectors


@dataclass(frozen=True)
class Record:
    """Bundle of bound role-filler pairs."""

    pairs: tuple[tuple[Hypervector, Hypervector], ...]
    vector: Hypervector


def build_record(
    cfg: VsaConfig, pairs: Sequence[tuple[Hypervector, Hypervector]], rng=None
) -> Record:
    """Bind each ``(role, filler)`` pair with the role as key and bundle the results."""
    if len(pairs) == 0:
        raise ValueError("a record needs at least one role-filler pair")
    for role, filler in pairs:
        check_conforms(cfg, role, filler)
    bound = [bind(cfg, role, filler) for role, filler in pairs]
    if rng is None:
        rng = SeededRng(cfg.seed, ("record",))
    vec = bundle(cfg, bound, rng) if len(bound) > 1 else bound[0]
    return Record(tuple((r, f) for r, f in pairs), vec)


def query_self_inverse(
    cfg: VsaConfig, record_a: Record, record_b: Record, probe: Hypervector
) -> Hypervector:
    """``probe * (A * B)``: map a filler of ``record_a`` onto ``record_b`` in one step."""
    if cfg.kind not in SELF_INVERSE_KINDS:
        raise UnsupportedOperationError(
            f"one-step analogy needs a self-inverse binding; {cfg.kind} is not. "
            "Use query_two_step instead."
        )
    mapping = bind(cfg, record_a.vector, record_b.vector)
    return bind(cfg, probe, mapping)


def _search_role(cfg: VsaConfig, record_vec: Hypervector, probe: Hypervector, roles: ItemMemory) -> str:
    # the key survives binding only as a hash, so test every candidate role
    R = record_vec.to_dense()[None, :]
    K = np.vstack([v.to_dense() for v in roles.vectors])
    fillers = unbind_rows(cfg, K, np.broadcast_to(R, K.shape))
    s = score(prepare(cfg.kind, fillers), prepare(cfg.kind, [probe]))[:, 0]
    return roles.labels[int(np.argmax(s))]


def query_two_step(
    cfg: VsaConfig,
    record_a: Record,
    record_b: Record,
    probe: Hypervector,
    roles: ItemMemory | None = None,
    clean: bool = True,
) -> Hypervector:
    """``B / (A / probe)``: find the probe's role in ``record_a``, then read it from ``record_b``.

    With ``roles`` given and ``clean`` set, the intermediate role estimate
    is replaced by its nearest entry in ``roles``.  MBAT and BSDC-S cannot
    recover a key from a bound vector, so for them ``roles`` is required and
    the role is found by testing every candidate.
    """
    kind = cfg.kind
    if not TRAITS[kind].has_unbind:
        raise UnsupportedOperationError(f"{kind} has no unbinding operator")
    check_conforms(cfg, probe, record_a.vector, record_b.vector)
    if kind in (VsaKind.MBAT, VsaKind.BSDC_S):
        if roles is None:
            raise UnsupportedOperationError(
                f"{kind} keeps only a hash of the role; pass the role memory to search it"
            )
        role = roles[_search_role(cfg, record_a.vector, probe, roles)]
    else:
        role = recover_key(cfg, probe, record_a.vector)
        if clean and roles is not None:
            _, role = roles.cleanup(role)
    return unbind(cfg, role, record_b.vector)


# --------------------------------------------------------------------------
# demo fixture

ROLE_NAMES = ("Name", "Curr", "Cap")
FILLERS_A = ("USA", "Dollar", "WashingtonDC")
FILLERS_B = ("Mexico", "Peso", "MexicoCity")


@dataclass(frozen=True)
class AnalogyFixture:
    cfg: VsaConfig
    record_a: Record
    record_b: Record
    memory: ItemMemory
    roles: ItemMemory


def make_fixture(cfg: VsaConfig, trial: int, distractors: int = 97) -> AnalogyFixture:
    """Two 3-pair country records plus a memory of all atoms and ``distractors`` extras."""
    rng = SeededRng(cfg.seed, ("analogy", trial))
    names = ROLE_NAMES + FILLERS_A + FILLERS_B
    atoms = dict(zip(names, random_vectors(cfg, rng.child("atoms"), len(names))))
    rec_a = build_record(cfg, [(atoms[r], atoms[f]) for r, f in zip(ROLE_NAMES, FILLERS_A)], rng.child("a"))
    rec_b = build_record(cfg, [(atoms[r], atoms[f]) for r, f in zip(ROLE_NAMES, FILLERS_B)], rng.child("b"))
    mem = ItemMemory(cfg, atoms.items())
    for i, v in enumerate(random_vectors(cfg, rng.child("distractors"), distractors)):
        mem.add(f"distractor_{i}", v)
    roles = ItemMemory(cfg, ((r, atoms[r]) for r in ROLE_NAMES))
    return AnalogyFixture(cfg, rec_a, rec_b, mem, roles)


def dollar_of_mexico(
    cfg: VsaConfig,
    trial: int,
    path: str = "auto",
    distractors: int = 97,
    clean: bool = True,
    probe_name: str = "Dollar",
) -> dict:
    """Run one analogy trial and report the answer.

    ``path`` is ``"one-step"``, ``"two-step"`` or ``"auto"`` (one-step for
    self-inverse kinds).  The expected answer is the partner filler of
    ``probe_name`` in the second record.
    """
    if path == "auto":
        path = "one-step" if cfg.kind in SELF_INVERSE_KINDS else "two-step"
    if path not in ("one-step", "two-step"):
        raise ValueError(f"unknown query path {path!r}")
    fx = make_fixture(cfg, trial, distractors)
    probe = fx.memory[probe_name]
    if path == "one-step":
        answer = query_self_inverse(cfg, fx.record_a, fx.record_b, probe)
    else:
        answer = query_two_step(cfg, fx.record_a, fx.record_b, probe, fx.roles, clean=clean)
    top = fx.memory.query_top_k(answer, 2)
    expected = dict(zip(FILLERS_A + ROLE_NAMES, FILLERS_B + ROLE_NAMES)).get(probe_name)
    return {
        "kind": cfg.kind.value,
        "dim": cfg.dim,
        "trial": trial,
        "path": path,
        "probe": probe_name,
        "expected": expected,
        "answer": top[0][0],
        "score": top[0][1],
        "margin": top[0][1] - top[1][1],
        "correct": top[0][0] == expected,
    }


def cross_term_similarity(cfg: VsaConfig, trial: int) -> float:
    """Largest similarity of a role-role cross term such as ``Name * Curr`` to any atom."""
    fx = make_fixture(cfg, trial, distractors=0)
    roles = fx.roles.vectors
    worst = -np.inf
    rows = np.vstack([v.to_dense() for v in fx.memory.vectors])
    for i in range(len(roles)):
        for j in range(i + 1, len(roles)):
            cross = bind_rows(cfg, roles[i].to_dense()[None, :], roles[j].to_dense()[None, :])
            worst = max(worst, float(score(prepare(cfg.kind, cross), prepare(cfg.kind, rows)).max()))
    return worst
