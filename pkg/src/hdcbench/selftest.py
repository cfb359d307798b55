"""Fast invariant checks run by ``hdcb selftest``."""

from __future__ import annotations

import numpy as np

from .algebra import Accumulator, bind, bundle, permute, recover_key, thin, traits, unbind
from .errors import HDCError
from .serialization import decode_hvec, encode_hvec
from .similarity import similarity
from .spaces import SeededRng, VsaConfig, VsaKind, identity_vector, random_vector

_DIMS = {VsaKind.VTB: 256, VsaKind.MBAT: 256}


def _cfg(kind: VsaKind, seed: int) -> VsaConfig:
    return VsaConfig(kind, _DIMS.get(kind, 1024), seed=seed)


def _check_kind(kind: VsaKind, seed: int) -> list[tuple[str, bool, str]]:
    cfg = _cfg(kind, seed)
    rng = SeededRng(seed, ("selftest", kind.value))
    a, b, c = (random_vector(cfg, rng.child(i)) for i in range(3))
    out = []

    s_aa = similarity(cfg, a, a)
    out.append((f"{kind.value}/self-similarity", abs(s_aa - 1.0) < 1e-9, f"{s_aa:.6f}"))

    s_ab = similarity(cfg, a, b)
    chance = 0.5 if kind is VsaKind.BSC else 0.0
    out.append((f"{kind.value}/quasi-orthogonal", abs(s_ab - chance) < 0.2, f"{s_ab:.4f}"))

    m = bundle(cfg, [a, b, c], SeededRng(seed, ("selftest-bundle",)))
    s_m = similarity(cfg, m, a)
    out.append((f"{kind.value}/bundle-similar", s_m > s_ab + 0.1, f"{s_m:.4f}"))

    p = permute(permute(a, 3), -3)
    out.append((f"{kind.value}/permute-inverse", p == a, "roll 3 then -3"))

    out.append((f"{kind.value}/serialization", decode_hvec(encode_hvec(a)) == a, "HVEC round trip"))

    if not traits(kind).has_unbind:
        return out
    r = unbind(cfg, a, bind(cfg, a, b))
    s_r = similarity(cfg, r, b)
    exact = traits(kind).exact_inverse or traits(kind).self_inverse and kind is not VsaKind.MAP_C
    ok = abs(s_r - 1.0) < 1e-9 if exact else s_r > 0.5
    out.append((f"{kind.value}/unbind", ok, f"{s_r:.4f}"))
    try:
        k = recover_key(cfg, b, bind(cfg, a, b))
        s_k = similarity(cfg, k, a)
        out.append((f"{kind.value}/recover-key", s_k > 0.5, f"{s_k:.4f}"))
    except HDCError:
        pass
    return out


def run_selftest(seed: int = 0) -> list[tuple[str, bool, str]]:
    """Return ``(check, passed, detail)`` triples for every kind."""
    results: list[tuple[str, bool, str]] = []
    for kind in VsaKind:
        try:
            results.extend(_check_kind(kind, seed))
        except HDCError as exc:
            results.append((f"{kind.value}/error", False, str(exc)))
    cfg = VsaConfig(VsaKind.BSDC_S, 1024, seed=seed)
    acc = Accumulator(cfg)
    acc.add(*(random_vector(cfg, SeededRng(seed, ("selftest-thin", i))) for i in range(40)))
    dense = acc.finalize()
    once = thin(dense, 0.2, SeededRng(seed, ("thin",)))
    twice = thin(once, 0.2, SeededRng(seed, ("thin",)))
    results.append(("thin/idempotent", once == twice, f"{len(once.data)} on-bits"))
    ident = identity_vector(VsaKind.FHRR, 64)
    x = random_vector(VsaConfig(VsaKind.FHRR, 64, seed=seed), SeededRng(seed, ("identity",)))
    y = bind(VsaConfig(VsaKind.FHRR, 64), ident, x)
    results.append(("FHRR/identity", bool(np.allclose(y.data, x.data)), "bind with identity"))
    return results
