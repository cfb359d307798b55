from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hdcbench.spaces import SeededRng, VsaConfig, VsaKind

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# kinds that support binding
BINDABLE = [k for k in VsaKind if k is not VsaKind.BSDC_CDT]


def small_dim(kind: VsaKind, dim: int = 256) -> int:
    """A dimension valid for ``kind`` near ``dim`` (VTB needs a square)."""
    if kind is VsaKind.VTB:
        root = max(2, int(round(dim ** 0.5)))
        return root * root
    return dim


def make_cfg(kind: VsaKind, dim: int = 256, **kw) -> VsaConfig:
    return VsaConfig(kind, small_dim(kind, dim), **kw)


@pytest.fixture
def rng():
    return SeededRng(1234, ("tests",))


def assert_angle_close(a, b, atol=1e-9):
    diff = np.angle(np.exp(1j * (np.asarray(a) - np.asarray(b))))
    np.testing.assert_allclose(diff, 0.0, atol=atol)
