"""Shared fixtures: the default desk-scale system is expensive enough to
build once per session and reuse across test modules."""
import numpy as np
import pytest

import shearuncert as su
from shearuncert import config as cfgmod


@pytest.fixture(scope="session")
def grid128():
    return su.make_grid(2, 8.0, 128)


@pytest.fixture(scope="session")
def default_system(grid128):
    """Classical band-limited system at the acceptance defaults, normalized."""
    spec = su.GeneratorSpec()
    system = su.build_system(spec, grid128, a_min=1 / 16, a_max=1.0,
                             scale_count=12, shear_max=3.0, shear_count=13)
    return su.normalize_system(system)


@pytest.fixture(scope="session")
def oracle_system(grid128):
    """Fast-decaying generator: both transform routes agree to rounding."""
    spec = su.GeneratorSpec(kind="gaussian-derivative", gd_scale=0.5, gd_order=2)
    return su.build_system(spec, grid128, a_min=0.35, a_max=1.0,
                           scale_count=5, shear_max=0.5, shear_count=5)


@pytest.fixture(scope="session")
def family_signals(grid128):
    out = []
    for spec in cfgmod.default_signals():
        sig = su.gaussian_signal(grid128, center=spec.center, sigma=spec.sigma,
                                 modulation=spec.modulation)
        sig.metadata["label"] = spec.name
        out.append(sig)
    return out


@pytest.fixture(scope="session")
def mid_signal(family_signals):
    return family_signals[len(family_signals) // 2]


@pytest.fixture(scope="session")
def mid_context(mid_signal, default_system):
    return su.VerificationContext(mid_signal, default_system)


def rng(seed=0):
    return np.random.default_rng(seed)
