import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qpelastic.errors import WoodAnomaly
from qpelastic.medium import list_modes, make_medium, make_quasi_momentum


@pytest.fixture
def medium():
    return make_medium(2.0, 1.0, 1.0, 1.0)


@pytest.fixture
def medium_fast():
    # k_p = 2.5, k_s = 5: several propagating modes
    return make_medium(2.0, 1.0, 1.0, 5.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def draw_momentum(rng, medium, kind, frac=0.9):
    """Anomaly-free quasi-momentum within the physical band."""
    kp = float(np.real(medium.k_p))
    for _ in range(200):
        if kind == "biqp3d":
            a = (float(rng.uniform(-kp, kp)) * frac * 0.7,
                 float(rng.uniform(-kp, kp)) * frac * 0.7)
        else:
            a = float(rng.uniform(-kp, kp)) * frac
        q = make_quasi_momentum(kind, a, medium)
        try:
            list_modes(medium, q, "tail_bound", gap=0.3, tol=1e-14)
        except WoodAnomaly:
            continue
        return q
    raise RuntimeError("no anomaly-free draw found")


def draw_medium(rng):
    lam = float(rng.uniform(-0.4, 3.0))
    mu = float(rng.uniform(0.5, 2.0))
    if lam + mu <= 0.1:
        lam = 0.2 - mu
    omega = float(rng.uniform(0.8, 3.0))
    return make_medium(lam, mu, 1.0, omega)
