import math

import pytest

from irscov.model import FadingConfig, LinkGeometry, SystemParams, noise_variance_w

# reference scenario used throughout: P = 2.5 W, r = 500 m, d = 100 m,
# psi = 85 deg, alpha = 4, N = 500, theta = 5 dB,
# noise = -174 dBm/Hz + 10 log10(100 MHz) + 10 dB, zeta = 1
REF_NOISE_W = noise_variance_w(-174.0, 1e8, 10.0)


@pytest.fixture
def ref_geometry() -> LinkGeometry:
    return LinkGeometry(r=500.0, d=100.0, psi=math.radians(85.0), alpha=4.0, zeta=1.0)


@pytest.fixture
def ref_system() -> SystemParams:
    return SystemParams(power_w=2.5, noise_var=REF_NOISE_W, n_elements=500,
                        theta=10.0 ** 0.5)


def fading_iid(m: float, omega: float = 1.0) -> FadingConfig:
    return FadingConfig.iid(m, omega)
