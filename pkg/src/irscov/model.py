"""Physical link parameters and the deterministic geometry/moment formulas.

Conventions used throughout the package:

* fading variables are *amplitudes*: a Nakagami(m, Omega) amplitude Z has
  E[Z^2] = Omega and Z^2 ~ Gamma(shape=m, scale=Omega/m);
* the direct BS-UE channel amplitude is ``sqrt(zeta) * l**(-alpha/2) * Z``;
* one cascade element contributes the product of two independent Nakagami
  amplitudes, scaled by ``zeta * r**(-alpha/2) * d**(-alpha/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammaln

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def zeta_from_carrier(carrier_hz: float) -> float:
    """Near-field path-loss factor (wavelength / 4 pi)^2 at 1 m reference."""
    if carrier_hz <= 0:
        raise ValueError("carrier frequency must be positive")
    return (SPEED_OF_LIGHT / carrier_hz / (4.0 * math.pi)) ** 2


@dataclass(frozen=True)
class NakagamiParams:
    """Shape m (>= 0.5) and mean power Omega (> 0) of one fading link."""

    m: float
    omega: float = 1.0

    def __post_init__(self):
        if not (self.m >= 0.5 and math.isfinite(self.m)):
            raise ValueError(f"Nakagami shape must be >= 0.5, got {self.m}")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValueError(f"Omega must be positive, got {self.omega}")

    def amplitude_moment(self, b: float) -> float:
        """E[Z^b] = Gamma(m + b/2)/Gamma(m) * (Omega/m)^(b/2) for b >= 0."""
        if b < 0:
            raise ValueError("moment order must be >= 0")
        logv = gammaln(self.m + b / 2.0) - gammaln(self.m) + (b / 2.0) * math.log(self.omega / self.m)
        if logv > 700.0:
            raise OverflowError("Nakagami moment exceeds representable range")
        return math.exp(logv)

    @property
    def mean_amplitude(self) -> float:
        return self.amplitude_moment(1.0)

    @property
    def var_amplitude(self) -> float:
        return self.omega - self.mean_amplitude**2

    def density(self, z):
        """Amplitude pdf 2 m^m z^(2m-1) exp(-m z^2 / Omega) / (Omega^m Gamma(m))."""
        import numpy as np

        z = np.asarray(z, dtype=float)
        a = self.m / self.omega
        logf = (
            math.log(2.0)
            + self.m * math.log(a)
            - gammaln(self.m)
            + (2.0 * self.m - 1.0) * np.log(np.where(z > 0, z, 1.0))
            - a * z * z
        )
        out = np.where(z > 0, np.exp(logf), 0.0)
        if self.m == 0.5:  # finite limit at the origin
            out = np.where(z == 0, 2.0 * math.sqrt(a / math.pi), out)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class FadingConfig:
    """Per-link Nakagami parameters: BS-IRS (g), IRS-UE (h), BS-UE (q)."""

    bs_irs: NakagamiParams
    irs_ue: NakagamiParams
    bs_ue: NakagamiParams

    @classmethod
    def iid(cls, m: float, omega: float = 1.0) -> "FadingConfig":
        p = NakagamiParams(m, omega)
        return cls(p, p, p)


@dataclass(frozen=True)
class LinkGeometry:
    """BS-IRS distance r, IRS-UE distance d, angle psi at the IRS (radians),
    path-loss exponent alpha and near-field factor zeta.

    Exactly one of ``zeta`` / ``carrier_hz`` may be given; the other is
    derived. The shipped reference configs use zeta = 1.0, which is what the
    published curves correspond to; a physical 3 GHz carrier gives
    zeta ~ 6.3e-5.
    """

    r: float
    d: float
    psi: float
    alpha: float = 4.0
    zeta: float | None = None
    carrier_hz: float | None = None

    def __post_init__(self):
        if self.r <= 0 or self.d <= 0:
            raise ValueError("distances must be positive")
        if self.alpha < 2:
            raise ValueError("path-loss exponent must be >= 2")
        if self.zeta is None and self.carrier_hz is None:
            raise ValueError("give either zeta or carrier_hz")
        if self.zeta is not None and self.carrier_hz is not None:
            if abs(self.zeta - zeta_from_carrier(self.carrier_hz)) > 1e-9 * self.zeta:
                raise ValueError("zeta and carrier_hz are inconsistent")
        if self.zeta is None:
            object.__setattr__(self, "zeta", zeta_from_carrier(self.carrier_hz))
        if not (0.0 < self.zeta <= 1.0):
            raise ValueError(f"zeta must be in (0, 1], got {self.zeta}")

    def with_distance(self, d: float) -> "LinkGeometry":
        return LinkGeometry(self.r, d, self.psi, self.alpha, self.zeta)


@dataclass(frozen=True)
class SystemParams:
    """Transmit power P (W), noise variance (W), element count N and linear
    SNR threshold theta."""

    power_w: float
    noise_var: float
    n_elements: int
    theta: float

    def __post_init__(self):
        if self.power_w <= 0 or self.noise_var <= 0 or self.theta <= 0:
            raise ValueError("power, noise variance and theta must be positive")
        if self.n_elements < 0 or int(self.n_elements) != self.n_elements:
            raise ValueError("n_elements must be a nonnegative integer")

    def with_theta_db(self, theta_db: float) -> "SystemParams":
        return SystemParams(self.power_w, self.noise_var, self.n_elements, 10.0 ** (theta_db / 10.0))

    def with_n_elements(self, n: int) -> "SystemParams":
        return SystemParams(self.power_w, self.noise_var, n, self.theta)


def noise_variance_w(psd_dbm_per_hz: float = -174.0, bandwidth_hz: float = 1e8,
                     noise_figure_db: float = 10.0) -> float:
    """Receiver noise in watts: psd + 10 log10(W) + NF, converted from dBm."""
    dbm = psd_dbm_per_hz + 10.0 * math.log10(bandwidth_hz) + noise_figure_db
    return 10.0 ** ((dbm - 30.0) / 10.0)


def bs_ue_distance(geom: LinkGeometry) -> float:
    """BS-UE distance from the law of cosines at the IRS vertex."""
    l2 = geom.r**2 + geom.d**2 - 2.0 * geom.r * geom.d * math.cos(geom.psi)
    return math.sqrt(max(l2, 0.0))


def path_gain_cascade(geom: LinkGeometry) -> float:
    """Amplitude scale of one cascade element: zeta * r^(-a/2) * d^(-a/2)."""
    return geom.zeta * geom.r ** (-geom.alpha / 2.0) * geom.d ** (-geom.alpha / 2.0)


def path_gain_direct(geom: LinkGeometry) -> float:
    """Amplitude scale of the direct link: sqrt(zeta) * l^(-a/2)."""
    return math.sqrt(geom.zeta) * bs_ue_distance(geom) ** (-geom.alpha / 2.0)


def double_nakagami_moment(b: float, p1: NakagamiParams, p2: NakagamiParams) -> float:
    """b-th moment of the product of two independent Nakagami amplitudes."""
    return p1.amplitude_moment(b) * p2.amplitude_moment(b)


def cascade_mean_var(p1: NakagamiParams, p2: NakagamiParams) -> tuple[float, float]:
    """Mean and variance of one unscaled cascade element Y = Z1 * Z2."""
    mean = double_nakagami_moment(1.0, p1, p2)
    var = double_nakagami_moment(2.0, p1, p2) - mean**2
    return mean, var


def amplitude_threshold(sys: SystemParams) -> float:
    """Channel-amplitude threshold sqrt(theta * noise / P) equivalent to SNR > theta."""
    return math.sqrt(sys.theta * sys.noise_var / sys.power_w)
