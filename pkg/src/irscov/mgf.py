"""Laplace transforms (MGFs) and characteristic functions of the channel
amplitudes: the direct Nakagami link, the N-element cascade in all three
regimes, and their independent combination.

Sign convention, used consistently by the inversion module: for an amplitude
X, ``mgf(s) = E[exp(-s X)]``; the characteristic-function values consumed by
Gil-Pelaez are ``mgf(1j * omega) = E[exp(-j omega X)]``. Every transform
equals exactly 1 at s = 0, and has modulus <= 1 on the imaginary axis.

The finite-N cascade is available both as the gamma closed form
(``gamma_iid`` regime; the literature form whose per-element mean is Omega,
not the true product mean E[Z1]E[Z2] -- the two transforms genuinely differ
and both are exposed) and as the exact numeric product transform built from
the double-Nakagami product density
f_Y(y) = 4 (a1 a2)^(p/2) y^(p-1) K_{m1-m2}(2 y sqrt(a1 a2)) / (G(m1) G(m2)),
p = m1 + m2, a_i = m_i / Omega_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc, gammainccinv, gammaln, kv

from .model import (
    FadingConfig,
    LinkGeometry,
    NakagamiParams,
    cascade_mean_var,
    double_nakagami_moment,
    path_gain_cascade,
    path_gain_direct,
)
from .specfun import WGK15, XGK15, erfcx_complex, integrate_adaptive

_SQRT_PI = math.sqrt(math.pi)


def _as_complex_array(s):
    arr = np.asarray(s, dtype=complex)
    if not np.isfinite(arr).all():
        raise ValueError("transform argument must be finite")
    return arr


def _raw_moments_from_cumulants(k1: float, k2: float, k3: float) -> tuple[float, float, float]:
    m1 = k1
    m2 = k2 + k1 * k1
    m3 = k3 + 3.0 * k2 * k1 + k1**3
    return m1, m2, m3


def _cumulants_from_raw(m1: float, m2: float, m3: float) -> tuple[float, float, float]:
    return m1, m2 - m1 * m1, m3 - 3.0 * m1 * m2 + 2.0 * m1**3


class ChannelTransform:
    """Common protocol: vectorised ``mgf``, raw moments, and helpers the
    Gil-Pelaez engine uses for truncation and panel sizing."""

    kind = "abstract"

    def mgf(self, s):
        raise NotImplementedError

    def moment(self, k: int) -> float:
        raise NotImplementedError

    @property
    def mean(self) -> float:
        return self.moment(1)

    @property
    def std(self) -> float:
        return math.sqrt(max(self.moment(2) - self.moment(1) ** 2, 0.0))

    def frequency_scale(self) -> float:
        """Effective extent of the amplitude distribution (mean + 4 sd);
        bounds the phase rate of the CF."""
        return self.moment(1) + 4.0 * self.std

    def cf_tail_bound(self, omega_star: float) -> float | None:
        """Certified bound on int_{w*}^inf |mgf(j w)| / (pi w) dw, or None
        when no closed-form envelope is available."""
        return None


@dataclass(frozen=True)
class DegenerateTransform(ChannelTransform):
    """Point mass at ``offset`` (offset = 0 is the absent-cascade N = 0 case)."""

    offset: float = 0.0
    kind = "degenerate"

    def mgf(self, s):
        s = _as_complex_array(s)
        return np.exp(-s * self.offset)

    def moment(self, k: int) -> float:
        return self.offset**k


@dataclass(frozen=True)
class GaussianTransform(ChannelTransform):
    """Gaussian amplitude: mgf(s) = exp(-mu s + 0.5 var s^2)."""

    mu: float
    var: float
    kind = "gaussian_clt"

    def __post_init__(self):
        if self.var < 0:
            raise ValueError("variance must be >= 0")

    def mgf(self, s):
        s = _as_complex_array(s)
        return np.exp(-self.mu * s + 0.5 * self.var * s * s)

    def moment(self, k: int) -> float:
        mu, v = self.mu, self.var
        return {1: mu, 2: mu * mu + v, 3: mu**3 + 3.0 * mu * v}[k]

    def cf_tail_bound(self, omega_star: float) -> float | None:
        if self.var <= 0:
            return None
        x = 0.5 * self.var * omega_star * omega_star
        if x < 1.0:
            return None
        # int_{w*}^inf e^{-var w^2 / 2} / (pi w) dw = E1(x) / (2 pi) <= e^-x / (2 pi x)
        return math.exp(-x) / (2.0 * math.pi * x)


@dataclass(frozen=True)
class GammaSumTransform(ChannelTransform):
    """Cascade modeled as scale * Gamma(n m, Omega/m): the i.i.d. closed form
    (1 + scale s Omega / m)^(-n m)."""

    scale: float
    m: float
    omega: float
    n: int
    kind = "gamma_iid"

    def mgf(self, s):
        s = _as_complex_array(s)
        base = 1.0 + self.scale * s * self.omega / self.m
        if np.any(np.abs(base) < 1e-12):
            raise ValueError("evaluation too close to the transform branch point")
        return np.power(base, -self.n * self.m)

    def moment(self, k: int) -> float:
        shape = self.n * self.m
        unit = self.scale * self.omega / self.m
        prod = 1.0
        for i in range(k):
            prod *= shape + i
        return unit**k * prod

    def cf_tail_bound(self, omega_star: float) -> float | None:
        q = self.n * self.m
        if q <= 0:
            return None
        b = self.scale * self.omega / self.m
        x = b * omega_star
        if x <= 1.0:
            return None
        return x ** (-q) / (math.pi * q)


@dataclass(frozen=True)
class NakagamiAmplitudeTransform(ChannelTransform):
    """X = scale * Z with Z Nakagami(m, Omega).

    Closed form through the recursion
    I_0 = (1/2) sqrt(pi/a) erfcx(u), I_1 = (1 - s I_0) / (2a),
    I_k = ((k-1) I_{k-2} - s I_{k-1}) / (2a), mgf = 2 a^m I_{2m-1} / Gamma(m)
    whenever 2m is an integer (all scenarios of interest); a phase-aware
    composite quadrature rule otherwise.
    """

    params: NakagamiParams
    scale: float = 1.0
    kind = "nakagami_direct"

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    @property
    def _a(self) -> float:
        return self.params.m / self.params.omega

    def _closed_form(self, se):
        a = self._a
        k_top = int(round(2.0 * self.params.m - 1.0))
        u = se / (2.0 * math.sqrt(a))
        i_prev = 0.5 * math.sqrt(math.pi / a) * erfcx_complex(u)  # I_0
        if k_top == 0:
            i_k = i_prev
        else:
            i_cur = (1.0 - se * i_prev) / (2.0 * a)  # I_1
            for k in range(2, k_top + 1):
                i_prev, i_cur = i_cur, ((k - 1) * i_prev - se * i_cur) / (2.0 * a)
            i_k = i_cur
        return (2.0 * a**self.params.m / math.gamma(self.params.m)) * i_k

    def _quadrature_batch(self, se):
        # composite GK rule on [0, z*]: panels graded toward the origin
        # (density derivatives blow up there for non-integer 2m) and split so
        # no panel spans more than ~1.2 rad of oscillation
        a = self._a
        z_hi = math.sqrt(gammainccinv(self.params.m, 1e-16) / a)
        max_im = float(np.max(np.abs(se.imag))) if se.size else 0.0
        coarse = [0.0] + [z_hi * 2.0 ** (-k) for k in range(30, -1, -1)]
        zs, ws = [], []
        for lo, hi in zip(coarse[:-1], coarse[1:]):
            splits = int(min(max(1, math.ceil(max_im * (hi - lo) / 1.2)), 1024))
            sub = np.linspace(lo, hi, splits + 1)
            half = 0.5 * (sub[1:] - sub[:-1])
            mid = 0.5 * (sub[1:] + sub[:-1])
            zs.append((mid[:, None] + half[:, None] * XGK15[None, :]).ravel())
            ws.append((half[:, None] * WGK15[None, :]).ravel())
        z = np.concatenate(zs)
        wf = np.concatenate(ws) * self.params.density(z)
        norm = float(wf.sum())
        out = np.empty(se.shape, dtype=complex)
        flat = se.ravel()
        chunk = max(1, 2**22 // max(z.size, 1))
        for i in range(0, flat.size, chunk):
            sl = flat[i:i + chunk]
            out.ravel()[i:i + chunk] = np.exp(-np.outer(sl, z)) @ wf
        return out / norm

    def mgf(self, s):
        s = _as_complex_array(s)
        se = s * self.scale
        if abs(2.0 * self.params.m - round(2.0 * self.params.m)) < 1e-12:
            return self._closed_form(se)
        return self._quadrature_batch(np.atleast_1d(se)).reshape(s.shape)

    def moment(self, k: int) -> float:
        return self.scale**k * self.params.amplitude_moment(float(k))

    def _bounded_variation(self) -> float:
        m, om = self.params.m, self.params.omega
        a = m / om
        if m == 0.5:
            return 2.0 * 2.0 * math.sqrt(a / math.pi)  # f(0) + TV of decreasing density
        mode = math.sqrt((2.0 * m - 1.0) / (2.0 * a))
        return 2.0 * float(self.params.density(mode))

    def cf_tail_bound(self, omega_star: float) -> float | None:
        c = self._bounded_variation() / self.scale
        if omega_star <= 0:
            return None
        return c / (math.pi * omega_star)


def double_nakagami_density(p1: NakagamiParams, p2: NakagamiParams):
    """pdf of Y = Z1 Z2 (independent Nakagami amplitudes), as a vectorised
    callable; Bessel-K form."""
    a1, a2 = p1.m / p1.omega, p2.m / p2.omega
    p = p1.m + p2.m
    nu = p1.m - p2.m
    beta = 2.0 * math.sqrt(a1 * a2)
    lead = math.exp(math.log(4.0) + 0.5 * p * math.log(a1 * a2)
                    - gammaln(p1.m) - gammaln(p2.m))

    def pdf(y):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        pos = y > 0
        out[pos] = lead * y[pos] ** (p - 1.0) * kv(nu, beta * y[pos])
        return out

    return pdf


@dataclass(frozen=True)
class DoubleNakagamiSumTransform(ChannelTransform):
    """Exact finite-N cascade: X = scale * sum of n i.i.d. products of two
    independent Nakagami amplitudes; per-element MGF by quadrature against
    the Bessel-K product density, raised to the n-th power."""

    p1: NakagamiParams
    p2: NakagamiParams
    n: int
    scale: float = 1.0
    kind = "double_nakagami_numeric"
    _rule: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("element count must be >= 0")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def _tail_mass(self, y0: float) -> float:
        # K_nu(x) <= 2 sqrt(pi/(2x)) e^{-x} for x >= max(1, nu^2)
        a1, a2 = self.p1.m / self.p1.omega, self.p2.m / self.p2.omega
        p = self.p1.m + self.p2.m
        beta = 2.0 * math.sqrt(a1 * a2)
        x0 = beta * y0
        if x0 < max(1.0, (self.p1.m - self.p2.m) ** 2):
            return 1.0
        log_lead = (math.log(8.0) + 0.5 * p * math.log(a1 * a2)
                    - gammaln(self.p1.m) - gammaln(self.p2.m)
                    + 0.5 * math.log(math.pi / (2.0 * beta))
                    - (p - 0.5) * math.log(beta) + gammaln(p - 0.5))
        return math.exp(log_lead) * float(gammaincc(p - 0.5, x0))

    def _build_rule(self, max_abs_im: float):
        key = float(np.ceil(np.log2(max(max_abs_im, 1e-300))))
        cached = self._rule.get(key)
        if cached is not None:
            return cached
        y_hi = 1.0
        while self._tail_mass(y_hi) > 1e-15:
            y_hi *= 2.0
            if y_hi > 1e12:
                raise RuntimeError("product-density tail does not certify")
        # geometric grading toward the (possibly log-singular) origin,
        # then phase-limited splitting of every panel
        edges = [0.0] + [y_hi * 2.0 ** (-k) for k in range(50, -1, -1)]
        pdf = double_nakagami_density(self.p1, self.p2)
        max_im = 2.0 ** key
        nodes, wf = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            splits = int(min(max(1, math.ceil(max_im * (hi - lo) / 1.2)), 512))
            sub = np.linspace(lo, hi, splits + 1)
            half = 0.5 * (sub[1:] - sub[:-1])
            mid = 0.5 * (sub[1:] + sub[:-1])
            z = (mid[:, None] + half[:, None] * XGK15[None, :]).ravel()
            w = (half[:, None] * WGK15[None, :]).ravel()
            nodes.append(z)
            wf.append(w * pdf(z))
        nodes = np.concatenate(nodes)
        wf = np.concatenate(wf)
        rule = (nodes, wf, float(wf.sum()))
        self._rule[key] = rule
        return rule

    def element_mgf(self, s):
        """MGF of one unscaled product element Y."""
        s = _as_complex_array(s)
        flat = np.atleast_1d(s).ravel()
        nodes, wf, norm = self._build_rule(float(np.max(np.abs(flat.imag))) * self.scale
                                           if flat.size else 1.0)
        out = np.empty(flat.shape, dtype=complex)
        chunk = max(1, 2**22 // max(nodes.size, 1))
        for i in range(0, flat.size, chunk):
            out[i:i + chunk] = np.exp(-np.outer(flat[i:i + chunk], nodes)) @ wf
        out /= norm  # rule normalised so that mgf(0) = 1 exactly
        return out.reshape(np.shape(s)) if np.ndim(s) else complex(out[0])

    def mgf(self, s):
        s = _as_complex_array(s)
        if self.n == 0:
            return np.ones_like(s)
        return np.power(self.element_mgf(self.scale * s), self.n)

    def moment(self, k: int) -> float:
        e1 = double_nakagami_moment(1.0, self.p1, self.p2)
        e2 = double_nakagami_moment(2.0, self.p1, self.p2)
        e3 = double_nakagami_moment(3.0, self.p1, self.p2)
        k1, k2, k3 = _cumulants_from_raw(e1, e2, e3)
        m1, m2, m3 = _raw_moments_from_cumulants(self.n * k1, self.n * k2, self.n * k3)
        return self.scale**k * {1: m1, 2: m2, 3: m3}[k]

    def cf_tail_bound(self, omega_star: float) -> float | None:
        if self.n == 0 or min(self.p1.m, self.p2.m) <= 0.5:
            return None  # product density unbounded at the origin for m = 1/2
        nodes, _, _ = self._build_rule(1.0)
        pdf = double_nakagami_density(self.p1, self.p2)
        bv = 2.0 * float(pdf(nodes).max()) * 1.05
        x = bv / (self.scale * omega_star)
        if x >= 1.0:
            return None
        return x**self.n / (math.pi * self.n)


@dataclass(frozen=True)
class ProductTransform(ChannelTransform):
    """Transform of an independent sum: product of the factor transforms."""

    factors: tuple
    kind = "product_composite"

    def mgf(self, s):
        s = _as_complex_array(s)
        out = np.ones_like(s)
        for f in self.factors:
            out = out * f.mgf(s)
        return out

    def moment(self, k: int) -> float:
        k1 = k2 = k3 = 0.0
        for f in self.factors:
            c1, c2, c3 = _cumulants_from_raw(f.moment(1), f.moment(2), f.moment(3))
            k1, k2, k3 = k1 + c1, k2 + c2, k3 + c3
        m1, m2, m3 = _raw_moments_from_cumulants(k1, k2, k3)
        return {1: m1, 2: m2, 3: m3}[k]

    def cf_tail_bound(self, omega_star: float) -> float | None:
        bounds = [b for b in (f.cf_tail_bound(omega_star) for f in self.factors)
                  if b is not None]
        return min(bounds) if bounds else None


# ---------------------------------------------------------------------------
# module operations
# ---------------------------------------------------------------------------

def mgf_nakagami(p: NakagamiParams, s, scale: float = 1.0, method: str = "auto"):
    """E[exp(-s * scale * Z)] for Z Nakagami(m, Omega).

    ``method='quadrature'`` forces the defining-integral route (the reference
    used by the oracle tests); 'closed' forces the erfcx recursion (2m must be
    an integer); 'auto' picks the closed form when available.
    """
    t = NakagamiAmplitudeTransform(p, scale)
    s_arr = _as_complex_array(s)
    if method == "auto":
        return t.mgf(s)
    if method == "closed":
        if abs(2.0 * p.m - round(2.0 * p.m)) > 1e-12:
            raise ValueError("closed form needs 2m integer")
        return t._closed_form(s_arr * scale)
    if method == "quadrature":
        scalar = s_arr.ndim == 0
        flat = np.atleast_1d(s_arr).ravel() * scale
        a = p.m / p.omega
        out = np.empty(flat.shape, dtype=complex)
        for i, sv in enumerate(flat):
            res = integrate_adaptive(
                lambda z, sv=sv: p.density(z) * np.exp(-sv * z),
                0.0, np.inf,
                abs_tol=1e-12, rel_tol=1e-11, max_panels=16384,
                tail_bound=lambda z0: float(gammaincc(p.m, a * z0 * z0)),
            )
            out[i] = res.value
        return complex(out[0]) if scalar else out.reshape(s_arr.shape)
    raise ValueError(f"unknown method {method!r}")


def mgf_rayleigh_closed(omega_pow: float, s, scale: float = 1.0):
    """m = 1 closed form: 1 - (s sqrt(pi Omega)/2) erfcx(s sqrt(Omega)/2),
    evaluated through the scaled error function so the exp(s^2 Omega / 4)
    factor can never overflow."""
    if omega_pow <= 0:
        raise ValueError("Omega must be positive")
    se = _as_complex_array(s) * scale
    u = se * math.sqrt(omega_pow) / 2.0
    return 1.0 - _SQRT_PI * u * erfcx_complex(u)


def mgf_double_nakagami(p1: NakagamiParams, p2: NakagamiParams, s, scale: float = 1.0):
    """MGF of one scaled double-Nakagami product element."""
    t = DoubleNakagamiSumTransform(p1, p2, 1, scale)
    return t.mgf(s)


def mgf_double_nakagami_nested(p1: NakagamiParams, p2: NakagamiParams, s: complex) -> complex:
    """Cross-check route: E_h[ M_{Z1}(s h) ] with the outer integral over the
    second factor's density. Slower; used to validate the Bessel-K route."""
    s = complex(s)
    t1 = NakagamiAmplitudeTransform(p1, 1.0)
    a2 = p2.m / p2.omega

    def outer(h):
        return p2.density(h) * t1.mgf(s * h)

    res = integrate_adaptive(
        outer, 0.0, np.inf, abs_tol=1e-11, rel_tol=1e-10, max_panels=16384,
        tail_bound=lambda h0: float(gammaincc(p2.m, a2 * h0 * h0)),
    )
    return complex(res.value)


def cascade_transform_clt(geom: LinkGeometry, fading: FadingConfig, n: int) -> ChannelTransform:
    """Large-N Gaussian cascade: mean rho N E[Y], variance rho^2 N var[Y]."""
    if n == 0:
        return DegenerateTransform(0.0)
    rho = path_gain_cascade(geom)
    mu_y, var_y = cascade_mean_var(fading.bs_irs, fading.irs_ue)
    return GaussianTransform(rho * n * mu_y, rho * rho * n * var_y)


def cascade_transform_gamma_iid(geom: LinkGeometry, fading: FadingConfig, n: int) -> ChannelTransform:
    """Gamma closed form; requires identical Nakagami parameters on both hops."""
    g, h = fading.bs_irs, fading.irs_ue
    if (g.m, g.omega) != (h.m, h.omega):
        raise ValueError("gamma_iid regime needs identical BS-IRS and IRS-UE fading")
    if n == 0:
        return DegenerateTransform(0.0)
    return GammaSumTransform(path_gain_cascade(geom), g.m, g.omega, n)


def cascade_transform_exact(geom: LinkGeometry, fading: FadingConfig, n: int) -> ChannelTransform:
    """Exact finite-N product transform (handles unequal hop parameters)."""
    if n == 0:
        return DegenerateTransform(0.0)
    return DoubleNakagamiSumTransform(fading.bs_irs, fading.irs_ue, n, path_gain_cascade(geom))


def direct_transform(geom: LinkGeometry, fading: FadingConfig) -> ChannelTransform:
    """Direct-link amplitude sqrt(zeta) l^(-alpha/2) Z."""
    return NakagamiAmplitudeTransform(fading.bs_ue, path_gain_direct(geom))


def mgf_T(direct: ChannelTransform, cascade: ChannelTransform, s=None):
    """Transform of T = |h_c| + |h_q|. With ``s`` given, evaluates the
    product; otherwise returns the composite transform object. The geometric
    scale factors live inside the factor transforms (applied exactly once)."""
    composite = ProductTransform((direct, cascade))
    if s is None:
        return composite
    return composite.mgf(s)
