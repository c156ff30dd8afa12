import math

import numpy as np
import pytest

from irscov.model import (
    FadingConfig,
    LinkGeometry,
    NakagamiParams,
    SystemParams,
    amplitude_threshold,
    bs_ue_distance,
    cascade_mean_var,
    double_nakagami_moment,
    noise_variance_w,
    path_gain_cascade,
    path_gain_direct,
    zeta_from_carrier,
)


def geom(r, d, psi_deg, alpha=4.0, zeta=1.0):
    return LinkGeometry(r, d, math.radians(psi_deg), alpha, zeta=zeta)


class TestBsUeDistance:
    def test_pythagorean(self):
        assert bs_ue_distance(geom(3, 4, 90)) == pytest.approx(5.0, abs=1e-12)

    def test_collinear(self):
        assert bs_ue_distance(geom(500, 100, 0)) == pytest.approx(400.0, abs=1e-9)

    def test_reference_geometry(self):
        # direct evaluation of sqrt(r^2 + d^2 - 2 r d cos(psi)) at the
        # reference parameters (the quoted figure of ~500 m checks out)
        assert bs_ue_distance(geom(500, 100, 85)) == pytest.approx(501.2827802001922, rel=1e-12)

    def test_triangle_bounds_grid(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            r = 10 ** rng.uniform(0, 3)
            d = 10 ** rng.uniform(0, 3)
            psi = rng.uniform(0.0, math.pi)
            l = bs_ue_distance(geom(r, d, math.degrees(psi)))
            assert abs(r - d) - 1e-9 <= l <= r + d + 1e-9


class TestDoubleNakagamiMoment:
    def test_zeroth(self):
        p = NakagamiParams(1.7, 2.3)
        assert double_nakagami_moment(0.0, p, p) == pytest.approx(1.0, abs=1e-14)

    def test_second_rayleigh(self):
        p = NakagamiParams(1.0, 1.0)
        assert double_nakagami_moment(2.0, p, p) == pytest.approx(1.0, abs=1e-14)

    def test_first_rayleigh(self):
        p = NakagamiParams(1.0, 1.0)
        assert double_nakagami_moment(1.0, p, p) == pytest.approx(math.pi / 4.0, rel=1e-14)

    @pytest.mark.parametrize("b", [1.0, 2.0, 3.0])
    @pytest.mark.parametrize("m,omega", [(0.5, 1.0), (1.0, 0.5), (2.7, 2.0)])
    def test_against_sampled_moments(self, b, m, omega):
        # empirical b-th moment of the product of two sampled amplitudes
        rng = np.random.default_rng(hash((b, m, omega)) % 2**32)
        n = 1_000_000
        y = (np.sqrt(rng.gamma(m, omega / m, n)) * np.sqrt(rng.gamma(m, omega / m, n))) ** b
        se = y.std(ddof=1) / math.sqrt(n)
        assert double_nakagami_moment(b, NakagamiParams(m, omega), NakagamiParams(m, omega)) \
            == pytest.approx(y.mean(), abs=3.0 * se)

    def test_overflow_signalled(self):
        p = NakagamiParams(0.5, 1e6)
        with pytest.raises(OverflowError):
            double_nakagami_moment(800.0, p, p)


class TestCascadeMeanVar:
    def test_rayleigh_values(self):
        m, v = cascade_mean_var(NakagamiParams(1.0), NakagamiParams(1.0))
        assert m == pytest.approx(math.pi / 4.0, rel=1e-14)
        assert v == pytest.approx(1.0 - math.pi**2 / 16.0, rel=1e-13)

    def test_half_shape_values(self):
        # oracle: E[Y] = (Gamma(1)/Gamma(.5))^2 * 2 = 2/pi, var = 1 - 4/pi^2
        m, v = cascade_mean_var(NakagamiParams(0.5), NakagamiParams(0.5))
        assert m == pytest.approx(2.0 / math.pi, rel=1e-13)
        assert v == pytest.approx(1.0 - 4.0 / math.pi**2, rel=1e-13)

    def test_half_shape_against_sampling(self):
        rng = np.random.default_rng(11)
        n = 2_000_000
        y = np.sqrt(rng.gamma(0.5, 2.0, n)) * np.sqrt(rng.gamma(0.5, 2.0, n))
        mean, var = cascade_mean_var(NakagamiParams(0.5), NakagamiParams(0.5))
        assert mean == pytest.approx(y.mean(), abs=3 * y.std() / math.sqrt(n))
        assert var == pytest.approx(y.var(ddof=1), rel=0.01)

    def test_variance_decreasing_in_shape(self):
        vs = [cascade_mean_var(NakagamiParams(m), NakagamiParams(m))[1]
              for m in (0.5, 1.0, 2.0, 4.0, 8.0)]
        assert all(b < a for a, b in zip(vs, vs[1:]))
        assert all(v > 0 for v in vs)

    def test_vanishes_for_large_shape(self):
        _, v = cascade_mean_var(NakagamiParams(5e4), NakagamiParams(5e4))
        assert v < 1e-4


class TestPathGains:
    def test_unit_geometry(self):
        assert path_gain_cascade(geom(1, 1, 90)) == pytest.approx(1.0)

    def test_power_law(self):
        assert path_gain_cascade(geom(10, 10, 90, alpha=4.0)) == pytest.approx(1e-4, rel=1e-12)

    def test_reference_value(self):
        g = geom(500, 100, 85)
        assert path_gain_cascade(g) == pytest.approx(4.0e-10, rel=1e-12)
        assert path_gain_direct(g) == pytest.approx(
            bs_ue_distance(g) ** -2.0, rel=1e-12)
        assert path_gain_cascade(g) > 0


class TestValidation:
    def test_shape_floor(self):
        with pytest.raises(ValueError):
            NakagamiParams(0.3, 1.0)

    def test_positive_power(self):
        with pytest.raises(ValueError):
            NakagamiParams(1.0, 0.0)

    def test_alpha_floor(self):
        with pytest.raises(ValueError):
            LinkGeometry(1.0, 1.0, 0.0, alpha=1.5, zeta=1.0)

    def test_zeta_range(self):
        with pytest.raises(ValueError):
            LinkGeometry(1.0, 1.0, 0.0, zeta=1.5)
        with pytest.raises(ValueError):
            LinkGeometry(1.0, 1.0, 0.0, zeta=0.0)

    def test_zeta_or_carrier_required(self):
        with pytest.raises(ValueError):
            LinkGeometry(1.0, 1.0, 0.0)

    def test_zeta_carrier_consistency(self):
        f = 3e9
        LinkGeometry(1.0, 1.0, 0.0, zeta=zeta_from_carrier(f), carrier_hz=f)
        with pytest.raises(ValueError):
            LinkGeometry(1.0, 1.0, 0.0, zeta=0.5, carrier_hz=f)

    def test_carrier_derives_zeta(self):
        g = LinkGeometry(1.0, 1.0, 0.0, carrier_hz=3e9)
        assert g.zeta == pytest.approx(6.3246e-5, rel=1e-3)

    def test_system_invariants(self):
        with pytest.raises(ValueError):
            SystemParams(0.0, 1e-12, 10, 1.0)
        with pytest.raises(ValueError):
            SystemParams(1.0, 1e-12, -1, 1.0)


def test_noise_reference_value():
    # -174 dBm/Hz + 80 dB + 10 dB = -84 dBm
    assert noise_variance_w() == pytest.approx(10 ** (-11.4), rel=1e-12)


def test_amplitude_threshold():
    s = SystemParams(2.5, 10 ** (-11.4), 500, 10 ** 0.5)
    assert amplitude_threshold(s) == pytest.approx(
        math.sqrt(10 ** 0.5 * 10 ** (-11.4) / 2.5), rel=1e-14)


def test_iid_fading_shortcut():
    f = FadingConfig.iid(2.0, 3.0)
    assert f.bs_irs == f.irs_ue == f.bs_ue == NakagamiParams(2.0, 3.0)
