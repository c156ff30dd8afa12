import math

import numpy as np
import pytest

from irscov.coverage import (
    CoverageResult,
    Scenario,
    channel_hardening_kappa,
    coverage,
    coverage_combined,
    coverage_direct,
    coverage_irs_only,
    hardening_condition,
    irs_coverage_range,
    outage_irs_only,
)
from irscov.model import (
    FadingConfig,
    NakagamiParams,
    SystemParams,
    bs_ue_distance,
    cascade_mean_var,
)

NOISE = 10 ** (-11.4)


def make_scenario(geom, m=0.5, n=500, theta_db=5.0, mode="combined",
                  regime="asymptotic_clt", power=2.5):
    sys = SystemParams(power, NOISE, n, 10 ** (theta_db / 10.0))
    return Scenario(geom, FadingConfig.iid(m), sys, mode, regime)


class TestDirect:
    def test_rayleigh_closed_form(self, ref_geometry):
        sc = make_scenario(ref_geometry, m=1.0, mode="direct_only")
        l = bs_ue_distance(ref_geometry)
        want = math.exp(-sc.sys.theta * NOISE * l**4 / (2.5 * 1.0))
        assert coverage_direct(sc).probability == pytest.approx(want, rel=1e-12)

    def test_threshold_to_infinity(self, ref_geometry):
        sc = make_scenario(ref_geometry, m=0.5, theta_db=120.0, mode="direct_only")
        assert coverage_direct(sc).probability < 1e-12

    def test_matches_sampling(self, ref_geometry):
        from irscov.montecarlo import SimConfig, simulate_coverage
        sc = make_scenario(ref_geometry, m=0.5, mode="direct_only")
        est = simulate_coverage(sc, SimConfig(samples=100_000, seed=5))
        assert coverage_direct(sc).probability == pytest.approx(
            est.coverage, abs=max(0.01, 3 * est.std_error))

    def test_regime_ignored(self, ref_geometry):
        a = coverage(make_scenario(ref_geometry, mode="direct_only", regime="asymptotic_clt"))
        b = coverage(make_scenario(ref_geometry, mode="direct_only", regime="finite_inid"))
        assert a.probability == b.probability


class TestIrsOnly:
    def test_strong_channel_no_outage(self, ref_geometry):
        sc = make_scenario(ref_geometry.with_distance(5.0), n=500, mode="irs_only")
        assert outage_irs_only(sc).probability < 1e-9

    def test_far_user_total_outage(self, ref_geometry):
        sc = make_scenario(ref_geometry.with_distance(5000.0), n=500, mode="irs_only")
        assert outage_irs_only(sc).probability > 1.0 - 1e-9

    def test_coverage_is_complement(self, ref_geometry):
        sc = make_scenario(ref_geometry.with_distance(30.0), mode="irs_only")
        assert coverage_irs_only(sc).probability == pytest.approx(
            1.0 - outage_irs_only(sc).probability, abs=1e-15)

    def test_requires_clt_regime(self, ref_geometry):
        sc = make_scenario(ref_geometry, mode="irs_only", regime="finite_iid")
        with pytest.raises(ValueError):
            outage_irs_only(sc)

    def test_no_elements_means_outage(self, ref_geometry):
        sc = make_scenario(ref_geometry, n=0, mode="irs_only")
        assert outage_irs_only(sc).probability == 1.0

    def test_matches_sampling_near_transition(self, ref_geometry):
        from irscov.montecarlo import SimConfig, simulate_coverage
        # d chosen where coverage ~ 0.8: CLT skew bias well below the gate
        sc = make_scenario(ref_geometry.with_distance(23.0), mode="irs_only")
        est = simulate_coverage(sc, SimConfig(samples=200_000, seed=17))
        assert coverage_irs_only(sc).probability == pytest.approx(
            est.coverage, abs=max(0.01, 3 * est.std_error))


class TestCombined:
    def test_no_elements_reduces_to_direct(self, ref_geometry):
        for regime in ("asymptotic_clt", "finite_iid", "finite_inid"):
            sc = make_scenario(ref_geometry, n=0, regime=regime)
            got = coverage_combined(sc).probability
            assert got == pytest.approx(coverage_direct(sc).probability, abs=1e-6)

    def test_threshold_to_zero(self, ref_geometry):
        sc = make_scenario(ref_geometry, theta_db=-120.0)
        assert coverage_combined(sc).probability > 1.0 - 1e-6

    def test_m_ordering_at_reference_threshold(self, ref_geometry):
        covs = [coverage_combined(make_scenario(ref_geometry, m=m)).probability
                for m in (0.5, 1.0, 2.0)]
        assert covs[2] >= covs[1] >= covs[0]

    def test_never_worse_than_either_link(self, ref_geometry):
        for m in (0.5, 1.0, 2.0):
            for theta_db in (-5.0, 5.0, 15.0):
                sc = make_scenario(ref_geometry, m=m, theta_db=theta_db)
                comb = coverage_combined(sc).probability
                direct = coverage_direct(sc).probability
                irs = coverage_irs_only(replace_mode(sc, "irs_only")).probability
                assert comb >= max(direct, irs) - 2e-6

    def test_monotone_in_threshold(self, ref_geometry):
        vals = [coverage_combined(make_scenario(ref_geometry, theta_db=th)).probability
                for th in np.linspace(-10, 30, 17)]
        assert all(b <= a + 2e-6 for a, b in zip(vals, vals[1:]))

    def test_monotone_in_elements(self, ref_geometry):
        geom = ref_geometry.with_distance(40.0)
        vals = [coverage_combined(make_scenario(geom, n=n)).probability
                for n in (0, 10, 100, 500)]
        assert all(b >= a - 2e-6 for a, b in zip(vals, vals[1:]))

    def test_finite_regimes_close_to_clt_at_large_n(self, ref_geometry):
        geom = ref_geometry.with_distance(50.0)
        clt = coverage_combined(make_scenario(geom, n=500)).probability
        exact = coverage_combined(make_scenario(geom, n=500, regime="finite_inid")).probability
        assert exact == pytest.approx(clt, abs=0.01)

    def test_clt_floor_warning(self, ref_geometry):
        sc = make_scenario(ref_geometry, n=10, regime="asymptotic_clt")
        res = coverage_combined(sc)
        assert any("N=10" in d for d in res.diagnostics)

    def test_matches_sampling_finite_regime(self, ref_geometry):
        from irscov.montecarlo import SimConfig, simulate_coverage
        geom = ref_geometry.with_distance(50.0)
        sc = make_scenario(geom, n=10, regime="finite_inid")
        est = simulate_coverage(sc, SimConfig(samples=100_000, seed=23))
        assert coverage_combined(sc).probability == pytest.approx(
            est.coverage, abs=max(0.01, 3 * est.std_error))


def replace_mode(sc: Scenario, mode: str) -> Scenario:
    return Scenario(sc.geom, sc.fading, sc.sys, mode, sc.regime)


class TestKappa:
    def test_reference_constants(self):
        for n in (10, 100, 500, 1000):
            assert channel_hardening_kappa(n, 1.0) == pytest.approx(
                math.sqrt(n / 0.621), rel=5e-4)
            assert channel_hardening_kappa(n, 0.5) == pytest.approx(
                math.sqrt(n / 1.4674), rel=5e-4)

    def test_value_n100(self):
        assert channel_hardening_kappa(100, 1.0) == pytest.approx(12.688363802786084, rel=1e-12)

    def test_matches_moment_route(self):
        for m in (0.5, 1.0, 2.0, 4.0):
            mu, var = cascade_mean_var(NakagamiParams(m), NakagamiParams(m))
            assert channel_hardening_kappa(37, m) == pytest.approx(
                math.sqrt(37) * mu / math.sqrt(var), rel=1e-12)

    def test_monotone_in_n_and_m(self):
        ks_n = [channel_hardening_kappa(n, 1.0) for n in (1, 10, 100, 1000)]
        assert all(b > a for a, b in zip(ks_n, ks_n[1:]))
        ks_m = [channel_hardening_kappa(64, m) for m in (0.5, 1.0, 2.0, 4.0)]
        assert all(b > a for a, b in zip(ks_m, ks_m[1:]))

    def test_exact_sqrt_n_law(self):
        base = channel_hardening_kappa(1, 2.0)
        assert channel_hardening_kappa(49, 2.0) == pytest.approx(7.0 * base, rel=1e-12)

    def test_omega_cancels(self):
        a = channel_hardening_kappa(10, fading=FadingConfig.iid(1.0, 1.0))
        b = channel_hardening_kappa(10, fading=FadingConfig.iid(1.0, 7.3))
        assert a == pytest.approx(b, rel=1e-12)

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            channel_hardening_kappa(0, 1.0)
        with pytest.raises(ValueError):
            channel_hardening_kappa(10)
        with pytest.raises(ValueError):
            channel_hardening_kappa(10, 1.0, FadingConfig.iid(1.0))


class _HeavyTailParams:
    """Synthetic amplitude moments engineered so sqrt(N) E[Y]/sd(Y) < 0.5;
    unreachable with valid Nakagami shapes (minimum 0.8255 at m = 1/2, N = 1)
    but exercises the validity flag."""

    m = 0.5
    omega = 1.0

    def amplitude_moment(self, b: float) -> float:
        return {0.0: 1.0, 1.0: 0.1, 2.0: 1.0, 3.0: 10.0}.get(b, 1.0)


class TestIrsRange:
    def test_outage_saturates_at_range(self, ref_geometry):
        sc = make_scenario(ref_geometry, mode="irs_only")
        rr = irs_coverage_range(sc)
        assert rr.outage_at_range >= 0.99
        assert rr.condition_ok

    def test_monotone_outage_beyond_range(self, ref_geometry):
        sc = make_scenario(ref_geometry, mode="irs_only")
        rr = irs_coverage_range(sc)
        ds = np.linspace(rr.d_star, 3.0 * rr.d_star, 25)
        outs = [outage_irs_only(make_scenario(ref_geometry.with_distance(float(d)),
                                              mode="irs_only")).probability
                for d in ds]
        assert all(b >= a - 1e-12 for a, b in zip(outs, outs[1:]))

    def test_power_scaling_law(self, ref_geometry):
        sc1 = make_scenario(ref_geometry, mode="irs_only", power=2.5)
        sc2 = make_scenario(ref_geometry, mode="irs_only", power=5.0)
        r1 = irs_coverage_range(sc1).d_star
        r2 = irs_coverage_range(sc2).d_star
        assert r2 / r1 == pytest.approx(2.0 ** (1.0 / 4.0), rel=1e-12)

    def test_element_scaling_law(self, ref_geometry):
        r1 = irs_coverage_range(make_scenario(ref_geometry, n=250, mode="irs_only")).d_star
        r2 = irs_coverage_range(make_scenario(ref_geometry, n=500, mode="irs_only")).d_star
        assert r2 / r1 == pytest.approx(2.0 ** (2.0 / 4.0), rel=1e-12)

    def test_alternate_constant_ratio(self, ref_geometry):
        sc = make_scenario(ref_geometry, mode="irs_only")
        base = irs_coverage_range(sc).d_star
        alt = irs_coverage_range(sc, use_alternate_constant=True).d_star
        assert base / alt == pytest.approx(2.0 ** (3.0 / 4.0), rel=1e-12)

    def test_condition_value_reported(self, ref_geometry):
        sc = make_scenario(ref_geometry, mode="irs_only")
        rr = irs_coverage_range(sc)
        mu, var = cascade_mean_var(NakagamiParams(0.5), NakagamiParams(0.5))
        assert rr.condition_value == pytest.approx(math.sqrt(500) * mu / math.sqrt(var), rel=1e-12)

    def test_validity_flag_fires_on_heavy_tail(self, ref_geometry):
        fading = FadingConfig(_HeavyTailParams(), _HeavyTailParams(), NakagamiParams(0.5))
        sys = SystemParams(2.5, NOISE, 1, 10 ** 0.5)
        sc = Scenario(ref_geometry, fading, sys, "irs_only", "asymptotic_clt")
        rr = irs_coverage_range(sc)
        assert rr.condition_value < 0.5
        assert not rr.condition_ok
        assert any("validity" in d for d in rr.diagnostics)

    def test_condition_unreachable_with_valid_params(self):
        # documents why the synthetic route above is needed
        assert hardening_condition(1, NakagamiParams(0.5), NakagamiParams(0.5)) \
            == pytest.approx(0.8255, abs=1e-4)

    def test_requires_elements_and_regime(self, ref_geometry):
        with pytest.raises(ValueError):
            irs_coverage_range(make_scenario(ref_geometry, n=0, mode="irs_only"))
        with pytest.raises(ValueError):
            irs_coverage_range(make_scenario(ref_geometry, mode="irs_only",
                                             regime="finite_iid"))


class TestScenarioValidation:
    def test_bad_mode(self, ref_geometry):
        with pytest.raises(ValueError):
            make_scenario(ref_geometry, mode="sideways")

    def test_bad_regime(self, ref_geometry):
        with pytest.raises(ValueError):
            make_scenario(ref_geometry, regime="quantum")

    def test_result_invariants(self):
        with pytest.raises(ValueError):
            CoverageResult(1.5, 0.0)
        with pytest.raises(ValueError):
            CoverageResult(0.5, -1.0)

    def test_gamma_regime_needs_identical_hops(self, ref_geometry):
        fading = FadingConfig(NakagamiParams(1.0), NakagamiParams(2.0), NakagamiParams(1.0))
        sys = SystemParams(2.5, NOISE, 10, 10 ** 0.5)
        sc = Scenario(ref_geometry, fading, sys, "combined", "finite_iid")
        with pytest.raises(ValueError):
            coverage_combined(sc)
