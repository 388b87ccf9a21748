"""Protocol model: parameters, coefficients, channel statistics, SNR forms."""

import math

import numpy as np
import pytest

from helpers import ks_distance, make_params

from twrelay.errors import ParameterError
from twrelay.model import (
    ChannelDraw,
    TargetRates,
    achievable_rates,
    build_params,
    derived_coeffs,
    end_to_end_snrs,
    end_to_end_snrs_exact_beta,
    end_to_end_snrs_vec,
    non_coop_baseline,
    relay_power,
    sample_channel,
)


class TestBuildParams:
    def test_midpoint_geometry(self):
        p = build_params(1, 1, 1, 1, 0.75, 0.5, 0.5, 3)
        assert p.omega1 == pytest.approx(8.0)
        assert p.omega2 == pytest.approx(8.0)

    def test_asymmetric_geometry(self):
        p = build_params(1, 1, 1, 1, 0.75, 0.5, 0.25, 3)
        assert p.omega1 == pytest.approx(64.0)
        assert p.omega2 == pytest.approx(1.0 / 0.75**3)
        assert p.omega2 == pytest.approx(2.3704, abs=1e-4)

    @pytest.mark.parametrize(
        "kwargs, fragment",
        [
            (dict(lam=1.0), "lambda"),
            (dict(lam=0.0), "lambda"),
            (dict(eta=0.0), "eta"),
            (dict(eta=1.5), "eta"),
            (dict(d1=0.0), "d1"),
            (dict(d1=1.0), "d1"),
            (dict(p1=0.0), "p1"),
            (dict(sigma2=-1.0), "sigma2"),
            (dict(epsilon=1.2), "epsilon"),
        ],
    )
    def test_validation_names_the_violated_range(self, kwargs, fragment):
        base = dict(p1=1, p2=1, sigma2=1, eta=1, lam=0.75, epsilon=0.5, d1=0.5,
                    path_loss_exp=3)
        base.update(kwargs)
        with pytest.raises(ParameterError, match=fragment):
            build_params(**base)


class TestDerivedCoeffs:
    def test_reference_point(self):
        p = build_params(1, 1, 1, 1, 0.75, 0.5, 0.5, 3)
        c = derived_coeffs(p)
        assert c.b == pytest.approx(2.5)
        assert c.c == pytest.approx(4.0 / 3.0)

    def test_half_split(self):
        p = build_params(1, 1, 1, 1, 0.5, 0.5, 0.5, 3)
        c = derived_coeffs(p)
        assert c.b == pytest.approx(1.5)
        assert c.c == pytest.approx(2.0)

    def test_zero_conversion_noise_share(self):
        for lam in (0.1, 0.5, 0.9):
            p = build_params(1, 1, 1, 1, lam, 0.0, 0.5, 3)
            assert derived_coeffs(p).b == pytest.approx(1.0)


class TestSampleChannel:
    def test_sample_moments(self):
        params = make_params()
        rng = np.random.default_rng(42)
        g1 = rng.exponential(params.omega1, 1_000_000)
        assert g1.mean() == pytest.approx(params.omega1, rel=0.01)
        assert g1.var() == pytest.approx(params.omega1**2, rel=0.03)

    def test_single_draws_reproducible(self):
        params = make_params()
        d1 = sample_channel(params, np.random.default_rng(7))
        d2 = sample_channel(params, np.random.default_rng(7))
        assert d1 == d2
        assert d1.g1 >= 0 and d1.g2 >= 0

    def test_distribution_ks(self):
        params = make_params(d1=0.3)
        rng = np.random.default_rng(11)
        sample = rng.exponential(params.omega1, 100_000)
        dist = ks_distance(sample, lambda x: 1.0 - math.exp(-x / params.omega1))
        assert dist < 0.01


class TestRelayPower:
    def test_reference_point(self):
        p = build_params(1, 1, 1, 1, 0.75, 0.5, 0.5, 3)
        assert relay_power(p, ChannelDraw(1.0, 1.0)) == pytest.approx(1.5)

    def test_no_received_energy(self):
        p = make_params()
        assert relay_power(p, ChannelDraw(0.0, 0.0)) == 0.0

    def test_linear_in_source_powers(self):
        rng = np.random.default_rng(3)
        base = make_params()
        doubled = make_params(snr_db=20.0 + 10.0 * math.log10(2.0))
        for _ in range(50):
            draw = sample_channel(base, rng)
            assert relay_power(doubled, draw) == pytest.approx(
                2.0 * relay_power(base, draw), rel=1e-12
            )


class TestEndToEndSnrs:
    def test_reference_point(self):
        p = build_params(1, 1, 1, 1, 0.75, 0.5, 0.5, 3)
        g1, g2 = end_to_end_snrs(p, ChannelDraw(1.0, 1.0))
        expect = 1.0 / (2.5 + 4.0 / 3.0)
        assert g1 == pytest.approx(expect, rel=1e-12)
        assert g2 == pytest.approx(expect, rel=1e-12)
        assert g1 == pytest.approx(0.26087, abs=1e-5)

    def test_relay_cannot_beat_first_hop(self):
        # gamma_1 <= P2 g2 / sigma2 and gamma_2 <= P1 g1 / sigma2
        params = make_params(snr_db=10.0)
        rng = np.random.default_rng(5)
        g1 = rng.exponential(params.omega1, 100_000)
        g2 = rng.exponential(params.omega2, 100_000)
        gamma1, gamma2 = end_to_end_snrs_vec(params, g1, g2)
        assert np.all(gamma1 <= params.p2 * g2 / params.sigma2 + 1e-12)
        assert np.all(gamma2 <= params.p1 * g1 / params.sigma2 + 1e-12)

    def test_large_gain_limit(self):
        params = build_params(1, 1, 1, 1, 0.75, 0.5, 0.5, 3)
        coeff = derived_coeffs(params)
        gamma1, _ = end_to_end_snrs(params, ChannelDraw(1e12, 2.0))
        assert gamma1 == pytest.approx(2.0 / coeff.b, rel=1e-6)

    def test_both_forms_agree(self):
        # rational form vs harvest-division form over 1e5 draws
        params = make_params(snr_db=7.0, lam=0.3, d1=0.35)
        rng = np.random.default_rng(17)
        g1 = rng.exponential(params.omega1, 100_000)
        g2 = rng.exponential(params.omega2, 100_000)
        vec1, vec2 = end_to_end_snrs_vec(params, g1, g2)
        noise_amp = 1.0 + params.epsilon * params.lam / (1.0 - params.lam)
        harvest1 = (params.p2 * g2 / params.sigma2) / (
            noise_amp + 1.0 / (params.eta * params.lam * g1)
        )
        harvest2 = (params.p1 * g1 / params.sigma2) / (
            noise_amp + 1.0 / (params.eta * params.lam * g2)
        )
        np.testing.assert_allclose(vec1, harvest1, rtol=1e-12)
        np.testing.assert_allclose(vec2, harvest2, rtol=1e-12)
        # scalar path asserts the identity internally on every call
        for i in range(0, 100_000, 9973):
            s1, s2 = end_to_end_snrs(params, ChannelDraw(g1[i], g2[i]))
            assert s1 == pytest.approx(vec1[i], rel=1e-12)
            assert s2 == pytest.approx(vec2[i], rel=1e-12)

    def test_zero_gains_give_zero_snr(self):
        params = make_params()
        assert end_to_end_snrs(params, ChannelDraw(0.0, 1.0)) == (0.0, 0.0)
        assert end_to_end_snrs(params, ChannelDraw(1.0, 0.0)) == (0.0, 0.0)

    def test_monotone_in_each_gain(self):
        params = make_params()
        rng = np.random.default_rng(23)
        for _ in range(200):
            g1, g2 = rng.exponential(8.0, 2)
            bump = 1.0 + rng.uniform(0.1, 2.0)
            base = end_to_end_snrs(params, ChannelDraw(g1, g2))
            up1 = end_to_end_snrs(params, ChannelDraw(g1 * bump, g2))
            up2 = end_to_end_snrs(params, ChannelDraw(g1, g2 * bump))
            assert up1[0] >= base[0] and up1[1] >= base[1]
            assert up2[0] >= base[0] and up2[1] >= base[1]

    def test_split_ratio_extremes_kill_snr(self):
        draw = ChannelDraw(2.0, 3.0)
        for lam in (1e-9, 1.0 - 1e-12):
            params = make_params(lam=lam)
            gamma1, gamma2 = end_to_end_snrs(params, draw)
            assert gamma1 < 1e-6 and gamma2 < 1e-6

    def test_exact_beta_recovers_canonical_form_at_high_power(self):
        # the dropped noise terms vanish relative to the received power
        params = make_params(snr_db=50.0)
        g1 = np.array([4.0, 9.0])
        g2 = np.array([7.0, 2.0])
        approx = end_to_end_snrs_vec(params, g1, g2)
        exact = end_to_end_snrs_exact_beta(params, g1, g2)
        np.testing.assert_allclose(exact[0], approx[0], rtol=1e-5)
        np.testing.assert_allclose(exact[1], approx[1], rtol=1e-5)


class TestAchievableRates:
    def test_reference_points(self):
        assert achievable_rates(3.0, 3.0) == (1.0, 1.0)
        assert achievable_rates(0.0, 0.0) == (0.0, 0.0)
        assert achievable_rates(15.0, 15.0) == (2.0, 2.0)

    def test_negative_rejected(self):
        with pytest.raises(ParameterError):
            achievable_rates(-1.0, 0.0)


class TestNonCoopBaseline:
    def test_unit_direct_gain(self):
        baseline = non_coop_baseline(make_params())
        assert baseline.omega_direct == 1.0

    def test_outage_closed_form(self):
        # at P/sigma2 = 20 dB, T = 1: 1 - exp(-3/100)
        baseline = non_coop_baseline(make_params(snr_db=20.0))
        targets = TargetRates.from_rates(1.0, 1.0)
        assert baseline.outage(targets) == pytest.approx(
            1.0 - math.exp(-0.03), rel=1e-12
        )
        assert baseline.outage(targets) == pytest.approx(0.02955, abs=1e-5)

    def test_outage_uses_worse_direction(self):
        baseline = non_coop_baseline(make_params(p2_scale=0.25))
        targets = TargetRates.from_rates(1.0, 1.0)
        s2 = baseline.params.sigma2
        need = max(
            s2 * targets.tau1 / baseline.params.p2,
            s2 * targets.tau2 / baseline.params.p1,
        )
        assert baseline.outage(targets) == pytest.approx(1.0 - math.exp(-need))

    def test_capacity_against_direct_simulation(self):
        params = make_params(snr_db=20.0)
        baseline = non_coop_baseline(params)
        rng = np.random.default_rng(31)
        g = rng.exponential(1.0, 1_000_000)
        rho = params.p1 / params.sigma2
        sim = float(np.mean(np.log1p(rho * g))) / math.log(2.0)  # both directions
        se = float(np.std(np.log1p(rho * g))) / math.log(2.0) / math.sqrt(1e6)
        assert baseline.capacity() == pytest.approx(sim, abs=3 * se)


class TestTargetRates:
    def test_threshold_definition_exact(self):
        t = TargetRates.from_rates(1.0, 2.0)
        assert t.tau1 == 2.0 ** (2.0 * 1.0) - 1.0
        assert t.tau2 == 2.0 ** (2.0 * 2.0) - 1.0

    def test_multiplexing_gain_construction(self):
        t = TargetRates.from_multiplexing_gain(0.5, 100.0)
        assert t.tau1 == pytest.approx(101.0**0.5 - 1.0, rel=1e-12)
        assert t.t1 == pytest.approx(0.25 * math.log2(101.0), rel=1e-12)

    def test_invalid_inputs(self):
        with pytest.raises(ParameterError):
            TargetRates.from_rates(-0.5, 1.0)
        with pytest.raises(ParameterError):
            TargetRates.from_multiplexing_gain(0.0, 100.0)
