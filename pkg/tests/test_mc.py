"""Monte Carlo estimators: correctness, determinism, and error scaling."""

import math

import numpy as np
import pytest

from helpers import make_params

from twrelay import analytic
from twrelay.errors import InsufficientSamplesError, ParameterError
from twrelay.mc import (
    CHUNK_DRAWS,
    empirical_cdf_z,
    estimate_capacity,
    estimate_diversity_fd,
    estimate_outage,
    estimate_rates,
)
from twrelay.model import TargetRates

# Enough samples to span several chunks so the ordered reduction is exercised.
N_MULTI_CHUNK = 3 * CHUNK_DRAWS + 1234


class TestEstimateOutage:
    def test_zero_targets_never_outage(self):
        est = estimate_outage(
            make_params(), TargetRates.from_rates(0.0, 0.0), 10_000, seed=1
        )
        assert est.mean == 0.0

    def test_huge_targets_always_outage(self):
        est = estimate_outage(
            make_params(), TargetRates.from_rates(25.0, 25.0), 10_000, seed=1
        )
        assert est.mean == 1.0

    def test_matches_closed_form(self):
        params = make_params()
        targets = TargetRates.from_rates(1.0, 1.0)
        est = estimate_outage(params, targets, 1_000_000, seed=2024)
        exact = analytic.outage_exact(params, targets, "quadrature")
        assert abs(est.mean - exact) <= 3.0 * est.std_err

    def test_worker_count_invariance(self):
        params = make_params(snr_db=10.0)
        targets = TargetRates.from_rates(1.0, 1.0)
        results = [
            estimate_outage(params, targets, N_MULTI_CHUNK, seed=9, workers=w)
            for w in (1, 2, 8)
        ]
        assert results[0] == results[1] == results[2]

    def test_exact_beta_mode_runs_and_stays_in_range(self):
        params = make_params(snr_db=10.0)
        targets = TargetRates.from_rates(1.0, 1.0)
        approx = estimate_outage(params, targets, 100_000, seed=5)
        exact = estimate_outage(params, targets, 100_000, seed=5, exact_beta=True)
        assert 0.0 <= exact.mean <= 1.0
        # keeping the dropped noise terms can only degrade the SNR
        assert exact.mean >= approx.mean


class TestEstimateCapacity:
    def test_starved_relay_has_no_rate(self):
        est = estimate_capacity(make_params(lam=1e-6), 50_000, seed=3)
        assert est.mean < 1e-2

    def test_symmetric_setup_balances_directions(self):
        r1, r2 = estimate_rates(make_params(), 1_000_000, seed=4)
        assert abs(r1.mean - r2.mean) <= 3.0 * math.hypot(r1.std_err, r2.std_err)

    def test_matches_quadrature(self):
        params = make_params(lam=0.5)
        est = estimate_capacity(params, 1_000_000, seed=6)
        assert abs(est.mean - analytic.capacity_quadrature(params)) <= 3.0 * est.std_err

    def test_worker_count_invariance(self):
        params = make_params()
        results = [
            estimate_capacity(params, N_MULTI_CHUNK, seed=8, workers=w)
            for w in (1, 2, 8)
        ]
        assert results[0] == results[1] == results[2]


class TestEmpiricalCdfZ:
    def test_zero_point(self):
        rows = empirical_cdf_z(1.0, 2.5, 4.0 / 3.0, 8.0, 8.0, [0.0, 1.0], 10_000, seed=1)
        assert rows[0] == (0.0, 0.0)

    def test_matches_closed_form(self):
        a, b, c, om1, om2 = 100.0, 2.5, 4.0 / 3.0, 8.0, 8.0
        grid = list(np.linspace(0.0, 4000.0, 80))
        rows = empirical_cdf_z(a, b, c, om1, om2, grid, 1_000_000, seed=12)
        worst = max(
            abs(f_hat - analytic.cdf_z(z, a, b, c, om1, om2)) for z, f_hat in rows
        )
        assert worst < 0.005

    def test_no_amplification_noise_reduction(self):
        # b = 0 collapses Z to a*X*Y/c with a pure-Bessel CDF
        a, c, om1, om2 = 10.0, 2.0, 4.0, 2.0
        grid = list(np.linspace(0.0, 300.0, 50))
        rows = empirical_cdf_z(a, 0.0, c, om1, om2, grid, 400_000, seed=13)
        worst = max(
            abs(f_hat - analytic.cdf_z(z, a, 0.0, c, om1, om2)) for z, f_hat in rows
        )
        assert worst < 0.005

    def test_nondecreasing(self):
        grid = list(np.linspace(0.0, 500.0, 64))
        rows = empirical_cdf_z(50.0, 1.5, 2.0, 8.0, 8.0, grid, 200_000, seed=14)
        values = [f for _, f in rows]
        assert all(a <= b for a, b in zip(values, values[1:]))
        assert values[-1] <= 1.0

    def test_worker_count_invariance(self):
        grid = list(np.linspace(0.0, 400.0, 32))
        results = [
            empirical_cdf_z(
                50.0, 1.5, 2.0, 8.0, 8.0, grid, N_MULTI_CHUNK, seed=15, workers=w
            )
            for w in (1, 2, 8)
        ]
        assert results[0] == results[1] == results[2]


class TestEstimateDiversityFd:
    def test_degenerate_threshold_rejected(self):
        with pytest.raises(ParameterError):
            estimate_diversity_fd(make_params(), 0.0, 20.0, n=10_000, seed=1)

    def test_matches_closed_form_within_combined_error(self):
        params = make_params()
        est = estimate_diversity_fd(params, 0.5, 20.0, n=1_000_000, seed=3)
        formula = analytic.dmt(0.5, 100.0, params)
        assert abs(est.mean - formula) <= 3.0 * est.std_err

    def test_std_err_follows_sqrt_n_law(self):
        # doubling n scales the underlying standard errors by 1/sqrt(2)
        params = make_params(snr_db=10.0)
        targets = TargetRates.from_rates(1.0, 1.0)
        small = estimate_outage(params, targets, 400_000, seed=21)
        large = estimate_outage(params, targets, 800_000, seed=21)
        ratio = large.std_err / small.std_err
        assert ratio == pytest.approx(1.0 / math.sqrt(2.0), rel=0.10)

    def test_too_few_events_rejected(self):
        with pytest.raises(InsufficientSamplesError):
            estimate_diversity_fd(make_params(), 0.05, 20.0, n=2_000, seed=1)


class TestDeterminismContract:
    def test_rerun_bit_identical(self):
        params = make_params()
        targets = TargetRates.from_rates(1.0, 1.0)
        a = estimate_outage(params, targets, N_MULTI_CHUNK, seed=99)
        b = estimate_outage(params, targets, N_MULTI_CHUNK, seed=99)
        assert a == b

    def test_different_seeds_differ(self):
        params = make_params()
        targets = TargetRates.from_rates(1.0, 1.0)
        a = estimate_outage(params, targets, 100_000, seed=1)
        b = estimate_outage(params, targets, 100_000, seed=2)
        assert a.mean != b.mean
