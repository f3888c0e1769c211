"""Tail noise-level estimate, cost function, selection, full pipeline."""

import math

import numpy as np
import pytest

from hetero_oracle import (
    DesignGrid,
    DomainError,
    EstimateConfig,
    FourierState,
    NoiseSpec,
    VolatilitySpec,
    WeightFamily,
    cost,
    default_rho,
    default_tail_cutoff,
    dft,
    empirical_error,
    estimate,
    generate_sample,
    make_signal,
    penalty,
    select,
    tail_variance,
)


class TestDefaults:
    def test_tail_cutoff_values(self):
        assert default_tail_cutoff(101) == 5
        assert default_tail_cutoff(3) == 2
        assert default_tail_cutoff(27) == 3      # exact cube
        assert default_tail_cutoff(1_000_001) == 101

    def test_cutoff_growth_conditions(self):
        n = 1_000_001
        m = default_tail_cutoff(n)
        assert m / math.sqrt(n) < 0.2
        assert m**2 / math.sqrt(n) > 5.0

    def test_rho_schedule(self):
        assert default_rho(101) == pytest.approx(1.0 / math.log(101.0), rel=1e-15)
        assert default_rho(3) == 0.33 - 1e-6  # clamped below 1/3
        assert 0.0 < default_rho(3) < 1.0 / 3.0


class TestTailVariance:
    def test_noiseless_finite_support_has_no_tail(self):
        grid = DesignGrid(51)
        sig = make_signal("sine")
        sample = generate_sample(sig, VolatilitySpec.constant(1.0),
                                 NoiseSpec.zero(), grid, seed=0)
        theta = dft(sample.y, grid)
        for cutoff in (3, 5, 25):
            assert tail_variance(theta, cutoff) <= 1e-12

    def test_full_cutoff_gives_zero(self):
        assert tail_variance(np.ones(7), 7) == 0.0

    def test_cutoff_out_of_range(self):
        with pytest.raises(DomainError):
            tail_variance(np.ones(7), 0)
        with pytest.raises(DomainError):
            tail_variance(np.ones(7), 8)

    def test_expected_value_under_pure_noise(self):
        """Mean tail energy is (n - cutoff)/n under unit constant volatility."""
        from hetero_oracle import signal_from_coeffs

        grid = DesignGrid(101)
        zero_sig = signal_from_coeffs("null", np.zeros(3), k=1)
        vol = VolatilitySpec.constant(1.0)
        noise = NoiseSpec.gaussian()
        cutoff = default_tail_cutoff(101)
        vals = np.empty(500)
        for rep in range(vals.size):
            sample = generate_sample(zero_sig, vol, noise, grid, seed=100 + rep)
            vals[rep] = tail_variance(dft(sample.y, grid), cutoff)
        target = (101 - cutoff) / 101.0
        se = vals.std(ddof=1) / math.sqrt(vals.size)
        assert abs(vals.mean() - target) <= 3.0 * se


class TestPenalty:
    def test_zero_weights(self):
        assert penalty(np.zeros(5), 1.0, 5) == 0.0

    def test_direct_arithmetic(self):
        w = np.array([2.0, 0.0, 0.0])  # |w|^2 = 4 (raw array bypasses [0,1] check)
        assert penalty(w, 2.0, 100) == pytest.approx(0.08, abs=1e-15)

    def test_unit_weight(self):
        w = np.eye(7)[0]
        assert penalty(w, 0.7, 7) == pytest.approx(0.1, rel=1e-12)

    def test_negative_level_rejected(self):
        with pytest.raises(DomainError):
            penalty(np.ones(3), -1.0, 3)


class TestCost:
    def test_zero_weights_cost_nothing(self):
        state = FourierState.from_coeffs(np.ones(9), rho=0.1)
        assert cost(np.zeros(9), state) == 0.0

    def test_unit_coefficient_unit_weight(self):
        theta = np.eye(9)[0]
        state = FourierState(theta_hat=theta, varsigma_hat=0.0, tail_cutoff=3, rho=0.25)
        assert cost(np.eye(9)[0], state) == pytest.approx(-1.0, abs=1e-15)

    def test_reduction_without_noise_level(self):
        """With a zero noise level the cost is sum w^2 th^2 - 2 sum w th^2."""
        rng = np.random.default_rng(21)
        theta = rng.standard_normal(15)
        w = rng.uniform(0.0, 1.0, 15)
        state = FourierState(theta_hat=theta, varsigma_hat=0.0, tail_cutoff=3, rho=0.2)
        brute = math.fsum(w[j] ** 2 * theta[j] ** 2 for j in range(15)) - 2.0 * math.fsum(
            w[j] * theta[j] ** 2 for j in range(15)
        )
        assert cost(w, state) == pytest.approx(brute, rel=1e-12)

    def test_rho_validation(self):
        with pytest.raises(DomainError):
            FourierState(theta_hat=np.ones(5), varsigma_hat=0.0, tail_cutoff=2, rho=0.4)
        with pytest.raises(DomainError):
            FourierState(theta_hat=np.ones(5), varsigma_hat=0.0, tail_cutoff=2, rho=0.0)


class TestSelect:
    def test_singleton_family(self):
        family = WeightFamily.from_vectors([np.full(7, 0.5)], 7)
        state = FourierState.from_coeffs(np.ones(7), rho=0.1)
        result = select(family, state)
        assert result.index == 0

    def test_all_ones_beats_zero_vector(self):
        family = WeightFamily.from_vectors([np.zeros(7), np.ones(7)], 7)
        theta = np.eye(7)[0]
        state = FourierState(theta_hat=theta, varsigma_hat=0.0, tail_cutoff=2, rho=0.1)
        result = select(family, state)
        assert result.index == 1
        assert result.costs[0] == 0.0
        assert result.costs[1] == pytest.approx(-1.0, abs=1e-15)

    def test_tie_broken_by_family_order(self):
        """Members identical on the active coefficient tie; first one wins."""
        v1 = np.zeros(7); v1[0] = 1.0
        v2 = np.zeros(7); v2[0] = 1.0; v2[3] = 0.5
        v3 = np.zeros(7); v3[0] = 1.0; v3[5] = 0.9
        family = WeightFamily.from_vectors([v1, v2, v3], 7)
        theta = np.eye(7)[0]
        state = FourierState(theta_hat=theta, varsigma_hat=0.0, tail_cutoff=2, rho=0.1)
        result = select(family, state)
        assert np.allclose(result.costs, -1.0)
        assert result.index == 0

    def test_estimate_coeffs_are_shrunk_observations(self):
        family = WeightFamily.from_vectors([np.full(7, 0.5)], 7)
        theta = np.arange(7, dtype=float)
        state = FourierState.from_coeffs(theta, rho=0.1)
        result = select(family, state)
        np.testing.assert_allclose(result.estimate_coeffs, 0.5 * theta)


class TestEstimatePipeline:
    def test_noiseless_constant_recovery(self):
        grid = DesignGrid(101)
        sig = make_signal("constant", value=3.0)
        sample = generate_sample(sig, VolatilitySpec.constant(1.0),
                                 NoiseSpec.zero(), grid, seed=0)
        result, predict = estimate(sample)
        assert result.chosen.coeffs[0] == 1.0
        np.testing.assert_allclose(predict(grid.points), 3.0, atol=1e-10)

    def test_known_variance_mode_uses_truth(self):
        grid = DesignGrid(101)
        sig = make_signal("sine")
        sample = generate_sample(sig, VolatilitySpec.budget(1.0, 1.0, 1.0),
                                 NoiseSpec.gaussian(), grid, seed=7)
        # same draw, two modes: only the noise-level plug-in differs
        res_est, _ = estimate(sample, EstimateConfig())
        res_known, _ = estimate(sample, EstimateConfig(known_variance=True))
        assert res_est.costs.shape == res_known.costs.shape
        theta = dft(sample.y, grid)
        # brute-force recomputation of the known-mode cost for the chosen member
        w = res_known.chosen.coeffs
        vs = sample.noise_variance_mean
        rho = default_rho(101)
        brute = (
            float(w**2 @ theta**2)
            - 2.0 * float(w @ (theta**2 - vs / 101.0))
            + rho * float(w @ w) * vs / 101.0
        )
        assert res_known.costs[res_known.index] == pytest.approx(brute, rel=1e-12)

    def test_cost_differences_match_brute_force_in_known_mode(self):
        """Pipeline costs equal one-member-at-a-time recomputation exactly."""
        from hetero_oracle import build_sieve, pinsker_family

        grid = DesignGrid(51)
        sig = make_signal("sine")
        sample = generate_sample(sig, VolatilitySpec.constant(1.0),
                                 NoiseSpec.gaussian(), grid, seed=3)
        res, _ = estimate(sample, EstimateConfig(known_variance=True))
        theta = dft(sample.y, grid)
        vs = sample.noise_variance_mean
        state = FourierState(theta_hat=theta, varsigma_hat=vs,
                             tail_cutoff=default_tail_cutoff(51), rho=default_rho(51),
                             known_variance=vs)
        family = pinsker_family(51, build_sieve(51))
        brute = np.array([cost(w, state) for w in family.members])
        np.testing.assert_allclose(res.costs, brute, rtol=1e-12, atol=1e-12)
        for a in range(0, family.nu, 7):
            for b in range(0, family.nu, 11):
                assert res.costs[a] - res.costs[b] == pytest.approx(
                    brute[a] - brute[b], abs=1e-10
                )

    def test_rho_out_of_range_rejected(self):
        grid = DesignGrid(51)
        sample = generate_sample(make_signal("sine"), VolatilitySpec.constant(1.0),
                                 NoiseSpec.gaussian(), grid, seed=3)
        with pytest.raises(DomainError):
            estimate(sample, EstimateConfig(rho=0.34))

    def test_even_sample_size_rejected_at_grid(self):
        with pytest.raises(DomainError):
            DesignGrid(100)

    def test_cutoff_override_warns_outside_range(self):
        grid = DesignGrid(101)
        sample = generate_sample(make_signal("sine"), VolatilitySpec.constant(1.0),
                                 NoiseSpec.gaussian(), grid, seed=3)
        with pytest.warns(UserWarning):
            estimate(sample, EstimateConfig(tail_cutoff=50))

    def test_error_identity_on_random_fixtures(self):
        """Expansion form of the risk equals the direct design-grid norm."""
        grid = DesignGrid(101)
        from hetero_oracle import basis_matrix
        mat = basis_matrix(grid)
        rng = np.random.default_rng(77)
        for _ in range(10):
            theta_hat = rng.standard_normal(101)
            theta_true = rng.standard_normal(101)
            w = rng.uniform(0.0, 1.0, 101)
            direct = np.mean((mat @ (w * theta_hat) - mat @ theta_true) ** 2)
            assert empirical_error(w, theta_hat, theta_true) == pytest.approx(
                direct, abs=1e-9
            )

    def test_adding_all_ones_never_hurts_noiseless_fit(self):
        grid = DesignGrid(101)
        sig = make_signal("sine")
        sample = generate_sample(sig, VolatilitySpec.constant(1.0),
                                 NoiseSpec.zero(), grid, seed=0)
        theta = dft(sample.y, grid)
        theta_true = dft(sig(grid.points), grid)
        res_plain, _ = estimate(sample, EstimateConfig())
        res_ones, _ = estimate(sample, EstimateConfig(include_all_ones=True))
        err_plain = empirical_error(res_plain.chosen.coeffs, theta, theta_true)
        err_ones = empirical_error(res_ones.chosen.coeffs, theta, theta_true)
        assert err_ones <= err_plain + 1e-15
        assert err_ones == pytest.approx(0.0, abs=1e-12)
