"""Numerical verifiers for the supporting inequalities."""

import math

import numpy as np
import pytest

from hetero_oracle import (
    DesignGrid,
    DomainError,
    NoiseSpec,
    Scenario,
    SignalSpec,
    UnsupportedSignalError,
    VolatilitySpec,
    WeightFamily,
    check_centered_sums,
    check_penalty_dominance,
    check_projection_variance,
    check_tail_energy,
    check_variance_estimator_error,
    make_signal,
    noise_coeff_variance,
    signal_from_coeffs,
)
from hetero_oracle.signals import generate_sample, volatility_values


class TestNoiseCoeffVariance:
    def test_first_entry_is_design_average(self):
        grid = DesignGrid(51)
        sig = make_signal("sine")
        sigma_sq = volatility_values(VolatilitySpec.budget(1.0, 1.0, 1.0), sig, grid)
        per_coeff = noise_coeff_variance(sigma_sq, grid)
        assert per_coeff[0] == pytest.approx(float(np.mean(sigma_sq)), rel=1e-14)

    def test_entries_bounded_by_twice_the_peak(self):
        grid = DesignGrid(51)
        sig = make_signal("sine")
        sigma_sq = volatility_values(VolatilitySpec.budget(1.0, 1.0, 1.0), sig, grid)
        per_coeff = noise_coeff_variance(sigma_sq, grid)
        assert (per_coeff > 0).all()
        assert per_coeff.max() <= 2.0 * sigma_sq.max() + 1e-12

    def test_deviation_bounded_by_peak(self):
        """|per-coefficient - average| <= sigma* since |phi^2 - 1| <= 1."""
        grid = DesignGrid(101)
        sig = make_signal("trigpoly")
        sigma_sq = volatility_values(VolatilitySpec.budget(1.0, 2.0, 0.5), sig, grid)
        per_coeff = noise_coeff_variance(sigma_sq, grid)
        mean = float(np.mean(sigma_sq))
        peak = float(sigma_sq.max())
        assert np.abs(per_coeff - mean).max() <= peak + 1e-12


class TestCenteredSums:
    def test_adjacent_pair_cancels(self):
        rows = {r.case: r for r in check_centered_sums(3, (0,), 10_000)}
        assert rows["N=3,m=0"].lhs == pytest.approx(0.0, abs=1e-9)

    def test_single_cosine_reaches_one(self):
        rows = {r.case: r for r in check_centered_sums(3, (0,), 10_000)}
        assert rows["N=2,m=0"].lhs == pytest.approx(1.0, abs=1e-6)

    def test_small_sweep_passes(self):
        rows = check_centered_sums(50, (0, 1, 2), 10_000)
        assert all(r.passed for r in rows)

    def test_grid_floor_enforced(self):
        with pytest.raises(DomainError):
            check_centered_sums(50, (0,), 5000)


class TestTailEnergy:
    def test_zero_signal_passes(self):
        sig = signal_from_coeffs("zero", np.zeros(5), k=1)
        row = check_tail_energy(sig, DesignGrid(101))
        assert row.passed and row.lhs == 0.0

    def test_finite_support_passes_with_margin(self):
        coeffs = np.zeros(2)
        coeffs[1] = 1.0
        sig = signal_from_coeffs("cos1", coeffs, k=1)
        row = check_tail_energy(sig, DesignGrid(101))
        assert row.passed
        assert row.margin > 0.5 * row.bound

    def test_slow_decay_representative_passes(self):
        sig = make_signal("slow_sobolev", k=1)
        row = check_tail_energy(sig, DesignGrid(501))
        assert row.passed

    def test_uncertified_signal_rejected(self):
        sig = SignalSpec(name="adhoc", eval_fn=lambda x: np.cos(2 * np.pi * x),
                         sobolev_k=1, sobolev_r=50.0)
        with pytest.raises(UnsupportedSignalError):
            check_tail_energy(sig, DesignGrid(51))


class TestProjectionVariance:
    def test_unit_vector_projects_to_design_average(self):
        grid = DesignGrid(101)
        sig = make_signal("sine")
        vol = VolatilitySpec.budget(1.0, 1.0, 1.0)
        v = np.eye(101)[0]
        res = check_projection_variance(v, vol, sig, grid, seed=1)
        sigma_sq = volatility_values(vol, sig, grid)
        assert res.exact_var == pytest.approx(float(np.mean(sigma_sq)), rel=1e-12)
        assert res.passed

    def test_constant_volatility_is_equality_case(self):
        grid = DesignGrid(101)
        sig = make_signal("sine")
        vol = VolatilitySpec.constant(1.3)
        rng = np.random.default_rng(5)
        v = rng.standard_normal(101)
        res = check_projection_variance(v, vol, sig, grid, seed=2)
        assert abs(res.exact_var - 1.3 * float(v @ v)) <= 1e-10 * max(1.0, res.exact_var)
        assert res.passed

    def test_zero_vector_is_trivial(self):
        grid = DesignGrid(51)
        res = check_projection_variance(
            np.zeros(51), VolatilitySpec.constant(1.0), make_signal("sine"), grid, seed=3
        )
        assert res.exact_var == 0.0 and res.bound == 0.0 and res.passed

    def test_draw_floor_enforced(self):
        grid = DesignGrid(51)
        with pytest.raises(DomainError):
            check_projection_variance(np.zeros(51), VolatilitySpec.constant(1.0),
                                      make_signal("sine"), grid, mc_draws=100)


class TestVarianceEstimatorError:
    def test_noiseless_bias_case(self):
        """Zero noise with support below the cutoff: error equals the truth."""
        sig = make_signal("sine")
        vol = VolatilitySpec.constant(1.0)
        res = check_variance_estimator_error(
            sig, vol, NoiseSpec.zero(), n=101, tail_cutoff=5,
            replications=200, seed=0,
        )
        assert res.mc_mean_abs_err == pytest.approx(1.0, abs=1e-12)  # = truth level
        assert res.mc_se == pytest.approx(0.0, abs=1e-15)
        assert res.passed

    def test_rademacher_tightens_noise_scale(self):
        res = check_variance_estimator_error(
            make_signal("sine"), VolatilitySpec.budget(1.0, 1.0, 1.0),
            NoiseSpec.rademacher(), n=101, tail_cutoff=5, replications=300, seed=4,
        )
        assert res.passed

    def test_requires_order_one_certificate(self):
        with pytest.raises(UnsupportedSignalError):
            check_variance_estimator_error(
                make_signal("slow_sobolev", k=2), VolatilitySpec.constant(1.0),
                NoiseSpec.gaussian(), n=101, tail_cutoff=5, replications=200, seed=0,
            )

    def test_replication_floor(self):
        with pytest.raises(DomainError):
            check_variance_estimator_error(
                make_signal("sine"), VolatilitySpec.constant(1.0),
                NoiseSpec.gaussian(), n=101, tail_cutoff=5, replications=50, seed=0,
            )


class TestPenaltyDominance:
    def _scenario(self, noise="gaussian"):
        return Scenario(
            signal=make_signal("sine"),
            volatility=VolatilitySpec.budget(1.0, 1.0, 1.0),
            noise=NoiseSpec.named(noise),
            n=101,
            name="pen",
        )

    def test_zero_member_is_trivial(self):
        family = WeightFamily.from_vectors([np.zeros(101), np.ones(101)], 101)
        res = check_penalty_dominance(family, self._scenario(), 200, seed=9)
        assert res.per_member_lhs[0] == 0.0
        assert res.passed

    def test_pinsker_family_passes(self):
        res = check_penalty_dominance(None, self._scenario(), 300, seed=2)
        assert res.passed

    def test_known_mode_drops_middle_term(self):
        """With the noise level known, the |estimate - truth| term vanishes."""
        scenario = Scenario(
            signal=make_signal("sine"),
            volatility=VolatilitySpec.constant(1.0),
            noise=NoiseSpec.gaussian(),
            n=101,
            name="pen-known",
        )
        res = check_penalty_dominance(None, scenario, 200, seed=3, mode="known")
        assert res.passed
        from hetero_oracle.audit import prepare_context, simulate_errors

        ctx = prepare_context(scenario)
        sims = simulate_errors(ctx, 50, seed=3, mode="known")
        assert not sims["vs_abs_err"].any()
