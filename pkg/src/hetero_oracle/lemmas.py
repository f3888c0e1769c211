"""Standalone numerical verifiers for the supporting inequalities.

Each check instantiates one proved bound at concrete parameters and
reports machine-readable pass/fail with margins.  The deterministic
checks (partial trigonometric sums, tail energy, exact projection
variance) run at 1e-9 tolerance; the Monte Carlo checks use three
standard errors of their estimated means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .audit import Scenario, prepare_context, simulate_errors, variance_error_bound
from .basis import DesignGrid, TWO_PI, basis_matrix, dft
from .errors import DimensionError, DomainError, UnsupportedSignalError
from .signals import NoiseSpec, SignalSpec, VolatilitySpec, volatility_values
from .weights import WeightFamily


@dataclass(frozen=True)
class CheckRow:
    """One verified inequality instance for the reporting layer."""

    lemma: str
    case: str
    lhs: float
    bound: float
    margin: float
    passed: bool


def noise_coeff_variance(sigma_sq, grid: DesignGrid) -> np.ndarray:
    """Per-coefficient noise variances (1/n) sum_l sigma_l^2 * basis_j(x_l)^2.

    Entry 0 (the constant basis function) equals the design average of
    sigma^2 exactly; every entry lies in (0, 2*max(sigma^2)].
    """
    sigma_sq = np.asarray(sigma_sq, dtype=float)
    if sigma_sq.shape != (grid.n,):
        raise DimensionError(f"expected a length-{grid.n} vector, got {sigma_sq.shape}")
    mat = basis_matrix(grid)
    return (mat**2).T @ sigma_sq / grid.n


def check_centered_sums(
    n_max: int = 200,
    m_list=(0, 1, 2),
    grid_points: int = 10_000,
    tolerance: float = 1e-9,
) -> list[CheckRow]:
    """Partial sums of the centered squared basis stay below 2^m * N^m.

    Verifies sup_x |sum_{l=2}^{N} l^m * (phi_l^2 - 1)(x)| <= (2N)^m for
    every N up to n_max, reported in the normalized form
    N^(-m) * sup <= 2^m.
    """
    if n_max < 2:
        raise DomainError(f"n_max must be >= 2, got {n_max}")
    if grid_points < 10_000:
        raise DomainError(f"grid must have >= 1e4 points, got {grid_points}")
    x = np.linspace(0.0, 1.0, grid_points)
    freqs = np.arange(1, n_max // 2 + 1)
    cos_table = np.cos(2.0 * TWO_PI * np.outer(freqs, x))  # cos(4*pi*a*x)
    rows = []
    for m in m_list:
        running = np.zeros(grid_points)
        for big_n in range(2, n_max + 1):
            if big_n % 2 == 0:
                running += big_n**m * cos_table[big_n // 2 - 1]
            else:
                running -= big_n**m * cos_table[(big_n - 1) // 2 - 1]
            sup = float(np.abs(running).max()) / big_n**m
            bound = float(2**m)
            rows.append(
                CheckRow(
                    lemma="centered_sums",
                    case=f"N={big_n},m={m}",
                    lhs=sup,
                    bound=bound,
                    margin=bound - sup,
                    passed=sup <= bound + tolerance,
                )
            )
    return rows


def check_tail_energy(
    signal: SignalSpec,
    grid: DesignGrid,
    tolerance: float = 1e-9,
) -> CheckRow:
    """Grid-coefficient tail energy decays with the certified smoothness.

    Scans every cutoff m in [1, n-1] and checks
    m^(2k) * sum_{j>m} theta_{j,n}^2 <= 4*r / pi^(2(k-1)).
    """
    if signal.fourier_coeffs is None:
        raise UnsupportedSignalError(
            f"signal {signal.name!r} carries no certified coefficients"
        )
    k, r = signal.sobolev_k, signal.sobolev_r
    theta = dft(signal.values(grid), grid)
    suffix_energy = np.cumsum((theta**2)[::-1])[::-1]
    tails = suffix_energy[1:]  # entry m-1 is sum_{j>m} theta_j^2, m = 1..n-1
    m = np.arange(1, grid.n, dtype=float)
    ratios = m ** (2 * k) * tails
    worst = int(np.argmax(ratios))
    bound = 4.0 * r / math.pi ** (2 * (k - 1))
    lhs = float(ratios[worst])
    return CheckRow(
        lemma="tail_energy",
        case=f"{signal.name},k={k},n={grid.n},worst_m={worst + 1}",
        lhs=lhs,
        bound=bound,
        margin=bound - lhs,
        passed=lhs <= bound + tolerance,
    )


@dataclass(frozen=True)
class ProjectionVarianceResult:
    exact_var: float
    bound: float
    mc_var: float
    mc_se: float
    passed: bool


def check_projection_variance(
    v,
    vol: VolatilitySpec,
    signal: SignalSpec,
    grid: DesignGrid,
    mc_draws: int = 10_000,
    seed: int = 0,
    tolerance: float = 1e-10,
) -> ProjectionVarianceResult:
    """Variance of a noise-coefficient projection never exceeds sigma* |v|^2.

    The exact variance is sum_l sigma_l^2 * vtilde_l^2 with
    vtilde = basis_matrix @ v / sqrt(n); under constant volatility this is
    an equality, which is the sharpness witness.  A Monte Carlo estimate
    over fresh gaussian noise must agree within three standard errors.
    """
    if mc_draws < 10_000:
        raise DomainError(f"mc_draws must be >= 1e4, got {mc_draws}")
    v = np.asarray(v, dtype=float)
    if v.shape != (grid.n,):
        raise DimensionError(f"expected a length-{grid.n} vector, got {v.shape}")
    sigma_sq = volatility_values(vol, signal, grid)
    sigma_star = vol.sigma_star
    if sigma_star is None:
        sigma_star = max(1.0, float(sigma_sq.max()))
    v_tilde = basis_matrix(grid) @ v / math.sqrt(grid.n)
    exact = float(sigma_sq @ v_tilde**2)
    bound = float(sigma_star * (v @ v))

    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((mc_draws, grid.n))
    sums = draws @ (np.sqrt(sigma_sq) * v_tilde)
    squares = sums**2
    mc_var = float(squares.mean())
    mc_se = float(squares.std(ddof=1) / math.sqrt(mc_draws))
    passed = exact <= bound + tolerance and abs(mc_var - exact) <= 3.0 * mc_se
    return ProjectionVarianceResult(exact, bound, mc_var, mc_se, passed)


@dataclass(frozen=True)
class VarianceErrorResult:
    mc_mean_abs_err: float
    mc_se: float
    bound: float
    passed: bool


def check_variance_estimator_error(
    signal: SignalSpec,
    vol: VolatilitySpec,
    noise: NoiseSpec,
    n: int,
    tail_cutoff: int,
    replications: int,
    seed: int,
) -> VarianceErrorResult:
    """Mean |noise-level estimate - truth| obeys its closed-form sqrt(n) bound.

    Requires a signal certified at smoothness order 1, since the bound's
    tail term is derived for that ball.
    """
    if replications < 200:
        raise DomainError(f"needs >= 200 replications, got {replications}")
    if signal.sobolev_k != 1:
        raise UnsupportedSignalError(
            f"signal {signal.name!r} is certified at order {signal.sobolev_k}, need 1"
        )
    scenario = Scenario(
        signal=signal, volatility=vol, noise=noise, n=n, tail_cutoff=tail_cutoff
    )
    ctx = prepare_context(scenario)
    sims = simulate_errors(ctx, replications, seed, mode="estimated")
    errs = sims["vs_abs_err"]
    mc_mean = float(errs.mean())
    mc_se = float(errs.std(ddof=1) / math.sqrt(replications)) if replications > 1 else 0.0
    noise_scale, tail_term = variance_error_bound(
        signal.sobolev_r, tail_cutoff, n, ctx.sigma_star, noise.xi_bar
    )
    bound = (noise_scale + tail_term) / math.sqrt(n)
    return VarianceErrorResult(
        mc_mean_abs_err=mc_mean,
        mc_se=mc_se,
        bound=bound,
        passed=mc_mean <= bound + 3.0 * mc_se,
    )


@dataclass(frozen=True)
class PenaltyDominanceResult:
    per_member_lhs: np.ndarray
    per_member_rhs: np.ndarray
    per_member_slack: np.ndarray
    worst_index: int
    passed: bool


def check_penalty_dominance(
    family: Optional[WeightFamily],
    scenario: Scenario,
    replications: int,
    seed: int,
    mode: str = "estimated",
) -> PenaltyDominanceResult:
    """Mean penalty never exceeds mean error plus the noise-level slack terms.

    For every member w:  E penalty(w) <= E error(w)
        + (max_weight_sum/n) * E|noise-level error| + sigma* * c2 / n.
    """
    if replications < 200:
        raise DomainError(f"needs >= 200 replications, got {replications}")
    ctx = prepare_context(scenario, family=family)
    sims = simulate_errors(ctx, replications, seed, mode=mode)
    n = scenario.n
    pen = sims["penalty_matrix"]
    err = sims["err_matrix"]
    vs_err = sims["vs_abs_err"]

    lhs = pen.mean(axis=0)
    vs_mean = float(vs_err.mean())
    rhs = (
        err.mean(axis=0)
        + ctx.stats.max_weight_sum / n * vs_mean
        + ctx.sigma_star * ctx.stats.centered_sup_2 / n
    )
    root_r = math.sqrt(replications)
    se_lhs = pen.std(axis=0, ddof=1) / root_r
    se_err = err.std(axis=0, ddof=1) / root_r
    se_vs = float(vs_err.std(ddof=1) / root_r)
    slack = 3.0 * np.sqrt(se_lhs**2 + se_err**2 + (ctx.stats.max_weight_sum / n * se_vs) ** 2)
    gaps = lhs - rhs - slack
    worst = int(np.argmax(gaps))
    return PenaltyDominanceResult(
        per_member_lhs=lhs,
        per_member_rhs=rhs,
        per_member_slack=slack,
        worst_index=worst,
        passed=bool(np.all(lhs <= rhs + slack)),
    )
