"""Risk-bound constants and the Monte Carlo oracle audit.

The audit machinery verifies, at desk scale, that the adaptive selector's
mean empirical risk is within the proven envelope

    mean_risk(selected) <= (1 + excess) * min_w mean_risk(w) + remainder/n

where the remainder collects the family statistics, the noise fourth
moment, and the accuracy of the noise-level estimate.  Both sides are
Monte Carlo means, so the comparison carries a three-standard-error
slack: the bound constrains expectations, not realizations.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .basis import DesignGrid, basis_matrix
from .errors import DimensionError, DomainError
from .estimator import default_rho, default_tail_cutoff
from .signals import NoiseSpec, SignalSpec, VolatilitySpec, volatility_values
from .weights import FamilyStats, WeightFamily, WeightVector, build_sieve, family_stats, pinsker_family


def overhead_factors(rho: float) -> tuple[float, float]:
    """Closed-form factors (excess, var_err_weight) of the risk envelope.

    excess = (6*rho - 2*rho^2) / (1 - 3*rho) multiplies the oracle risk;
    var_err_weight = 4*(1 - rho^2) / (1 - 3*rho) multiplies the mean
    absolute error of the noise-level estimate inside the remainder.
    """
    if not 0.0 < rho < 1.0 / 3.0:
        raise DomainError(f"rho must lie in (0, 1/3), got {rho}")
    denom = 1.0 - 3.0 * rho
    excess = (6.0 * rho - 2.0 * rho**2) / denom
    var_err_weight = 4.0 * (1.0 - rho**2) / denom
    return excess, var_err_weight


def remainder_base(
    rho: float,
    nu: int,
    max_weight_sum: float,
    centered_sup_1: float,
    centered_sup_2: float,
    xi_bar: float,
    sigma_star: float,
    n: int,
) -> tuple[float, float]:
    """Noise-interaction term and the base remainder of the risk envelope.

    noise_term = 16*nu/rho + 4*c1*(1 + nu*xi_bar/sqrt(n))
                 + 4*nu*max_weight_sum*xi_bar/sqrt(n)
    base = (rho*(1-rho)*noise_term + 2*nu + 2*rho^2*(1-rho)*c2)
           * sigma_star / (rho*(1-3*rho))
    """
    if not 0.0 < rho < 1.0 / 3.0:
        raise DomainError(f"rho must lie in (0, 1/3), got {rho}")
    if nu < 1:
        raise DomainError(f"family size must be >= 1, got {nu}")
    if min(max_weight_sum, centered_sup_1, centered_sup_2) < 0:
        raise DomainError("family statistics must be nonnegative")
    if sigma_star < 1:
        raise DomainError(f"volatility bound must be >= 1, got {sigma_star}")
    root_n = math.sqrt(n)
    noise_term = (
        16.0 * nu / rho
        + 4.0 * centered_sup_1 * (1.0 + nu * xi_bar / root_n)
        + 4.0 * nu * max_weight_sum * xi_bar / root_n
    )
    base = (
        (rho * (1.0 - rho) * noise_term + 2.0 * nu + 2.0 * rho**2 * (1.0 - rho) * centered_sup_2)
        * sigma_star
        / (rho * (1.0 - 3.0 * rho))
    )
    return noise_term, base


def variance_error_bound(
    r: float,
    tail_cutoff: int,
    n: int,
    sigma_star: float,
    xi_bar: float,
) -> tuple[float, float]:
    """Closed-form pieces (noise_scale, tail_term) bounding the noise-level error.

    noise_scale = 2*(xi_bar + sqrt(2))*sigma_star;
    tail_term   = 4*r*sqrt(n)/cutoff^2 + 4*sqrt(r*sigma_star)/cutoff
                  + (2 + cutoff)*sigma_star/sqrt(n).
    The mean absolute error of the tail noise-level estimate is bounded by
    (noise_scale + tail_term)/sqrt(n).
    """
    if r <= 0:
        raise DomainError(f"smoothness radius must be > 0, got {r}")
    if n < 2:
        raise DomainError(f"sample size must be >= 2, got {n}")
    if not 1 <= tail_cutoff <= n:
        raise DomainError(f"tail cutoff must be in [1, {n}], got {tail_cutoff}")
    if sigma_star <= 0:
        raise DomainError(f"volatility bound must be > 0, got {sigma_star}")
    root_n = math.sqrt(n)
    noise_scale = 2.0 * (xi_bar + math.sqrt(2.0)) * sigma_star
    tail_term = (
        4.0 * r * root_n / tail_cutoff**2
        + 4.0 * math.sqrt(r * sigma_star) / tail_cutoff
        + (2.0 + tail_cutoff) * sigma_star / root_n
    )
    return noise_scale, tail_term


def empirical_error(weights, theta_hat, theta_true) -> float:
    """Empirical squared error of the weighted estimate against the truth.

    Expansion sum w^2 th^2 - 2 sum w th t + sum t^2; equals the direct
    design-grid norm of the difference because the basis spans the grid.
    """
    w = weights.coeffs if isinstance(weights, WeightVector) else np.asarray(weights, dtype=float)
    theta_hat = np.asarray(theta_hat, dtype=float)
    theta_true = np.asarray(theta_true, dtype=float)
    if not w.shape == theta_hat.shape == theta_true.shape:
        raise DimensionError(
            f"weights, observed and true coefficients must be equal-length, got "
            f"{w.shape}, {theta_hat.shape}, {theta_true.shape}"
        )
    return float(
        w**2 @ theta_hat**2 - 2.0 * (w @ (theta_hat * theta_true)) + theta_true @ theta_true
    )


@dataclass(frozen=True)
class OracleConstants:
    """Every explicit constant entering the audited inequality."""

    rho: float
    excess: float              # multiplies the oracle risk (as 1 + excess)
    var_err_weight: float      # multiplies mean |noise-level error|
    noise_term: float
    base_remainder: float
    remainder_total: float     # base + var_err_weight * max_weight_sum * E|err|
    noise_scale: float
    tail_term: float
    remainder_sobolev: float   # base + var_err_weight*(noise_scale+tail_term)*mws/sqrt(n)
    lemma_variance_bound: float  # (noise_scale + tail_term)/sqrt(n)


@dataclass(frozen=True)
class Scenario:
    """One simulation setting: truth, noise, size, and tuning overrides."""

    signal: SignalSpec
    volatility: VolatilitySpec
    noise: NoiseSpec
    n: int
    name: str = "scenario"
    rho: Optional[float] = None
    epsilon: Optional[float] = None
    k_star: Optional[int] = None
    tail_cutoff: Optional[int] = None
    include_all_ones: bool = False


@dataclass
class ScenarioContext:
    """Deterministic per-scenario precomputation shared by all replications."""

    scenario: Scenario
    grid: DesignGrid
    basis: np.ndarray
    s_grid: np.ndarray
    sigma_sq: np.ndarray
    sigma: np.ndarray
    sigma_star: float
    varsigma: float
    theta_true: np.ndarray
    family: WeightFamily
    stats: FamilyStats
    rho: float
    tail_cutoff: int


def prepare_context(scenario: Scenario, family: Optional[WeightFamily] = None) -> ScenarioContext:
    grid = DesignGrid(scenario.n)
    basis = basis_matrix(grid)
    s_grid = scenario.signal.values(grid)
    sigma_sq = volatility_values(scenario.volatility, scenario.signal, grid)
    sigma_star = scenario.volatility.sigma_star
    if sigma_star is None:
        sigma_star = max(1.0, float(sigma_sq.max()))
    varsigma = math.fsum(sigma_sq) / grid.n
    theta_true = basis.T @ s_grid / grid.n
    if family is None:
        plan = build_sieve(scenario.n, epsilon=scenario.epsilon, k_star=scenario.k_star)
        family = pinsker_family(scenario.n, plan, include_all_ones=scenario.include_all_ones)
    stats = family_stats(family)
    rho = scenario.rho if scenario.rho is not None else default_rho(scenario.n)
    tail_cutoff = (
        scenario.tail_cutoff if scenario.tail_cutoff is not None else default_tail_cutoff(scenario.n)
    )
    return ScenarioContext(
        scenario=scenario,
        grid=grid,
        basis=basis,
        s_grid=s_grid,
        sigma_sq=sigma_sq,
        sigma=np.sqrt(sigma_sq),
        sigma_star=float(sigma_star),
        varsigma=varsigma,
        theta_true=theta_true,
        family=family,
        stats=stats,
        rho=rho,
        tail_cutoff=tail_cutoff,
    )


@dataclass(frozen=True)
class OracleReport:
    """Monte Carlo audit of the risk envelope for one scenario and mode."""

    scenario_name: str
    n: int
    mode: str
    noise: str
    replication_count: int
    seed: int
    nu: int
    per_lambda_risk: np.ndarray
    per_lambda_se: np.ndarray
    adaptive_risk: float
    adaptive_se: float
    oracle_risk: float
    oracle_index: int
    varsigma_abs_err: float
    varsigma_abs_err_se: float
    lhs: float
    rhs: float
    slack: float
    passed: bool
    constants: OracleConstants
    stats: FamilyStats


def _thread_count() -> int:
    raw = os.environ.get("HETERO_ORACLE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    """Mean and standard error via compensated summation (order-independent)."""
    count = values.shape[0]
    mean = math.fsum(values) / count
    if count < 2:
        return mean, 0.0
    var = math.fsum((values - mean) ** 2) / (count - 1)
    return mean, math.sqrt(var / count)


def simulate_errors(
    ctx: ScenarioContext,
    replications: int,
    seed: int,
    mode: str = "estimated",
) -> dict:
    """Run the replication block: per-member errors, selection, noise-level error.

    Replication i draws from a generator seeded with seed + i, so chunking
    across threads cannot change any draw; results land in preallocated
    arrays indexed by replication.
    """
    if mode not in ("estimated", "known"):
        raise DomainError(f"mode must be 'estimated' or 'known', got {mode!r}")
    n = ctx.grid.n
    mat = ctx.family.matrix
    mat_sq = mat**2
    sq_norms = mat_sq.sum(axis=1)
    true_energy = float(ctx.theta_true @ ctx.theta_true)
    cutoff = ctx.tail_cutoff
    nu = ctx.family.nu

    err_matrix = np.empty((replications, nu))
    adaptive_err = np.empty(replications)
    chosen_index = np.empty(replications, dtype=int)
    penalty_matrix = np.empty((replications, nu))
    vs_abs_err = np.empty(replications)

    def run_block(lo: int, hi: int) -> None:
        rows = hi - lo
        xi = np.empty((rows, n))
        for i in range(rows):
            rng = np.random.default_rng(seed + lo + i)
            xi[i] = ctx.scenario.noise.draw(rng, n)
        y = ctx.s_grid + ctx.sigma * xi
        theta = y @ ctx.basis / n
        theta_sq = theta**2
        if mode == "known":
            vs = np.full(rows, ctx.varsigma)
        else:
            vs = theta_sq[:, cutoff:].sum(axis=1)
        proxy = theta_sq - vs[:, None] / n
        costs = theta_sq @ mat_sq.T - 2.0 * (proxy @ mat.T) + ctx.rho * np.outer(vs, sq_norms) / n
        picked = np.argmin(costs, axis=1)
        errs = theta_sq @ mat_sq.T - 2.0 * ((theta * ctx.theta_true) @ mat.T) + true_energy
        err_matrix[lo:hi] = errs
        adaptive_err[lo:hi] = errs[np.arange(rows), picked]
        chosen_index[lo:hi] = picked
        penalty_matrix[lo:hi] = np.outer(vs, sq_norms) / n
        vs_abs_err[lo:hi] = np.abs(vs - ctx.varsigma)

    threads = _thread_count()
    chunk = 64
    bounds = [(lo, min(lo + chunk, replications)) for lo in range(0, replications, chunk)]
    if threads == 1 or len(bounds) == 1:
        for lo, hi in bounds:
            run_block(lo, hi)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda b: run_block(*b), bounds))

    return {
        "err_matrix": err_matrix,
        "adaptive_err": adaptive_err,
        "chosen_index": chosen_index,
        "penalty_matrix": penalty_matrix,
        "vs_abs_err": vs_abs_err,
    }


def audit_oracle(
    scenario: Scenario,
    replications: int,
    seed: int,
    mode: str = "estimated",
    family: Optional[WeightFamily] = None,
) -> OracleReport:
    """Monte Carlo check of the risk envelope at three-standard-error slack."""
    if replications < 50:
        raise DomainError(f"audit needs >= 50 replications, got {replications}")
    ctx = prepare_context(scenario, family=family)
    sims = simulate_errors(ctx, replications, seed, mode=mode)

    nu = ctx.family.nu
    per_risk = np.empty(nu)
    per_se = np.empty(nu)
    for k in range(nu):
        per_risk[k], per_se[k] = _mean_se(sims["err_matrix"][:, k])
    adaptive_risk, adaptive_se = _mean_se(sims["adaptive_err"])
    vs_err, vs_err_se = _mean_se(sims["vs_abs_err"])

    oracle_index = int(np.argmin(per_risk))
    oracle_risk = float(per_risk[oracle_index])

    excess, var_err_weight = overhead_factors(ctx.rho)
    noise_term, base = remainder_base(
        ctx.rho,
        nu,
        ctx.stats.max_weight_sum,
        ctx.stats.centered_sup_1,
        ctx.stats.centered_sup_2,
        scenario.noise.xi_bar,
        ctx.sigma_star,
        scenario.n,
    )
    noise_scale, tail_term = variance_error_bound(
        scenario.signal.sobolev_r,
        ctx.tail_cutoff,
        scenario.n,
        ctx.sigma_star,
        scenario.noise.xi_bar,
    )
    root_n = math.sqrt(scenario.n)
    if mode == "known":
        remainder_total = base
    else:
        remainder_total = base + var_err_weight * ctx.stats.max_weight_sum * vs_err
    constants = OracleConstants(
        rho=ctx.rho,
        excess=excess,
        var_err_weight=var_err_weight,
        noise_term=noise_term,
        base_remainder=base,
        remainder_total=remainder_total,
        noise_scale=noise_scale,
        tail_term=tail_term,
        remainder_sobolev=base
        + var_err_weight * (noise_scale + tail_term) * ctx.stats.max_weight_sum / root_n,
        lemma_variance_bound=(noise_scale + tail_term) / root_n,
    )

    lhs = adaptive_risk
    rhs = (1.0 + excess) * oracle_risk + remainder_total / scenario.n
    slack = 3.0 * math.sqrt(adaptive_se**2 + ((1.0 + excess) * per_se[oracle_index]) ** 2)
    return OracleReport(
        scenario_name=scenario.name,
        n=scenario.n,
        mode=mode,
        noise=scenario.noise.distribution,
        replication_count=replications,
        seed=seed,
        nu=nu,
        per_lambda_risk=per_risk,
        per_lambda_se=per_se,
        adaptive_risk=adaptive_risk,
        adaptive_se=adaptive_se,
        oracle_risk=oracle_risk,
        oracle_index=oracle_index,
        varsigma_abs_err=vs_err,
        varsigma_abs_err_se=vs_err_se,
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        passed=bool(lhs <= rhs + slack),
        constants=constants,
        stats=ctx.stats,
    )


@dataclass(frozen=True)
class SlowVariationResult:
    """Tabulated remainder growth along an n-sequence."""

    delta: float
    rows: tuple
    base_tail_decreasing: bool
    sobolev_tail_decreasing: bool


def slow_variation_check(
    n_sequence,
    delta: float,
    r: float = 1.0,
    xi_bar: float = math.sqrt(2.0),
    sigma_star: float = 1.0,
    epsilon: Optional[float] = None,
    k_star: Optional[int] = None,
) -> SlowVariationResult:
    """Tabulate remainder/n^delta along increasing n with the default sieve.

    The tail (all steps after the first entry) must decrease strictly for
    both the base remainder and its smoothness-ball variant.
    """
    if delta <= 0:
        raise DomainError(f"delta must be > 0, got {delta}")
    n_sequence = list(n_sequence)
    if any(b <= a for a, b in zip(n_sequence, n_sequence[1:])):
        raise DomainError("n sequence must be strictly increasing")
    rows = []
    for n in n_sequence:
        plan = build_sieve(n, epsilon=epsilon, k_star=k_star)
        family = pinsker_family(n, plan)
        stats = family_stats(family)
        rho = default_rho(n)
        cutoff = default_tail_cutoff(n)
        noise_term, base = remainder_base(
            rho,
            family.nu,
            stats.max_weight_sum,
            stats.centered_sup_1,
            stats.centered_sup_2,
            xi_bar,
            sigma_star,
            n,
        )
        noise_scale, tail_term = variance_error_bound(r, cutoff, n, sigma_star, xi_bar)
        sobolev = base + (
            overhead_factors(rho)[1] * (noise_scale + tail_term) * stats.max_weight_sum / math.sqrt(n)
        )
        scale = float(n) ** delta
        rows.append(
            {
                "n": n,
                "rho": rho,
                "nu": family.nu,
                "max_weight_sum": stats.max_weight_sum,
                "base_remainder": base,
                "sobolev_remainder": sobolev,
                "base_ratio": base / scale,
                "sobolev_ratio": sobolev / scale,
            }
        )
    base_ratios = [row["base_ratio"] for row in rows]
    sob_ratios = [row["sobolev_ratio"] for row in rows]
    base_dec = all(b < a for a, b in zip(base_ratios[1:], base_ratios[2:]))
    sob_dec = all(b < a for a, b in zip(sob_ratios[1:], sob_ratios[2:]))
    return SlowVariationResult(
        delta=delta,
        rows=tuple(rows),
        base_tail_decreasing=base_dec,
        sobolev_tail_decreasing=sob_dec,
    )
