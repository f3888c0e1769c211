"""Adaptive estimation pipeline: coefficients, penalty, cost, selection.

The procedure sees only the observations, the sample size, the shrinkage
family, and its tuning constants.  It never reads the simulation truth
(volatility bound, noise moments, smoothness metadata); leaking those
would invalidate every audit built on top.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .basis import DesignGrid, dft, reconstruct
from .errors import DimensionError, DomainError
from .signals import Sample
from .weights import WeightFamily, WeightVector, build_sieve, pinsker_family

RHO_CAP = 0.33 - 1e-6


def default_rho(n: int) -> float:
    """Slowly vanishing penalty coefficient, clamped into (0, 1/3)."""
    if n < 3:
        raise DomainError(f"sample size must be >= 3, got {n}")
    return min(1.0 / math.log(n), RHO_CAP)


def default_tail_cutoff(n: int) -> int:
    """Default cutoff ceil(n^(1/3)) for the tail variance estimator.

    Exact integer cube-root logic; float powers can land on either side of
    a perfect cube.
    """
    if n < 3:
        raise DomainError(f"sample size must be >= 3, got {n}")
    c = round(n ** (1.0 / 3.0))
    while c**3 > n:
        c -= 1
    while (c + 1) ** 3 <= n:
        c += 1
    return c if c**3 == n else c + 1


def tail_variance(theta_hat: np.ndarray, tail_cutoff: int) -> float:
    """Tail energy sum_{j > cutoff} theta_hat_j^2, the noise-level estimate."""
    theta_hat = np.asarray(theta_hat, dtype=float)
    n = theta_hat.size
    if not 1 <= tail_cutoff <= n:
        raise DomainError(f"tail cutoff must be in [1, {n}], got {tail_cutoff}")
    return float(np.sum(theta_hat[tail_cutoff:] ** 2))


def penalty(weights, varsigma: float, n: int) -> float:
    """Penalty |w|^2 * varsigma / n charged for weight-vector complexity."""
    if varsigma < 0:
        raise DomainError(f"noise level must be >= 0, got {varsigma}")
    w = weights.coeffs if isinstance(weights, WeightVector) else np.asarray(weights, dtype=float)
    return float(w @ w) * varsigma / n


@dataclass(frozen=True)
class FourierState:
    """Observed coefficients plus the tuning constants the selector needs."""

    theta_hat: np.ndarray
    varsigma_hat: float
    tail_cutoff: int
    rho: float
    known_variance: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0 / 3.0:
            raise DomainError(f"rho must lie in (0, 1/3), got {self.rho}")
        if self.varsigma_hat < 0:
            raise DomainError(f"noise level must be >= 0, got {self.varsigma_hat}")

    @classmethod
    def from_coeffs(cls, theta_hat, rho, tail_cutoff=None, known_variance=None) -> "FourierState":
        theta_hat = np.asarray(theta_hat, dtype=float)
        if tail_cutoff is None:
            tail_cutoff = default_tail_cutoff(theta_hat.size)
        if known_variance is not None:
            varsigma_hat = float(known_variance)
        else:
            varsigma_hat = tail_variance(theta_hat, tail_cutoff)
        return cls(
            theta_hat=theta_hat,
            varsigma_hat=varsigma_hat,
            tail_cutoff=tail_cutoff,
            rho=float(rho),
            known_variance=known_variance,
        )


def cost(weights, state: FourierState) -> float:
    """Selection cost: sum w^2 th^2 - 2 sum w (th^2 - vs/n) + rho * penalty.

    The proxy th^2 - vs/n for the signal part may be negative on
    noise-dominated coefficients; it is used raw, no truncation.
    """
    w = weights.coeffs if isinstance(weights, WeightVector) else np.asarray(weights, dtype=float)
    th = state.theta_hat
    if w.shape != th.shape:
        raise DimensionError(
            f"weights and coefficients must match, got {w.shape} and {th.shape}"
        )
    n = th.size
    th_sq = th**2
    proxy = th_sq - state.varsigma_hat / n
    return float(w**2 @ th_sq - 2.0 * (w @ proxy) + state.rho * (w @ w) * state.varsigma_hat / n)


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of minimizing the cost over the family."""

    index: int
    chosen: WeightVector
    costs: np.ndarray
    estimate_coeffs: np.ndarray  # chosen weights times observed coefficients


def select(family: WeightFamily, state: FourierState) -> SelectionResult:
    """Evaluate the cost for every member; first minimizer wins ties."""
    mat = family.matrix
    th = state.theta_hat
    if mat.shape[1] != th.size:
        raise DimensionError(
            f"family is on {mat.shape[1]} coefficients, state has {th.size}"
        )
    n = th.size
    th_sq = th**2
    proxy = th_sq - state.varsigma_hat / n
    sq_norms = (mat**2).sum(axis=1)
    costs = mat**2 @ th_sq - 2.0 * (mat @ proxy) + state.rho * sq_norms * state.varsigma_hat / n
    index = int(np.argmin(costs))
    chosen = family.members[index]
    return SelectionResult(
        index=index,
        chosen=chosen,
        costs=costs,
        estimate_coeffs=chosen.coeffs * th,
    )


@dataclass(frozen=True)
class EstimateConfig:
    """Tuning for one estimation run; every field has a data-driven default."""

    rho: Optional[float] = None
    epsilon: Optional[float] = None
    k_star: Optional[int] = None
    tail_cutoff: Optional[int] = None
    known_variance: bool = False
    include_all_ones: bool = False
    family: Optional[WeightFamily] = None


def estimate(
    sample: Sample,
    config: Optional[EstimateConfig] = None,
) -> tuple[SelectionResult, Callable]:
    """Full pipeline: transform, noise level, family, selection, predictor.

    Returns the selection outcome and a callable evaluating the adaptive
    estimate at any x in [0, 1].
    """
    if config is None:
        config = EstimateConfig()
    grid = sample.grid
    n = grid.n
    rho = config.rho if config.rho is not None else default_rho(n)
    if not 0.0 < rho < 1.0 / 3.0:
        raise DomainError(f"rho must lie in (0, 1/3), got {rho}")

    tail_cutoff = config.tail_cutoff
    if tail_cutoff is not None:
        lo, hi = n ** 0.25, n ** 0.5
        if not lo <= tail_cutoff <= hi:
            warnings.warn(
                f"tail cutoff {tail_cutoff} is outside [n^(1/4), n^(1/2)] = "
                f"[{lo:.2f}, {hi:.2f}]; the noise-level estimate may be poor",
                stacklevel=2,
            )
    else:
        tail_cutoff = default_tail_cutoff(n)

    theta_hat = dft(sample.y, grid)
    known = sample.noise_variance_mean if config.known_variance else None
    state = FourierState.from_coeffs(
        theta_hat, rho=rho, tail_cutoff=tail_cutoff, known_variance=known
    )

    family = config.family
    if family is None:
        plan = build_sieve(n, epsilon=config.epsilon, k_star=config.k_star)
        family = pinsker_family(n, plan, include_all_ones=config.include_all_ones)

    result = select(family, state)
    coeffs = result.estimate_coeffs
    ones = np.ones(n)

    def predict(x):
        return reconstruct(coeffs, ones, x)

    return result, predict
