"""Pinsker weight vectors and the finite candidate family.

The candidate set is indexed by a sieve of (order, scale) pairs.  A pair
(beta, t) maps to a shrinkage profile that is flat at 1 up to a burn-in
index, decays like 1 - (j/omega)^beta up to its support edge omega, and
is zero beyond.  The family also accepts explicit custom weight lists,
since the selection machinery only needs a finite subset of [0, 1]^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .basis import centered_sq_matrix
from .errors import DimensionError, DomainError


@dataclass(frozen=True)
class WeightVector:
    """One candidate weight profile; label is the (beta, t) sieve index."""

    coeffs: np.ndarray
    label: Optional[tuple] = None

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 1:
            raise DimensionError("weights must be a 1-d vector")
        if coeffs.size and (coeffs.min() < -1e-12 or coeffs.max() > 1.0 + 1e-12):
            raise DomainError("weight entries must lie in [0, 1]")
        coeffs = np.clip(coeffs, 0.0, 1.0)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def total(self) -> float:
        return float(self.coeffs.sum())

    @property
    def sq_norm(self) -> float:
        return float(self.coeffs @ self.coeffs)


@dataclass(frozen=True)
class SievePlan:
    """Resolved sieve parameters: grid {t_1..t_m} with t_i = i * epsilon."""

    epsilon: float
    k_star: int
    m: int

    @property
    def t_grid(self) -> np.ndarray:
        return self.epsilon * np.arange(1, self.m + 1)

    @property
    def nu(self) -> int:
        return self.k_star * self.m


def build_sieve(n: int, epsilon: Optional[float] = None, k_star: Optional[int] = None) -> SievePlan:
    """Default sieve: epsilon = 1/ln(n), k_star = ceil(sqrt(ln(n))), m = floor(1/eps^2)."""
    if n < 3:
        raise DomainError(f"sample size must be >= 3, got {n}")
    log_n = math.log(n)
    if epsilon is None:
        epsilon = 1.0 / log_n
    if not 0.0 < epsilon <= 1.0:
        raise DomainError(f"epsilon must lie in (0, 1], got {epsilon}")
    if k_star is None:
        k_star = math.ceil(math.sqrt(log_n))
    if k_star < 1:
        raise DomainError(f"k_star must be >= 1, got {k_star}")
    m = int(1.0 / epsilon**2)
    return SievePlan(epsilon=float(epsilon), k_star=int(k_star), m=m)


def pinsker_constant(beta: int) -> float:
    """Normalizing constant (beta+1)(2*beta+1) / (pi^(2*beta) * beta)."""
    if beta < 1:
        raise DomainError(f"order must be >= 1, got {beta}")
    return (beta + 1) * (2 * beta + 1) / (math.pi ** (2 * beta) * beta)


def pinsker_weight(beta: int, t: float, n: int) -> WeightVector:
    """Shrinkage profile for sieve index (beta, t) on n coefficients.

    Support edge omega = (A_beta * t * n)^(1/(2*beta+1)); flat region up to
    j0 = floor(omega / ln n).  A degenerate omega < 1 yields the all-zero
    vector, which participates in selection normally.
    """
    if beta < 1:
        raise DomainError(f"order must be >= 1, got {beta}")
    if t <= 0:
        raise DomainError(f"scale must be > 0, got {t}")
    omega = (pinsker_constant(beta) * t * n) ** (1.0 / (2 * beta + 1))
    j0 = math.floor(omega / math.log(n))
    j = np.arange(1, n + 1, dtype=float)
    coeffs = np.zeros(n)
    flat = j <= j0
    coeffs[flat] = 1.0
    taper = (~flat) & (j <= omega)
    coeffs[taper] = 1.0 - (j[taper] / omega) ** beta
    return WeightVector(coeffs=coeffs, label=(int(beta), float(t)))


@dataclass(frozen=True)
class FamilyStats:
    """Summary statistics of a weight family used by the risk-bound constants.

    max_weight_sum:  largest total weight over the family.
    centered_sup_1:  largest sup over x of |sum_j w_j   * (phi_j^2 - 1)(x)|.
    centered_sup_2:  same with squared weights w_j^2.
    """

    max_weight_sum: float
    centered_sup_1: float
    centered_sup_2: float


@dataclass(frozen=True)
class WeightFamily:
    """Ordered finite family of weight vectors on n coefficients."""

    members: tuple
    n: int
    epsilon: Optional[float] = None
    k_star: Optional[int] = None
    m: Optional[int] = None

    def __post_init__(self):
        if not self.members:
            raise DomainError("weight family must be nonempty")
        for w in self.members:
            if w.coeffs.size != self.n:
                raise DimensionError("every member must have length n")

    @property
    def nu(self) -> int:
        return len(self.members)

    @cached_property
    def matrix(self) -> np.ndarray:
        mat = np.vstack([w.coeffs for w in self.members])
        mat.setflags(write=False)
        return mat

    @classmethod
    def from_vectors(cls, vectors: Sequence, n: int) -> "WeightFamily":
        members = tuple(
            v if isinstance(v, WeightVector) else WeightVector(np.asarray(v, dtype=float))
            for v in vectors
        )
        return cls(members=members, n=n)


def pinsker_family(
    n: int,
    plan: Optional[SievePlan] = None,
    include_all_ones: bool = False,
) -> WeightFamily:
    """Family of Pinsker profiles in lexicographic (beta, t) order.

    The ordering is total and reproducible, so the first-minimizer tie
    rule in selection is deterministic.
    """
    if plan is None:
        plan = build_sieve(n)
    members = [
        pinsker_weight(beta, float(t), n)
        for beta in range(1, plan.k_star + 1)
        for t in plan.t_grid
    ]
    if include_all_ones:
        members.append(WeightVector(np.ones(n), label=("ones",)))
    return WeightFamily(
        members=tuple(members),
        n=n,
        epsilon=plan.epsilon,
        k_star=plan.k_star,
        m=plan.m,
    )


def family_stats(family: WeightFamily, sup_resolution: Optional[int] = None) -> FamilyStats:
    """Compute the family statistics; suprema are taken over a uniform x-grid.

    The weighted centered sums are trigonometric polynomials of degree at
    most 2n, so a grid of max(8n, 10^4) points bounds the sup-approximation
    error far below the tolerances asserted downstream.
    """
    n = family.n
    if sup_resolution is None:
        sup_resolution = max(8 * n, 10_000)
    elif sup_resolution < 8 * n:
        raise DomainError(f"sup_resolution must be >= 8n = {8 * n}, got {sup_resolution}")

    mat = family.matrix
    max_sum = float(mat.sum(axis=1).max())

    # (phi_j^2 - 1) vanishes for j = 1; trim to the family's active support.
    active = np.flatnonzero(np.any(mat != 0.0, axis=0))
    support = int(active.max()) + 1 if active.size else 0
    if support <= 1:
        return FamilyStats(max_weight_sum=max_sum, centered_sup_1=0.0, centered_sup_2=0.0)

    w1 = mat[:, 1:support].T          # (support-1) x nu
    w2 = (mat**2)[:, 1:support].T
    x = np.linspace(0.0, 1.0, sup_resolution)
    sup1 = np.zeros(family.nu)
    sup2 = np.zeros(family.nu)
    chunk = max(1, 8_000_000 // support)
    for lo in range(0, x.size, chunk):
        block = centered_sq_matrix(x[lo : lo + chunk], support)[:, 1:]
        np.maximum(sup1, np.abs(block @ w1).max(axis=0), out=sup1)
        np.maximum(sup2, np.abs(block @ w2).max(axis=0), out=sup2)
    return FamilyStats(
        max_weight_sum=max_sum,
        centered_sup_1=float(sup1.max()),
        centered_sup_2=float(sup2.max()),
    )
