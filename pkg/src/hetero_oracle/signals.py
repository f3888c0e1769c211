"""Signal, volatility, and noise specifications; sample generation.

Signals are 1-periodic regression functions carrying smoothness metadata
(differentiability order k and an ellipsoid radius r): a signal with
basis coefficients (theta_j) lies in the smoothness ball of radius r when
sum_j a_j theta_j^2 <= r, where a_j = sum_{l=0}^{k} (2*pi*floor(j/2))^(2l).
Built-in signals are either finite trigonometric polynomials (exact basis
support) or a slowly decaying representative with coefficients
proportional to floor(j/2)^-(k+1), so both exactly-representable and
genuinely infinite-dimensional cases are available to the audits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .basis import DesignGrid, TWO_PI, basis_matrix, dft
from .errors import (
    DimensionError,
    DomainError,
    UnsupportedSignalError,
    VolatilityBoundError,
)


def ellipsoid_weight(j: int, k: int) -> float:
    """Ellipsoid semi-axis weight a_j = sum_{l=0}^{k} (2*pi*floor(j/2))^(2l).

    The constant basis function has floor(j/2) = 0 and contributes only
    the l = 0 term (0^0 taken as 1), so a_1 = 1.
    """
    if j < 1:
        raise DomainError(f"basis index must be >= 1, got {j}")
    if k < 1:
        raise DomainError(f"smoothness order must be >= 1, got {k}")
    half = j // 2
    if half == 0:
        return 1.0
    q = (TWO_PI * half) ** 2
    # geometric sum 1 + q + ... + q^k
    return float((q ** (k + 1) - 1.0) / (q - 1.0))


def ellipsoid_weights(count: int, k: int) -> np.ndarray:
    """Vector of a_j for j = 1..count."""
    halves = np.arange(1, count + 1) // 2
    q = (TWO_PI * halves.astype(float)) ** 2
    out = np.ones(count)
    mask = halves > 0
    out[mask] = (q[mask] ** (k + 1) - 1.0) / (q[mask] - 1.0)
    return out


def _series_eval(coeffs: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Evaluator for sum_j coeffs[j-1] * basis_j(x), vectorized in x."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size % 2 == 0:  # pad so every cos has its sin partner
        coeffs = np.concatenate([coeffs, [0.0]])
    const = coeffs[0] if coeffs.size else 0.0
    n_pairs = coeffs.size // 2
    cos_c = coeffs[1::2]  # indices 2, 4, ...
    sin_c = coeffs[2::2]  # indices 3, 5, ...
    freqs = np.arange(1, n_pairs + 1, dtype=float)
    sqrt2 = math.sqrt(2.0)

    def evaluate(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.full(x.shape, const)
        # chunk to bound the (points x frequencies) workspace
        step = max(1, 4_000_000 // max(1, n_pairs))
        for lo in range(0, x.size, step):
            seg = x[lo : lo + step]
            ang = TWO_PI * np.outer(seg, freqs)
            out[lo : lo + step] += sqrt2 * (np.cos(ang) @ cos_c + np.sin(ang) @ sin_c)
        return out

    return evaluate


@dataclass(frozen=True)
class SignalSpec:
    """A regression function with certified smoothness metadata.

    ``fourier_coeffs`` holds the truncated basis coefficients when the
    signal is built from a series; it is required by the smoothness-norm
    and certification machinery but optional for ad-hoc callables.
    """

    name: str
    eval_fn: Callable = field(repr=False)
    sobolev_k: int
    sobolev_r: float
    fourier_coeffs: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.sobolev_k < 1:
            raise DomainError(f"smoothness order must be >= 1, got {self.sobolev_k}")
        if self.sobolev_r <= 0:
            raise DomainError(f"smoothness radius must be > 0, got {self.sobolev_r}")
        lo, hi = float(self(0.0)), float(self(1.0))
        if abs(lo - hi) > 1e-9:
            raise DomainError(
                f"signal {self.name!r} is not 1-periodic: S(0)={lo!r}, S(1)={hi!r}"
            )
        if self.fourier_coeffs is not None:
            norm = sobolev_norm(self)
            if norm > self.sobolev_r * (1.0 + 1e-12) + 1e-12:
                raise DomainError(
                    f"signal {self.name!r} violates its smoothness budget: "
                    f"norm {norm!r} > r {self.sobolev_r!r}"
                )

    def __call__(self, x):
        vals = self.eval_fn(np.atleast_1d(np.asarray(x, dtype=float)))
        return float(vals[0]) if np.ndim(x) == 0 else np.asarray(vals, dtype=float)

    def values(self, grid: DesignGrid) -> np.ndarray:
        return self(grid.points)


def sobolev_norm(signal: SignalSpec) -> float:
    """Ellipsoid functional sum_j a_j theta_j^2 over the stored truncation."""
    if signal.fourier_coeffs is None:
        raise UnsupportedSignalError(
            f"signal {signal.name!r} carries no basis coefficients"
        )
    coeffs = np.asarray(signal.fourier_coeffs, dtype=float)
    weights = ellipsoid_weights(coeffs.size, signal.sobolev_k)
    return float(math.fsum(weights * coeffs**2))


def fourier_tail(signal: SignalSpec, grid: DesignGrid, m: int) -> float:
    """Tail energy sum_{j=m+1}^{n} of the squared grid coefficients of S."""
    if not 1 <= m <= grid.n - 1:
        raise DomainError(f"tail start must be in [1, {grid.n - 1}], got {m}")
    theta = dft(signal.values(grid), grid)
    return float(np.sum(theta[m:] ** 2))


# ---------------------------------------------------------------------------
# Built-in signal library
# ---------------------------------------------------------------------------


def signal_from_coeffs(name, coeffs, k=1, r=None) -> SignalSpec:
    """Build a SignalSpec from basis coefficients; r defaults to the exact norm."""
    coeffs = np.asarray(coeffs, dtype=float)
    if r is None:
        r = math.fsum(ellipsoid_weights(coeffs.size, k) * coeffs**2)
        r = max(r, 1e-12)
    return SignalSpec(
        name=name,
        eval_fn=_series_eval(coeffs),
        sobolev_k=k,
        sobolev_r=float(r),
        fourier_coeffs=coeffs,
    )


def constant_signal(value: float = 1.0, k: int = 1) -> SignalSpec:
    return signal_from_coeffs(f"constant({value})", [value], k=k)


def sine_signal(k: int = 1) -> SignalSpec:
    """S(x) = sin(2*pi*x), i.e. coefficient 1/sqrt(2) on basis index 3."""
    coeffs = np.zeros(3)
    coeffs[2] = 1.0 / math.sqrt(2.0)
    return signal_from_coeffs("sine", coeffs, k=k)


def trig_poly_signal(k: int = 1) -> SignalSpec:
    """A fixed low-pass trigonometric polynomial with mixed cos/sin content."""
    coeffs = np.zeros(6)
    coeffs[0] = 0.5
    coeffs[1] = 1.0
    coeffs[2] = -0.7
    coeffs[3] = 0.4
    coeffs[4] = 0.25
    coeffs[5] = -0.15
    return signal_from_coeffs("trigpoly", coeffs, k=k)


def slow_sobolev_signal(k: int = 1, scale: float = 0.25, j_max: int = 10_000) -> SignalSpec:
    """Slowly decaying representative: theta_j = scale * floor(j/2)^-(k+1), j >= 2.

    Every coefficient up to the truncation is nonzero, so the signal is not
    exactly representable on any finite design grid.
    """
    coeffs = np.zeros(j_max)
    halves = np.arange(2, j_max + 1) // 2
    coeffs[1:] = scale * halves.astype(float) ** (-(k + 1))
    return signal_from_coeffs(f"slow-sobolev(k={k})", coeffs, k=k)


_SIGNAL_BUILDERS = {
    "constant": constant_signal,
    "sine": sine_signal,
    "trigpoly": trig_poly_signal,
    "slow_sobolev": slow_sobolev_signal,
}


def make_signal(signal_id: str, **params) -> SignalSpec:
    try:
        builder = _SIGNAL_BUILDERS[signal_id]
    except KeyError:
        raise UnsupportedSignalError(
            f"unknown signal {signal_id!r}; available: {sorted(_SIGNAL_BUILDERS)}"
        ) from None
    return builder(**params)


# ---------------------------------------------------------------------------
# Volatility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VolatilitySpec:
    """Squared-volatility rule sigma^2(x, S(x)).

    kind is one of:
      * "budget":   c0 + c1 * x + c2 * S(x)^2 with positive constants
      * "constant": a fixed positive level
      * "custom":   caller-supplied function of (x, S(x)); any randomness
                    must be baked in with a caller-owned seed so that the
                    rule stays deterministic per (x, S(x))

    ``sigma_star`` is an optional declared upper bound on sigma^2 over the
    design; when absent it is resolved from the realized maximum (and
    floored at 1) when a sample is generated.
    """

    kind: str
    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    level: float = 1.0
    fn: Optional[Callable[[float, float], float]] = field(default=None, repr=False)
    sigma_star: Optional[float] = None

    @classmethod
    def budget(cls, c0: float, c1: float, c2: float, sigma_star=None) -> "VolatilitySpec":
        if min(c0, c1, c2) <= 0:
            raise DomainError("budget volatility requires positive c0, c1, c2")
        return cls(kind="budget", c0=c0, c1=c1, c2=c2, sigma_star=sigma_star)

    @classmethod
    def constant(cls, level: float, sigma_star=None) -> "VolatilitySpec":
        if level <= 0:
            raise DomainError(f"constant volatility must be positive, got {level}")
        return cls(kind="constant", level=level, sigma_star=sigma_star)

    @classmethod
    def custom(cls, fn: Callable[[float, float], float], sigma_star=None) -> "VolatilitySpec":
        return cls(kind="custom", fn=fn, sigma_star=sigma_star)


def volatility_at(spec: VolatilitySpec, x: float, s_val: float) -> float:
    """Evaluate sigma^2 at a design point; enforces the declared bound."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"design point must lie in [0, 1], got {x}")
    if spec.kind == "budget":
        val = spec.c0 + spec.c1 * x + spec.c2 * s_val**2
    elif spec.kind == "constant":
        val = spec.level
    elif spec.kind == "custom":
        val = float(spec.fn(x, s_val))
    else:
        raise DomainError(f"unknown volatility kind {spec.kind!r}")
    if spec.sigma_star is not None and val > spec.sigma_star:
        raise VolatilityBoundError(
            f"volatility {val!r} at x={x} exceeds the declared bound {spec.sigma_star!r}"
        )
    return float(val)


def volatility_values(spec: VolatilitySpec, signal: SignalSpec, grid: DesignGrid) -> np.ndarray:
    """sigma^2 at every design point; validates positivity and the bound."""
    s_vals = signal.values(grid)
    if spec.kind == "budget":
        out = spec.c0 + spec.c1 * grid.points + spec.c2 * s_vals**2
    elif spec.kind == "constant":
        out = np.full(grid.n, float(spec.level))
    elif spec.kind == "custom":
        out = np.array([spec.fn(x, s) for x, s in zip(grid.points, s_vals)], dtype=float)
    else:
        raise DomainError(f"unknown volatility kind {spec.kind!r}")
    if np.any(out <= 0):
        raise DomainError("volatility must be strictly positive at every design point")
    if spec.sigma_star is not None and float(out.max()) > spec.sigma_star:
        raise VolatilityBoundError(
            f"realized volatility maximum {out.max()!r} exceeds the declared "
            f"bound {spec.sigma_star!r}"
        )
    return out


# ---------------------------------------------------------------------------
# Noise
# ---------------------------------------------------------------------------

_NOISE_FOURTH_MOMENTS = {
    "gaussian": 3.0,
    "rademacher": 1.0,
    "uniform_centered": 9.0 / 5.0,  # uniform on [-sqrt(3), sqrt(3)]
    "zero": 1.0,  # test hook; moment metadata kept degenerate
}


@dataclass(frozen=True)
class NoiseSpec:
    """Unit-variance i.i.d. noise family with known fourth moment.

    "zero" is a test hook producing identically-zero draws for noiseless
    runs; its moment metadata is the degenerate xi_star = 1, xi_bar = 0.
    """

    distribution: str
    xi_star: float
    xi_bar: float

    @classmethod
    def named(cls, distribution: str) -> "NoiseSpec":
        try:
            xi_star = _NOISE_FOURTH_MOMENTS[distribution]
        except KeyError:
            raise DomainError(
                f"unknown noise distribution {distribution!r}; "
                f"available: {sorted(_NOISE_FOURTH_MOMENTS)}"
            ) from None
        return cls(distribution, xi_star, math.sqrt(xi_star - 1.0))

    @classmethod
    def gaussian(cls) -> "NoiseSpec":
        return cls.named("gaussian")

    @classmethod
    def rademacher(cls) -> "NoiseSpec":
        return cls.named("rademacher")

    @classmethod
    def uniform_centered(cls) -> "NoiseSpec":
        return cls.named("uniform_centered")

    @classmethod
    def zero(cls) -> "NoiseSpec":
        return cls.named("zero")

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.distribution == "gaussian":
            return rng.standard_normal(size)
        if self.distribution == "rademacher":
            return rng.integers(0, 2, size=size).astype(float) * 2.0 - 1.0
        if self.distribution == "uniform_centered":
            bound = math.sqrt(3.0)
            return rng.uniform(-bound, bound, size=size)
        if self.distribution == "zero":
            return np.zeros(size)
        raise DomainError(f"unknown noise distribution {self.distribution!r}")


# ---------------------------------------------------------------------------
# Sample generation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sample:
    """One realization of the regression model, plus the audited truth."""

    grid: DesignGrid
    y: np.ndarray
    truth: SignalSpec
    sigma_sq: np.ndarray
    noise_variance_mean: float  # design average of sigma_sq
    sigma_star: float           # max(1, realized max of sigma_sq)

    def __post_init__(self):
        if self.y.shape != (self.grid.n,) or self.sigma_sq.shape != (self.grid.n,):
            raise DimensionError("sample vectors must match the grid size")


def generate_sample(
    signal: SignalSpec,
    vol: VolatilitySpec,
    noise: NoiseSpec,
    grid: DesignGrid,
    seed: int,
) -> Sample:
    """Draw y_l = S(x_l) + sigma_l * xi_l with a fresh generator for the seed."""
    rng = np.random.default_rng(seed)
    s_vals = signal.values(grid)
    sigma_sq = volatility_values(vol, signal, grid)
    xi = noise.draw(rng, grid.n)
    y = s_vals + np.sqrt(sigma_sq) * xi
    mean_var = math.fsum(sigma_sq) / grid.n
    sigma_star = vol.sigma_star
    if sigma_star is None:
        sigma_star = max(1.0, float(sigma_sq.max()))
    return Sample(
        grid=grid,
        y=y,
        truth=signal,
        sigma_sq=sigma_sq,
        noise_variance_mean=mean_var,
        sigma_star=float(sigma_star),
    )
