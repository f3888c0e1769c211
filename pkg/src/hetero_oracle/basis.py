"""Trigonometric basis on the uniform design grid.

The basis is the constant function together with scaled cosines and sines
at integer frequencies: index 1 maps to 1, even indices to sqrt(2)*cos,
odd indices >= 3 to sqrt(2)*sin.  On a uniform grid x_l = l/n with odd n
the first n basis functions are exactly orthonormal for the empirical
inner product (1/n) sum f(x_l) g(x_l), so the coefficient transform below
is invertible on the grid and Parseval holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionError, DomainError

SQRT2 = float(np.sqrt(2.0))
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class DesignGrid:
    """Uniform design x_l = l/n, l = 1..n, with odd sample size n.

    Even n is rejected outright: orthonormality of the basis fails on even
    grids and silently adjusting n would corrupt downstream experiments.
    """

    n: int
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)):
            raise DomainError(f"sample size must be an integer, got {n!r}")
        if n < 3:
            raise DomainError(f"sample size must be >= 3, got {n}")
        if n % 2 == 0:
            raise DomainError(
                f"sample size must be odd, got {n}; choose how to oddify at the call site"
            )
        pts = np.arange(1, n + 1, dtype=float) / n
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


def basis_function(j, x):
    """Evaluate basis function j at x (scalar or array), x in [0, 1].

    j = 1 is the constant 1; even j is sqrt(2)*cos(2*pi*(j//2)*x); odd
    j >= 3 is sqrt(2)*sin(2*pi*(j//2)*x).
    """
    if j < 1:
        raise DomainError(f"basis index must be >= 1, got {j}")
    x = np.asarray(x, dtype=float)
    if j == 1:
        out = np.ones_like(x)
    elif j % 2 == 0:
        out = SQRT2 * np.cos(TWO_PI * (j // 2) * x)
    else:
        out = SQRT2 * np.sin(TWO_PI * (j // 2) * x)
    return out if out.ndim else float(out)


def basis_matrix_at(x, n: int) -> np.ndarray:
    """Matrix of basis values: entry (l, j-1) is basis function j at x[l]."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    freqs = np.arange(1, n + 1) // 2
    angles = TWO_PI * np.outer(x, freqs)
    out = np.empty((x.size, n))
    out[:, 0] = 1.0
    cols = np.arange(2, n + 1)
    even = cols % 2 == 0
    out[:, 1:][:, even] = SQRT2 * np.cos(angles[:, 1:][:, even])
    out[:, 1:][:, ~even] = SQRT2 * np.sin(angles[:, 1:][:, ~even])
    return out


@lru_cache(maxsize=8)
def _basis_matrix_cached(n: int) -> np.ndarray:
    pts = np.arange(1, n + 1, dtype=float) / n
    mat = basis_matrix_at(pts, n)
    mat.setflags(write=False)
    return mat


def basis_matrix(grid: DesignGrid) -> np.ndarray:
    """n-by-n matrix of the first n basis functions on the design grid."""
    return _basis_matrix_cached(grid.n)


def centered_sq_matrix(x, n: int) -> np.ndarray:
    """Values of (basis function)^2 - 1 for indices 1..n at the points x.

    Uses the double-angle identities: the column for index 1 is zero, an
    even index j gives cos(2*pi*j*x) and an odd index j gives
    -cos(2*pi*(j-1)*x), so consecutive even/odd columns cancel exactly.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((x.size, n))
    out[:, 0] = 0.0
    for j in range(2, n + 1):
        freq = j if j % 2 == 0 else j - 1
        vals = np.cos(TWO_PI * freq * x)
        out[:, j - 1] = vals if j % 2 == 0 else -vals
    return out


def empirical_inner(f, g, grid: DesignGrid) -> float:
    """Empirical inner product (1/n) sum_l f(x_l) g(x_l)."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != (grid.n,) or g.shape != (grid.n,):
        raise DimensionError(
            f"expected two length-{grid.n} vectors, got shapes {f.shape} and {g.shape}"
        )
    return float(f @ g) / grid.n


def dft(y, grid: DesignGrid) -> np.ndarray:
    """Coefficients of y in the basis: entry j-1 is (y, basis_j)_n.

    Computed as n direct inner products; at desk scale (n up to ~10^3)
    exact orthonormality matters more than transform speed.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (grid.n,):
        raise DimensionError(f"expected a length-{grid.n} vector, got shape {y.shape}")
    return basis_matrix(grid).T @ y / grid.n


def reconstruct(theta, weights, x):
    """Evaluate the weighted expansion sum_j weights[j] * theta[j] * basis_j(x)."""
    theta = np.asarray(theta, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if theta.shape != weights.shape or theta.ndim != 1:
        raise DimensionError(
            f"coefficients and weights must be equal-length vectors, got "
            f"shapes {theta.shape} and {weights.shape}"
        )
    coeffs = weights * theta
    scalar = np.ndim(x) == 0
    vals = basis_matrix_at(x, theta.size) @ coeffs
    return float(vals[0]) if scalar else vals
