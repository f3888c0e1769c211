"""Basis, empirical inner product, coefficient transform, reconstruction."""

import math

import numpy as np
import pytest

from hetero_oracle import (
    DesignGrid,
    DimensionError,
    DomainError,
    basis_function,
    basis_matrix,
    basis_matrix_at,
    dft,
    empirical_inner,
    reconstruct,
)
from hetero_oracle.basis import centered_sq_matrix

SQRT2 = math.sqrt(2.0)


class TestDesignGrid:
    def test_points_are_exact_fractions(self):
        grid = DesignGrid(101)
        np.testing.assert_array_equal(grid.points, np.arange(1, 102) / 101.0)
        assert grid.points[0] == 1.0 / 101.0
        assert grid.points[-1] == 1.0

    def test_even_size_rejected(self):
        with pytest.raises(DomainError):
            DesignGrid(100)

    def test_too_small_rejected(self):
        with pytest.raises(DomainError):
            DesignGrid(1)


class TestBasisFunction:
    def test_constant_member(self):
        assert basis_function(1, 0.3) == 1.0

    def test_first_cosine_at_zero(self):
        assert basis_function(2, 0.0) == pytest.approx(SQRT2, abs=1e-12)

    def test_first_sine_at_quarter(self):
        assert basis_function(3, 0.25) == pytest.approx(SQRT2, abs=1e-12)

    def test_zero_index_rejected(self):
        with pytest.raises(DomainError):
            basis_function(0, 0.5)

    def test_amplitude_bounded_by_sqrt2(self):
        x = np.linspace(0.0, 1.0, 10_000)
        for j in (2, 3, 8, 13, 50, 251):
            assert np.abs(basis_function(j, x)).max() <= SQRT2 + 1e-12

    def test_matches_matrix_construction(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(0.0, 1.0, size=40)
        mat = basis_matrix_at(x, 12)
        for j in range(1, 13):
            np.testing.assert_allclose(mat[:, j - 1], basis_function(j, x), atol=1e-14)


class TestEmpiricalInner:
    def test_unit_norm_of_cosine(self):
        grid = DesignGrid(5)
        phi2 = basis_function(2, grid.points)
        assert empirical_inner(phi2, phi2, grid) == pytest.approx(1.0, abs=1e-12)

    def test_cosine_sine_orthogonal(self):
        grid = DesignGrid(5)
        phi2 = basis_function(2, grid.points)
        phi3 = basis_function(3, grid.points)
        assert empirical_inner(phi2, phi3, grid) == pytest.approx(0.0, abs=1e-12)

    def test_zero_vectors(self):
        grid = DesignGrid(5)
        z = np.zeros(5)
        assert empirical_inner(z, z, grid) == 0.0

    def test_length_mismatch_rejected(self):
        grid = DesignGrid(5)
        with pytest.raises(DimensionError):
            empirical_inner(np.zeros(4), np.zeros(5), grid)


class TestOrthonormality:
    @pytest.mark.parametrize("n", [5, 51, 101])
    def test_gram_matrix_is_identity(self, n):
        grid = DesignGrid(n)
        mat = basis_matrix(grid)
        gram = mat.T @ mat / n
        assert np.abs(gram - np.eye(n)).max() < 1e-9


class TestTransform:
    def test_constant_signal_loads_first_coefficient(self):
        grid = DesignGrid(7)
        coeffs = dft(np.full(7, 2.5), grid)
        expected = np.zeros(7)
        expected[0] = 2.5
        np.testing.assert_allclose(coeffs, expected, atol=1e-12)

    def test_basis_vector_maps_to_unit_vector(self):
        # oracle: brute-force inner products against every basis column
        grid = DesignGrid(11)
        mat = basis_matrix(grid)
        y = basis_function(3, grid.points)
        brute = np.array([np.sum(y * mat[:, j]) / grid.n for j in range(grid.n)])
        coeffs = dft(y, grid)
        np.testing.assert_allclose(coeffs, brute, atol=1e-12)
        expected = np.zeros(11)
        expected[2] = 1.0
        np.testing.assert_allclose(coeffs, expected, atol=1e-10)

    def test_round_trip_reproduces_signal(self):
        grid = DesignGrid(51)
        rng = np.random.default_rng(11)
        y = rng.standard_normal(51)
        back = reconstruct(dft(y, grid), np.ones(51), grid.points)
        np.testing.assert_allclose(back, y, atol=1e-10)

    def test_parseval_on_grid(self):
        grid = DesignGrid(101)
        rng = np.random.default_rng(4)
        y = rng.standard_normal(101)
        coeffs = dft(y, grid)
        assert np.sum(coeffs**2) == pytest.approx(np.mean(y**2), abs=1e-9)

    def test_length_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            dft(np.zeros(5), DesignGrid(7))


class TestReconstruct:
    def test_zero_coefficients(self):
        theta = np.zeros(9)
        assert reconstruct(theta, np.ones(9), 0.37) == 0.0

    def test_constant_coefficient(self):
        theta = np.zeros(9)
        theta[0] = 1.0
        for x in (0.0, 0.31, 1.0):
            assert reconstruct(theta, np.ones(9), x) == pytest.approx(1.0, abs=1e-14)

    def test_weighted_cosine_at_origin(self):
        theta = np.zeros(9)
        theta[1] = 1.0
        weights = np.ones(9)
        weights[1] = 0.5
        assert reconstruct(theta, weights, 0.0) == pytest.approx(0.5 * SQRT2, abs=1e-14)

    def test_length_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            reconstruct(np.zeros(5), np.ones(6), 0.2)


class TestCenteredSquares:
    def test_matches_direct_definition(self):
        """Trig-identity fast path equals basis^2 - 1 computed directly."""
        rng = np.random.default_rng(8)
        x = rng.uniform(0.0, 1.0, size=64)
        n = 17
        fast = centered_sq_matrix(x, n)
        for j in range(1, n + 1):
            direct = basis_function(j, x) ** 2 - 1.0
            np.testing.assert_allclose(fast[:, j - 1], direct, atol=1e-12)

    def test_full_odd_sum_cancels(self):
        x = np.linspace(0.0, 1.0, 2000)
        total = centered_sq_matrix(x, 101).sum(axis=1)
        assert np.abs(total).max() == 0.0
