import itertools
import math

import numpy as np
import pytest

from fermidpp.errors import ConfigurationError, PreconditionError
from fermidpp.linalg import (
    SkewSymmetricMatrix,
    SpectralDecomposition,
    SymmetricOperator,
    apply_spectral_function,
    determinant,
    eig_sym,
    near_zero_flags,
    pfaffian,
    spectral_function,
)


def random_symmetric(n, rng, scale=1.0):
    A = rng.standard_normal((n, n)) * scale
    return 0.5 * (A + A.T)


def random_skew(n, rng, scale=1.0):
    A = rng.standard_normal((n, n)) * scale
    return A - A.T


def det_cofactor(A):
    """Brute-force cofactor expansion, for dims <= 6."""
    n = A.shape[0]
    if n == 0:
        return 1.0
    if n == 1:
        return A[0, 0]
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(A, 0, axis=0), j, axis=1)
        total += (-1.0) ** j * A[0, j] * det_cofactor(minor)
    return total


def pfaffian_matchings(A):
    """Sum over perfect matchings with crossing signs, for dims <= 12."""
    n = A.shape[0]
    if n == 0:
        return 1.0

    def rec(indices):
        if not indices:
            return 1.0
        i = indices[0]
        total = 0.0
        for pos, j in enumerate(indices[1:], start=1):
            rest = indices[1:pos] + indices[pos + 1:]
            sign = (-1.0) ** (pos - 1)
            total += sign * A[i, j] * rec(rest)
        return total

    return rec(tuple(range(n)))


class TestSymmetricOperator:
    def test_rejects_asymmetric(self):
        with pytest.raises(PreconditionError):
            SymmetricOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_nonfinite(self):
        with pytest.raises(PreconditionError):
            SymmetricOperator(np.array([[np.inf, 0.0], [0.0, 0.0]]))

    def test_rejects_bad_labels(self):
        A = np.eye(2)
        with pytest.raises(PreconditionError):
            SymmetricOperator(A, site_labels=(0.25, 1.0))
        with pytest.raises(PreconditionError):
            SymmetricOperator(A, site_labels=(1.0, 0.0))
        with pytest.raises(PreconditionError):
            SymmetricOperator(A, site_labels=(0.0,))

    def test_half_integer_labels_accepted(self):
        op = SymmetricOperator(np.eye(3), site_labels=(-1.5, -0.5, 0.5))
        assert op.dim == 3
        assert op.site_labels == (-1.5, -0.5, 0.5)


class TestEigSym:
    def test_identity(self):
        dec = eig_sym(np.eye(3))
        np.testing.assert_allclose(dec.eigenvalues, np.ones(3))

    def test_diagonal_sorted(self):
        dec = eig_sym(np.diag([2.0, -1.0]))
        np.testing.assert_allclose(dec.eigenvalues, [-1.0, 2.0])
        # sign convention: dominant entry of each column positive
        assert dec.eigenvectors[1, 0] == 1.0
        assert dec.eigenvectors[0, 1] == 1.0

    @pytest.mark.parametrize("n", [2, 5, 8, 17, 32])
    def test_reconstruction_residual(self, n):
        rng = np.random.default_rng(100 + n)
        A = random_symmetric(n, rng, scale=3.0)
        dec = eig_sym(A)
        recon = (dec.eigenvectors * dec.eigenvalues) @ dec.eigenvectors.T
        assert np.max(np.abs(recon - A)) <= 8e-10
        assert np.max(np.abs(dec.eigenvectors.T @ dec.eigenvectors - np.eye(n))) <= 1e-10

    def test_deterministic(self):
        rng = np.random.default_rng(7)
        A = random_symmetric(12, rng)
        d1 = eig_sym(A)
        d2 = eig_sym(A.copy())
        assert np.array_equal(d1.eigenvalues, d2.eigenvalues)
        assert np.array_equal(d1.eigenvectors, d2.eigenvectors)

    def test_empty(self):
        dec = eig_sym(np.zeros((0, 0)))
        assert dec.dim == 0


class TestSpectralFunctions:
    def test_unknown_tag(self):
        with pytest.raises(ConfigurationError):
            spectral_function("sinh", c=1.0)

    def test_unknown_param(self):
        with pytest.raises(ConfigurationError):
            spectral_function("exp", c=1.0, gamma=2.0)

    def test_fermi_requires_positive_beta(self):
        with pytest.raises(ConfigurationError):
            spectral_function("fermi", beta=-1.0)
        with pytest.raises(ConfigurationError):
            spectral_function("fermi", beta=math.inf)

    def test_exp_zero_is_identity(self):
        rng = np.random.default_rng(3)
        dec = eig_sym(random_symmetric(6, rng))
        out = apply_spectral_function(dec, "exp", c=0.0)
        np.testing.assert_allclose(out.entries, np.eye(6), atol=1e-12)

    def test_indicator_on_diagonal(self):
        dec = eig_sym(np.diag([-1.0, 2.0]))
        out = apply_spectral_function(dec, "indicator_negative")
        np.testing.assert_allclose(out.entries, np.diag([1.0, 0.0]), atol=1e-14)

    def test_fermi_frozen_values(self):
        dec = eig_sym(np.diag([-1.0, 1.0]))
        out = apply_spectral_function(dec, "fermi", beta=math.log(3.0))
        np.testing.assert_allclose(out.entries, np.diag([0.75, 0.25]), atol=1e-14)

    def test_exp_inverse_property(self):
        # residual is scaled by e^{c(lam_max - lam_min)}, the conditioning of
        # the product; the identity is clean only relative to that factor
        rng = np.random.default_rng(11)
        for n, c in [(4, 2.0), (9, -3.0), (16, 1.3)]:
            A = random_symmetric(n, rng)
            A *= 20.0 / (np.abs(c) * np.linalg.norm(A, 2))
            dec = eig_sym(A)
            fwd = apply_spectral_function(dec, "exp", c=c).entries
            back = apply_spectral_function(dec, "exp", c=-c).entries
            spread = np.exp(abs(c) * (dec.eigenvalues[-1] - dec.eigenvalues[0]))
            resid = np.max(np.abs(fwd @ back - np.eye(n)))
            assert resid <= 1e-9 * spread

    def test_exp_inverse_property_moderate_norm(self):
        rng = np.random.default_rng(12)
        for n in [4, 9, 16]:
            A = random_symmetric(n, rng)
            A *= 5.0 / np.linalg.norm(A, 2)
            dec = eig_sym(A)
            fwd = apply_spectral_function(dec, "exp", c=1.0).entries
            back = apply_spectral_function(dec, "exp", c=-1.0).entries
            assert np.max(np.abs(fwd @ back - np.eye(n))) <= 1e-9

    def test_fermi_extreme_beta_no_overflow(self):
        f = spectral_function("fermi", beta=1e4)
        vals = f(np.array([-2.0, -1e-3, 1e-3, 2.0]))
        assert np.all(np.isfinite(vals))
        assert np.all((vals >= 0.0) & (vals <= 1.0))
        assert vals[0] == 1.0 and vals[-1] == 0.0

    def test_fermi_monotone_decreasing(self):
        f = spectral_function("fermi", beta=2.5)
        lam = np.linspace(-5, 5, 41)
        vals = f(lam)
        assert np.all(np.diff(vals) <= 0)

    def test_fermi_shift(self):
        f = spectral_function("fermi", beta=1.0, shift=2.0)
        assert f(np.array([2.0]))[0] == 0.5

    def test_near_zero_flagging(self):
        lam = np.array([-5.0, -1e-12, 3e-11, 1.0])
        flags = near_zero_flags(lam)
        assert list(flags) == [False, True, True, False]
        f = spectral_function("indicator_negative")
        np.testing.assert_allclose(f(lam), [1.0, 0.0, 0.0, 0.0])


class TestDeterminant:
    def test_empty(self):
        assert determinant(np.zeros((0, 0))) == 1.0

    def test_two_by_two(self):
        assert abs(determinant(np.array([[1.0, 2.0], [3.0, 4.0]])) + 2.0) < 1e-14

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_cofactor_expansion(self, seed):
        rng = np.random.default_rng(300 + seed)
        A = rng.standard_normal((6, 6))
        assert abs(determinant(A) - det_cofactor(A)) <= 1e-9


class TestPfaffian:
    def test_single_block(self):
        A = np.array([[0.0, 2.5], [-2.5, 0.0]])
        assert pfaffian(A) == 2.5

    def test_zero_matrix(self):
        assert pfaffian(np.zeros((4, 4))) == 0.0

    def test_odd_dimension_rejected(self):
        with pytest.raises(PreconditionError):
            pfaffian(SkewSymmetricMatrix(np.zeros((3, 3))))

    def test_empty(self):
        assert pfaffian(np.zeros((0, 0))) == 1.0

    def test_four_by_four_formula(self):
        rng = np.random.default_rng(17)
        A = random_skew(4, rng)
        expected = A[0, 1] * A[2, 3] - A[0, 2] * A[1, 3] + A[0, 3] * A[1, 2]
        assert abs(pfaffian(A) - expected) <= 1e-12 * (1 + abs(expected))

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_square_is_determinant(self, n):
        rng = np.random.default_rng(400 + n)
        A = random_skew(2 * n, rng)
        pf = pfaffian(A)
        det = determinant(A)
        assert abs(pf * pf - det) <= 1e-9 * max(1.0, abs(det))

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_matches_matching_expansion(self, n):
        rng = np.random.default_rng(500 + n)
        A = random_skew(2 * n, rng)
        expected = pfaffian_matchings(A)
        assert abs(pfaffian(A) - expected) <= 1e-9 * max(1.0, abs(expected))

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_block_reduction_to_determinant(self, n):
        # skew matrix of 2x2 blocks with zero (1,1)/(2,2) scalar entries:
        # entry (2i, 2j+1) = B[i, j], entry (2i+1, 2j) = -B[j, i]
        rng = np.random.default_rng(600 + n)
        B = rng.standard_normal((n, n))
        A = np.zeros((2 * n, 2 * n))
        for i, j in itertools.product(range(n), range(n)):
            A[2 * i, 2 * j + 1] = B[i, j]
            A[2 * i + 1, 2 * j] = -B[j, i]
        expected = determinant(B)
        assert abs(pfaffian(A) - expected) <= 1e-9 * max(1.0, abs(expected))


class TestSpectralDecompositionValidation:
    def test_rejects_unsorted(self):
        with pytest.raises(PreconditionError):
            SpectralDecomposition(np.array([2.0, -1.0]), np.eye(2))

    def test_rejects_nonorthonormal(self):
        from fermidpp.errors import NumericalFailureError

        with pytest.raises(NumericalFailureError):
            SpectralDecomposition(np.array([1.0, 2.0]), np.array([[1.0, 1.0], [0.0, 1.0]]))
