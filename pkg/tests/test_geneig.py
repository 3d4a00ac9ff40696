import numpy as np
import pytest
from numpy.testing import assert_allclose

from robustkcca.exceptions import NumericalError
from robustkcca.geneig import sym_gen_eig

from conftest import random_spd


def dense_reduction_oracle(A, B):
    """Eigenvalues through an explicit B^{-1/2}, independent of Cholesky."""
    A = 0.5 * (A + A.T)
    vals, Q = np.linalg.eigh(0.5 * (B + B.T))
    B_inv_half = (Q / np.sqrt(vals)) @ Q.T
    return np.sort(np.linalg.eigvalsh(B_inv_half @ A @ B_inv_half))[::-1]


class TestSymGenEig:
    def test_identity_pencil(self, rng):
        B = random_spd(rng, 5)
        res = sym_gen_eig(B, B, ncomp=5)
        assert_allclose(res.values, np.ones(5), atol=1e-10)

    def test_diagonal_pencil(self):
        res = sym_gen_eig(np.diag([4.0, 1.0]), np.diag([2.0, 1.0]), ncomp=2)
        assert_allclose(res.values, [2.0, 1.0], atol=1e-12)
        # vectors axis-aligned
        assert abs(res.vectors[1, 0]) < 1e-12
        assert abs(res.vectors[0, 1]) < 1e-12

    def test_matches_dense_oracle(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 15))
            A = rng.normal(size=(n, n))
            A = A + A.T
            B = random_spd(rng, n)
            res = sym_gen_eig(A, B, ncomp=n)
            assert_allclose(res.values, dense_reduction_oracle(A, B), atol=1e-8)

    def test_residuals_small(self, rng):
        n = 10
        A = rng.normal(size=(n, n))
        A = A + A.T
        B = random_spd(rng, n)
        res = sym_gen_eig(A, B, ncomp=n)
        norm_a = np.linalg.norm(A)
        for k in range(n):
            resid = A @ res.vectors[:, k] - res.values[k] * (B @ res.vectors[:, k])
            assert np.linalg.norm(resid) <= 1e-6 * norm_a

    def test_b_normalization(self, rng):
        n = 8
        A = rng.normal(size=(n, n))
        A = A + A.T
        B = random_spd(rng, n)
        res = sym_gen_eig(A, B, ncomp=4)
        assert res.b_norm
        for k in range(4):
            v = res.vectors[:, k]
            assert abs(v @ B @ v - 1.0) < 1e-8

    def test_congruence_invariance(self, rng):
        n = 6
        A = rng.normal(size=(n, n))
        A = A + A.T
        B = random_spd(rng, n)
        base = sym_gen_eig(A, B, ncomp=n).values
        for _ in range(5):
            C = rng.normal(size=(n, n)) + 2 * np.eye(n)
            res = sym_gen_eig(C.T @ A @ C, C.T @ B @ C, ncomp=n)
            assert_allclose(res.values, base, atol=1e-7)

    def test_descending_order_and_ncomp(self, rng):
        A = rng.normal(size=(7, 7))
        A = A + A.T
        res = sym_gen_eig(A, np.eye(7), ncomp=3)
        assert res.values.shape == (3,)
        assert np.all(np.diff(res.values) <= 1e-12)

    def test_sign_convention(self, rng):
        A = rng.normal(size=(5, 5))
        A = A + A.T
        res = sym_gen_eig(A, random_spd(rng, 5), ncomp=5)
        for k in range(5):
            col = res.vectors[:, k]
            lead = col[np.abs(col) > 1e-12 * np.abs(col).max()][0]
            assert lead > 0

    def test_jitter_rescues_semidefinite_b(self):
        # B singular but PSD; a single jitter makes Cholesky succeed
        B = np.diag([1.0, 1.0, 0.0])
        A = np.eye(3)
        res = sym_gen_eig(A, B, ncomp=1)
        assert np.isfinite(res.values).all()

    def test_indefinite_b_rejected(self):
        B = np.diag([1.0, -5.0])
        with pytest.raises(NumericalError, match="singular"):
            sym_gen_eig(np.eye(2), B, ncomp=1)

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            sym_gen_eig(np.eye(3), np.eye(4))
        with pytest.raises(ValueError):
            sym_gen_eig(np.eye(3), np.eye(3), ncomp=9)
