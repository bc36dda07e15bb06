from django.test import SimpleTestCase
import numpy as np

from core.exceptions import DimensionMismatch, InvalidMatrix, NotHermitian, NotPSD
from core.mathcore import (
    Verdict, dagger, herm_eig, is_psd, kron_all, op_norm, psd_sqrt, random_contraction, random_density,
    random_isometry,
)


def random_hermitian(rng, n):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (Z + dagger(Z)) / 2


class HermEigTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(11)

    def test_eigenvalues_match_reference(self):
        for n in (1, 2, 5, 9):
            M = random_hermitian(self.rng, n)
            eig = herm_eig(M)
            np.testing.assert_allclose(eig.eigenvalues, np.linalg.eigvalsh(M), atol=1e-10)

    def test_eigenvectors_reconstruct_the_matrix(self):
        M = random_hermitian(self.rng, 7)
        eig = herm_eig(M)
        np.testing.assert_allclose(dagger(eig.eigenvectors) @ eig.eigenvectors, np.eye(7), atol=1e-10)
        np.testing.assert_allclose(eig.reconstruct(), M, atol=1e-10)

    def test_zero_matrix(self):
        eig = herm_eig(np.zeros((3, 3)))
        np.testing.assert_array_equal(eig.eigenvalues, np.zeros(3))

    def test_rejects_non_hermitian_input(self):
        with self.assertRaises(NotHermitian):
            herm_eig([[0.0, 1.0], [0.0, 0.0]])
        with self.assertRaises(NotHermitian):
            herm_eig(np.ones((2, 3)))

    def test_rejects_non_finite_input(self):
        with self.assertRaises(InvalidMatrix):
            herm_eig([[np.nan, 0.0], [0.0, 1.0]])


class PsdTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(5)

    def test_gram_matrices_are_psd(self):
        A = self.rng.standard_normal((5, 3)) + 1j * self.rng.standard_normal((5, 3))
        verdict = is_psd(A @ dagger(A))
        self.assertTrue(verdict.passed)
        self.assertLessEqual(verdict.residual, verdict.tol)

    def test_negative_eigenvalue_fails(self):
        verdict = is_psd(np.diag([1.0, -1e-3]))
        self.assertFalse(verdict.passed)
        self.assertAlmostEqual(verdict.min_eigenvalue, -1e-3)

    def test_tolerance_scales_with_largest_eigenvalue(self):
        self.assertTrue(is_psd(np.diag([1e6, -1e-3]), tol=1e-8).passed)
        self.assertFalse(is_psd(np.diag([1.0, -1e-3]), tol=1e-8).passed)

    def test_psd_sqrt(self):
        A = self.rng.standard_normal((4, 4)) + 1j * self.rng.standard_normal((4, 4))
        M = A @ dagger(A)
        R = psd_sqrt(M)
        np.testing.assert_allclose(R @ R, M, atol=1e-9)
        np.testing.assert_allclose(R, dagger(R), atol=1e-10)

    def test_psd_sqrt_rejects_indefinite(self):
        with self.assertRaises(NotPSD):
            psd_sqrt(np.diag([1.0, -1.0]))


class NormAndRandomTests(SimpleTestCase):
    def test_op_norm_matches_largest_singular_value(self):
        rng = np.random.default_rng(2)
        for shape in ((3, 3), (4, 2), (2, 5)):
            M = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            self.assertAlmostEqual(op_norm(M), np.linalg.norm(M, 2), places=10)

    def test_random_isometry(self):
        W = random_isometry(3, 7, seed=1)
        self.assertEqual(W.shape, (7, 3))
        np.testing.assert_allclose(dagger(W) @ W, np.eye(3), atol=1e-12)
        with self.assertRaises(DimensionMismatch):
            random_isometry(4, 2, seed=1)

    def test_random_density(self):
        rho = random_density(3, seed=4, rank=2)
        self.assertAlmostEqual(np.trace(rho).real, 1.0)
        np.testing.assert_allclose(rho, dagger(rho), atol=1e-14)
        self.assertTrue(is_psd(rho).passed)

    def test_random_contraction_has_requested_norm(self):
        self.assertAlmostEqual(op_norm(random_contraction(4, seed=5, norm=0.7)), 0.7, places=10)
        self.assertLessEqual(op_norm(random_contraction(3, seed=6)), 1.0 + 1e-12)

    def test_same_seed_same_draw(self):
        np.testing.assert_array_equal(random_isometry(2, 4, seed=9), random_isometry(2, 4, seed=9))

    def test_kron_all(self):
        self.assertEqual(kron_all([np.eye(2), np.eye(3)]).shape, (6, 6))
        self.assertEqual(kron_all([]).shape, (1, 1))

    def test_verdict_as_dict(self):
        doc = Verdict(True, 1e-12, 1e-9, {'k': 1}).as_dict()
        self.assertEqual(doc, {'passed': True, 'residual': 1e-12, 'tol': 1e-9, 'detail': {'k': 1}})
