from django.test import SimpleTestCase
import numpy as np

from core import dilate
from core.exceptions import HypothesisNotMet, NotContraction, NotDoublyCommuting
from core.graphwords import SimplicialGraph
from core.mathcore import random_contraction
from core.staralg import LaurentAlgebra


class DilationTests(SimpleTestCase):
    def setUp(self):
        self.T = random_contraction(3, np.random.default_rng(0))

    def test_halmos_dilation(self):
        U = dilate.halmos(self.T)
        np.testing.assert_allclose(U.conj().T @ U, np.eye(6), atol=1e-9)
        np.testing.assert_allclose(U[:3, :3], self.T)

    def test_n_dilation_reproduces_powers(self):
        dil = dilate.egervary(self.T, 3)
        self.assertEqual(dil.U.shape, (12, 12))
        self.assertLess(dil.unitarity_residual(), 1e-9)
        self.assertLess(dil.power_residual(self.T), 1e-9)

    def test_degree_zero_dilation_is_rejected(self):
        with self.assertRaises(HypothesisNotMet):
            dilate.egervary(self.T, 0)
        self.assertEqual(dilate.egervary(self.T, 1).U.shape, (6, 6))

    def test_contraction_required(self):
        with self.assertRaises(NotContraction):
            dilate.halmos(2 * np.eye(2))


class GraphDilationTests(SimpleTestCase):
    def test_doubly_commuting_contractions(self):
        g = SimplicialGraph.path(3)
        Ts = dilate.random_doubly_commuting(g, 2, seed=1)
        dilate.check_doubly_commuting(g, Ts)
        with self.assertRaises(NotDoublyCommuting):
            rng = np.random.default_rng(2)
            dilate.check_doubly_commuting(SimplicialGraph.complete(2), [random_contraction(2, rng) for _ in range(2)])

    def test_dilation_gram_is_psd(self):
        g = SimplicialGraph.path(3)
        Ts = dilate.random_doubly_commuting(g, 2, seed=3)
        report, verdict = dilate.check_dilation_gram(g, Ts, [(0, 2), (1,)], seed=4)
        self.assertTrue(verdict.passed, verdict)
        self.assertEqual(verdict.detail['words'], len(report.words))

    def test_monomial_ball(self):
        self.assertEqual(dilate.monomial_ball(SimplicialGraph.edgeless(1), 2), [(), ((0, -1),), ((0, 1),), ((0, -2),), ((0, 2),)])
        g = SimplicialGraph.complete(2)
        self.assertEqual(dilate.monomial_mul(g, ((1, 1),), ((0, 1),)), ((0, 1), (1, 1)))
        self.assertEqual(dilate.monomial_mul(g, ((0, 1),), ((0, -1),)), ())

    def test_polynomial_evaluation(self):
        Ts = (np.diag([0.5, 0.25]), np.diag([0.1, 0.2]))
        p = [(2.0, ()), (1.0, (0, 1))]
        np.testing.assert_allclose(dilate.evaluate_polynomial(Ts, p), np.diag([2.05, 2.05]))

    def test_von_neumann_surrogate(self):
        g = SimplicialGraph.complete(2)
        Ts = dilate.random_doubly_commuting(g, 2, seed=5)
        poly = dilate.random_polynomial(g, np.random.default_rng(6), degree=2)
        report = dilate.vn_surrogate(g, Ts, poly, radius=2)
        self.assertTrue(report.verdict.passed, report.verdict)
        self.assertLessEqual(report.norm_pT, report.norm_pL * (1 + 1e-6) + 1e-12)

    def test_radius_below_degree(self):
        g = SimplicialGraph.edgeless(2)
        Ts = dilate.random_doubly_commuting(g, 2, seed=5)
        with self.assertRaises(HypothesisNotMet):
            dilate.vn_surrogate(g, Ts, [(1.0, (0, 1, 0))], radius=2)

    def test_independence_of_fock_contractions(self):
        system = dilate.IndependentContractions(SimplicialGraph.edgeless(2), 2, seed=7, cutoff=4)
        for word in ((0, 1), (0, 1, 0)):
            verdict = dilate.check_gp_independence_of_dilation(system, word, seed=8)
            self.assertTrue(verdict.passed, verdict)
            self.assertLess(verdict.residual, 1e-9)
        with self.assertRaises(HypothesisNotMet):
            dilate.check_gp_independence_of_dilation(system, (0, 0), seed=8)

    def test_independence_needs_room_in_the_fock_space(self):
        system = dilate.IndependentContractions(SimplicialGraph.edgeless(2), 2, seed=7, cutoff=3)
        with self.assertRaises(HypothesisNotMet):
            dilate.check_gp_independence_of_dilation(system, (0, 1, 0), seed=8)
        with self.assertRaises(HypothesisNotMet):
            dilate.check_gp_independence_surrogate(system, (0, 1, 0), seed=8)

    def test_independence_through_translations(self):
        system = dilate.IndependentContractions(SimplicialGraph.edgeless(2), 2, seed=7, cutoff=4)
        for word, size in (((0, 1), 7), ((1, 0, 1), 15)):
            verdict = dilate.check_gp_independence_surrogate(system, word, seed=9)
            self.assertTrue(verdict.passed, verdict)
            self.assertEqual(verdict.detail['suffixes'], size)
            self.assertLess(verdict.detail['compression'], 1e-8)

    def test_translation_letters_are_doubly_centered(self):
        A = LaurentAlgebra(2)
        tau = 0.3 - 0.2j
        a = dilate.centered_degree_one(A, tau, np.random.default_rng(0))
        self.assertEqual(A.state(a), 0)
        self.assertAlmostEqual(a[3] * tau + a[1] * np.conj(tau), 0)
