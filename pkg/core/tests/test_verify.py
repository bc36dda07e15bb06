from django.test import SimpleTestCase
import numpy as np

from core import verify
from core.exceptions import GramNotPSD, HypothesisNotMet, PairNotInX, SpecInvalid
from core.graphwords import SimplicialGraph
from core.staralg import GraphProduct, MatrixAlgebra, ThetaSpec, random_theta
from core.verify import WordFamily


def first_instance(finder, spec, seeds=range(10), **kwargs):
    for seed in seeds:
        try:
            return finder(spec, np.random.default_rng(seed), **kwargs)
        except HypothesisNotMet:
            continue
    raise AssertionError("no instance found for any seed")


class GramTests(SimpleTestCase):
    def setUp(self):
        self.spec = random_theta(SimplicialGraph.path(3), 2, seed=11)
        self.fam = WordFamily.from_words(self.spec.product, [(0, 2), (1, 0)], np.random.default_rng(2))

    def test_family_is_a_complete_closure(self):
        self.assertEqual(self.fam.words[0], ())
        self.assertEqual(len(self.fam.words), 7)
        self.assertIn(((0, 0), (2, 1)), self.fam.words)
        self.assertIn(((0, 2), (1, 3)), self.fam.words)
        self.assertEqual(self.fam.generators(), [(0, 0), (0, 2), (1, 3), (2, 1)])

    def test_each_occurrence_gets_its_own_letter(self):
        spec = random_theta(SimplicialGraph.edgeless(2), 2, seed=3)
        fam = WordFamily.from_words(spec.product, [(0, 1, 0)], np.random.default_rng(1))
        self.assertEqual(fam.generators(), [(0, 0), (0, 2), (1, 1)])
        self.assertIn(((1, 1), (0, 2)), fam.words)
        self.assertFalse(np.allclose(fam.letters[0], fam.letters[2]))
        verdict = verify.check_compression(verify.build_concat_space(spec, fam), spec, fam)
        self.assertTrue(verdict.passed, verdict)

    def test_gram_is_psd_and_hermitian(self):
        report = verify.gram(self.spec, self.fam)
        self.assertTrue(report.passed, report.verdict)
        np.testing.assert_allclose(report.matrix, report.matrix.conj().T, atol=1e-12)
        np.testing.assert_allclose(report.block_of(0, 0), np.eye(4), atol=1e-12)

    def test_concatenation_space(self):
        cs = verify.build_concat_space(self.spec, self.fam)
        self.assertLess(cs.isometry_residual, 1e-8)
        self.assertLess(cs.factor_residual, 1e-8)
        verdict = verify.check_compression(cs, self.spec, self.fam)
        self.assertTrue(verdict.passed, verdict)
        self.assertEqual(sorted(cs.L), self.fam.generators())
        for x in self.fam.generators():
            self.assertTrue(verify.check_lx_bound(cs, x).passed)

    def test_schwarz_pairs(self):
        self.assertIn(((), ()), verify.schwarz_pairs(self.fam))
        pairs = verify.schwarz_pairs(self.fam, frozenset({0}))
        self.assertEqual(len(pairs), 7)
        self.assertIn((((2, 1),), ((0, 0),)), pairs)
        self.assertIn((((1, 3),), ((0, 2),)), pairs)
        self.assertNotIn((((1, 3),), ((0, 0),)), pairs)

    def test_schwarz_inequality(self):
        pairs = verify.schwarz_pairs(self.fam, frozenset({0}))
        verdict = verify.check_schwarz(self.spec, self.fam, pairs)
        self.assertTrue(verdict.passed, verdict)
        self.assertLess(verdict.detail['factorization'], 1e-9)
        self.assertLess(verdict.detail['decomposition'], 1e-8)

    def test_schwarz_rejects_a_vertex_shared_by_c_and_b(self):
        pairs = [(((0, 0),), ()), ((), ((0, 0),))]
        with self.assertRaises(HypothesisNotMet):
            verify.check_schwarz(self.spec, self.fam, pairs)

    def test_schwarz_rejects_pairs_outside_the_family(self):
        with self.assertRaises(PairNotInX):
            verify.check_schwarz(self.spec, self.fam, [(((0, 0), (1, 3), (2, 1)), ())])
        with self.assertRaises(PairNotInX):
            verify.check_schwarz(self.spec, self.fam, [(((1, 3),), ((0, 0),))])

    def test_invalid_families(self):
        letters = tuple(A.random_centered(np.random.default_rng(0)) for A in self.spec.product.algebras)
        with self.assertRaises(SpecInvalid):
            WordFamily(self.spec.product, (((0, 0),),), letters)
        with self.assertRaises(SpecInvalid):
            WordFamily(self.spec.product, ((), ((0, 0), (2, 1))), letters)
        with self.assertRaises(SpecInvalid):
            WordFamily(self.spec.product, ((), ((0, 0),), ((1, 0),)), letters)


class NotCompletelyPositiveTests(SimpleTestCase):
    def test_transpose_map_gives_a_non_psd_gram(self):
        product = GraphProduct(SimplicialGraph.edgeless(1), (MatrixAlgebra(2),))
        spec = ThetaSpec(product, (lambda a: np.asarray(a).T,), 2)
        e12 = np.array([[0, 1], [0, 0]], dtype=complex)
        fam = WordFamily.from_words(product, [(0,)], np.random.default_rng(0), letters=(e12,))
        report = verify.gram(spec, fam)
        self.assertFalse(report.passed)
        self.assertLess(report.lambda_min, 0)
        with self.assertRaises(GramNotPSD):
            verify.build_concat_space(spec, fam, report)


class LemmaTests(SimpleTestCase):
    def setUp(self):
        self.spec = random_theta(SimplicialGraph.edgeless(3), 2, seed=5)

    def test_x1_factorization(self):
        inst = first_instance(verify.find_x1_instance, self.spec)
        verdict = verify.check_lemma_x1(self.spec, inst)
        self.assertTrue(verdict.passed, verdict)

    def test_y1_factorization(self):
        inst = first_instance(verify.find_y1_instance, self.spec)
        verdict = verify.check_lemma_y1(self.spec, inst)
        self.assertTrue(verdict.passed, verdict)
        self.assertGreater(verdict.detail['nc'], 0)

    def test_technical_inequality(self):
        spec = random_theta(SimplicialGraph.path(3), 2, seed=9)
        v0, y, a = first_instance(verify.find_techlem_instance, spec)
        verdict = verify.check_techlem(spec, v0, y, a)
        self.assertTrue(verdict.passed, verdict)

    def test_y1_square(self):
        instances = first_instance(verify.find_y1_square_instances, self.spec)
        verdict = verify.check_y1_square(self.spec, instances)
        self.assertTrue(verdict.passed, verdict)

    def test_y1_square_instances_are_distinct(self):
        instances = first_instance(verify.find_y1_square_instances, self.spec, n=4)
        words = [std.word for std, _ in instances]
        self.assertEqual(len(set(words)), len(words))
        self.assertEqual(len({std.y for std, _ in instances}), 1)

    def test_y1_square_needs_instances(self):
        with self.assertRaises(HypothesisNotMet):
            verify.check_y1_square(self.spec, [])

    def test_main_decomposition(self):
        fam = WordFamily.from_words(self.spec.product, [(0, 1, 0), (2, 0)], np.random.default_rng(4))
        verdict = verify.check_main_decomposition(self.spec, fam, 0)
        self.assertTrue(verdict.passed, verdict)


class DegenerationTests(SimpleTestCase):
    def test_complete_graph(self):
        spec = random_theta(SimplicialGraph.complete(2), 2, seed=3)
        fam = WordFamily.from_words(spec.product, [(0, 1)], np.random.default_rng(1))
        verdict = verify.degeneration_suite(spec, fam)
        self.assertTrue(verdict.passed, verdict)
        self.assertEqual(verdict.detail['case'], 'complete')

    def test_edgeless_graph_matches_the_free_product(self):
        spec = random_theta(SimplicialGraph.edgeless(2), 2, seed=3)
        fam = WordFamily.from_words(spec.product, [(0, 1, 0)], np.random.default_rng(1))
        verdict = verify.degeneration_suite(spec, fam)
        self.assertTrue(verdict.passed, verdict)
        self.assertEqual(verdict.detail['case'], 'edgeless')

    def test_other_graphs_are_rejected(self):
        spec = random_theta(SimplicialGraph.path(3), 2, seed=3)
        fam = WordFamily.from_words(spec.product, [(0,)], np.random.default_rng(1))
        with self.assertRaises(HypothesisNotMet):
            verify.degeneration_suite(spec, fam)
