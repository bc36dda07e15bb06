from django.test import SimpleTestCase

from core import graphwords
from core.exceptions import BadVertex, CapExceeded, GraphFormatError, VertexAbsent
from core.graphwords import SimplicialGraph


K2 = SimplicialGraph.complete(2)
E2 = SimplicialGraph.edgeless(2)
P3 = SimplicialGraph.path(3)


def normal_forms_up_to(g, max_len):
    """Every reduced normal form of length at most ``max_len``."""
    layer = {()}
    out = [()]
    for _ in range(max_len):
        layer = {graphwords.normal_form(g, w + (v,)) for w in layer for v in range(g.n_vertices)
                 if graphwords.is_reduced(g, w + (v,))}
        layer -= set(out)
        out.extend(sorted(layer))
    return out


class GraphTests(SimpleTestCase):
    def test_parse_text_format(self):
        g = SimplicialGraph.parse("# path\nn 3\ne 0 1\n\ne 2 1  # reversed\n")
        self.assertEqual(g, P3)
        self.assertTrue(g.adjacent(1, 2))
        self.assertFalse(g.adjacent(0, 2))
        self.assertEqual(SimplicialGraph.parse(g.to_text()), g)

    def test_parse_errors(self):
        with self.assertRaises(GraphFormatError):
            SimplicialGraph.parse("n 2\ne 0 0\n")
        with self.assertRaises(GraphFormatError):
            SimplicialGraph.parse("e 0 1\n")
        with self.assertRaises(GraphFormatError):
            SimplicialGraph.parse("n two\n")
        with self.assertRaises(BadVertex):
            SimplicialGraph.parse("n 2\ne 0 2\n")

    def test_all_graphs(self):
        self.assertEqual(len(list(SimplicialGraph.all_graphs(3))), 8)

    def test_greedy_coloring_is_proper(self):
        for g in (SimplicialGraph.cycle(5), SimplicialGraph.complete(4), P3):
            colors = g.greedy_coloring()
            for i, j in g.edges:
                self.assertNotEqual(colors[i], colors[j])


class WordTests(SimpleTestCase):
    def test_is_reduced(self):
        self.assertFalse(graphwords.is_reduced(K2, (0, 1, 0)))
        self.assertTrue(graphwords.is_reduced(E2, (0, 1, 0)))
        self.assertFalse(graphwords.is_reduced(E2, (1, 1)))
        self.assertTrue(graphwords.is_reduced(P3, (0, 2, 0)))

    def test_reduce_merges_equal_letters(self):
        self.assertEqual(graphwords.reduce(K2, (0, 0)), (0,))
        self.assertEqual(graphwords.reduce(K2, (0, 1, 0)), (1, 0))
        self.assertEqual(graphwords.reduce(E2, (0, 1, 0)), (0, 1, 0))

    def test_normal_form_is_least_representative(self):
        self.assertEqual(graphwords.normal_form(P3, (1, 0, 2)), (0, 1, 2))
        self.assertEqual(graphwords.normal_form(K2, (1, 0, 1)), (0, 1))
        w = (2, 1, 0, 2)
        cls = graphwords.equivalence_class(P3, graphwords.reduce(P3, w))
        self.assertEqual(graphwords.normal_form(P3, w), min(cls))

    def test_equivalence_class(self):
        self.assertEqual(graphwords.equivalence_class(P3, (1, 0, 2)), {(0, 1, 2), (1, 0, 2), (0, 2, 1)})
        with self.assertRaises(CapExceeded):
            graphwords.equivalence_class(P3, (1, 0, 2), cap=1)

    def test_bad_letters(self):
        with self.assertRaises(BadVertex):
            graphwords.normal_form(K2, (0, 2))

    def test_nc_length(self):
        self.assertEqual(graphwords.nc_length(P3, (0, 1, 2), 2), 1)
        self.assertEqual(graphwords.nc_length(P3, (1, 0, 2), 1), 0)
        self.assertEqual(graphwords.nc_length(P3, (0, 1, 2), 0), -1)
        self.assertEqual(graphwords.nc_length(E2, (1,), 0), -1)

    def test_nc_length_on_edgeless_graphs(self):
        for n in (1, 2, 3):
            g = SimplicialGraph.edgeless(n)
            for w in normal_forms_up_to(g, 5):
                for v0 in set(w):
                    expected = len(w) - 1 if w[-1] == v0 else -1
                    self.assertEqual(graphwords.nc_length(g, w, v0), expected, (w, v0))

    def test_truncations(self):
        self.assertEqual(graphwords.truncations(P3, (0, 1, 2)), {(1, 2), (0, 2), (0, 1)})
        self.assertEqual(graphwords.truncations(E2, (0, 1, 0)), {(1, 0), (0, 1)})

    def test_complete_closure(self):
        closure = graphwords.complete_closure(P3, [(1, 0, 2)])
        self.assertEqual(len(closure), 8)
        self.assertIn((), closure)
        self.assertTrue(graphwords.is_complete(P3, closure))
        self.assertFalse(graphwords.is_complete(P3, {(), (0, 1)}))
        self.assertTrue(graphwords.precedes(P3, (2,), (1, 0, 2)))
        self.assertFalse(graphwords.precedes(E2, (1, 0), (0, 1)))

    def test_merge_reduce_with_payloads(self):
        def mod3(v, p, q):
            r = (p + q) % 3
            return None if r == 0 else r

        self.assertEqual(graphwords.merge_reduce(E2, [(0, 1), (0, 2)], mod3), [])
        self.assertEqual(graphwords.merge_reduce(E2, [(0, 1), (1, 1), (0, 1)], mod3), [(0, 1), (1, 1), (0, 1)])
        self.assertEqual(graphwords.merge_reduce(K2, [(0, 1), (1, 1), (0, 1)], mod3), [(1, 1), (0, 2)])

    def test_sort_payload_keeps_payloads_with_their_letters(self):
        items = graphwords.sort_payload(P3, [(1, 'a'), (0, 'b'), (2, 'c')])
        self.assertEqual(items, [(0, 'b'), (1, 'a'), (2, 'c')])


class StandardFormTests(SimpleTestCase):
    def test_complete_graph_has_tensor_form(self):
        std = graphwords.standard_form(K2, (1, 0), 1)
        self.assertEqual((std.y, std.c, std.b), ((), (0,), ()))
        self.assertEqual(graphwords.normal_form(K2, std.word), (0, 1))

    def test_edgeless_graph(self):
        std = graphwords.standard_form(E2, (0, 1, 0), 1)
        self.assertEqual((std.y, std.c, std.v0, std.b), ((0,), (), 1, (0,)))
        self.assertEqual(std.word, (0, 1, 0))

    def test_every_standard_form_rebuilds_its_word(self):
        g = SimplicialGraph.cycle(4)
        for w in graphwords.complete_closure(g, [(0, 2, 1, 3), (1, 3, 0)]):
            for v0 in set(w):
                std = graphwords.standard_form(g, w, v0)
                self.assertEqual(graphwords.normal_form(g, std.word), w)

    def test_edgeless_standard_form_keeps_the_whole_prefix(self):
        std = graphwords.standard_form(E2, (0, 1, 0), 0)
        self.assertEqual((std.y, std.c, std.b), ((0, 1), (), ()))

    def test_commuting_prefix_goes_to_c(self):
        std = graphwords.standard_form(P3, (0, 2, 1), 1)
        self.assertEqual((std.y, std.c, std.b), ((), (0, 2), ()))

    def test_standard_forms_are_unique_on_small_graphs(self):
        for n in range(1, 5):
            for g in SimplicialGraph.all_graphs(n):
                for w in normal_forms_up_to(g, 6):
                    for v0 in set(w):
                        std = graphwords.standard_form(g, w, v0)
                        self.assertEqual(graphwords.normal_form(g, std.word), w, (g.edges, w, v0))

    def test_absent_vertex(self):
        with self.assertRaises(VertexAbsent):
            graphwords.standard_form(E2, (0,), 1)


class RunOperationTests(SimpleTestCase):
    def test_operations(self):
        self.assertEqual(graphwords.run_operation(K2, 'reduce', (0, 0)), {'word': [0]})
        self.assertEqual(graphwords.run_operation(P3, 'nf', (1, 0, 2)), {'word': [0, 1, 2]})
        self.assertEqual(graphwords.run_operation(P3, 'nclen', (0, 1, 2), v0=2), {'nc_length': 1})
        closure = graphwords.run_operation(K2, 'closure', words=[(0, 1)])
        self.assertEqual(closure['words'], [[], [0], [1], [0, 1]])
        std = graphwords.run_operation(E2, 'stdform', (0, 1, 0), v0=1)
        self.assertEqual(std['y'], [0])

    def test_unknown_operation(self):
        with self.assertRaises(ValueError):
            graphwords.run_operation(K2, 'shuffle', (0,))
