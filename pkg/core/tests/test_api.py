from django.core.exceptions import ValidationError
from rest_framework import status
from rest_framework.test import APIClient, APITestCase
import numpy as np

from core.graphwords import SimplicialGraph
from core.models import SuiteRun
from core.serializers import GraphSerializer, ThetaSpecSerializer
from core.staralg import random_theta


def sample_report(suite='verify ucp', seed=7, passes=3, failures=0, skipped=1):
    return {
        'schema_version': 1, 'suite': suite, 'seed': seed, 'trials': passes + failures + skipped,
        'config': {}, 'passes': passes, 'failures': failures, 'skipped': skipped,
        'worst_residual': 1e-12, 'guards': {}, 'passed': failures == 0 and passes > 0,
        'results': [], 'artifacts': [], 'timestamp': '2026-01-01T00:00:00+00:00',
    }


class BaseTestCase(APITestCase):
    def setUp(self):
        self.api_client = APIClient()
        self.path3 = {'n': 3, 'edges': [[0, 1], [1, 2]]}


class WordOperationTest(BaseTestCase):
    def test_normal_form(self):
        response = self.api_client.post('/api/words/nf/', {'graph': self.path3, 'word': [1, 0, 2]}, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['word'], [0, 1, 2])

    def test_graph_in_text_format(self):
        data = {'graph': {'text': "n 2\ne 0 1\n"}, 'word': [0, 1, 0]}
        response = self.api_client.post('/api/words/reduce/', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['word'], [1, 0])

    def test_standard_form(self):
        data = {'graph': {'n': 2, 'edges': []}, 'word': [0, 1, 0], 'v0': 1}
        response = self.api_client.post('/api/words/stdform/', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['y'], [0])
        self.assertEqual(response.data['b'], [0])

    def test_closure(self):
        data = {'graph': {'n': 2, 'edges': [[0, 1]]}, 'words': [[0, 1]]}
        response = self.api_client.post('/api/words/closure/', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['words'], [[], [0], [1], [0, 1]])

    def test_stdform_needs_v0(self):
        response = self.api_client.post('/api/words/stdform/', {'graph': self.path3, 'word': [0]}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('v0', response.data)

    def test_absent_vertex_is_rejected(self):
        data = {'graph': self.path3, 'word': [0, 2], 'v0': 1}
        response = self.api_client.post('/api/words/stdform/', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('error', response.data)

    def test_letter_outside_the_graph(self):
        response = self.api_client.post('/api/words/nf/', {'graph': self.path3, 'word': [0, 5]}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_loop_edge(self):
        data = {'graph': {'n': 2, 'edges': [[1, 1]]}, 'word': [0]}
        response = self.api_client.post('/api/words/nf/', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('graph', response.data)

    def test_unknown_operation(self):
        response = self.api_client.post('/api/words/shuffle/', {'graph': self.path3}, format='json')
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)


class SuiteRunTest(BaseTestCase):
    def setUp(self):
        super().setUp()
        self.first = SuiteRun.from_report(sample_report())
        self.first.save()
        self.second = SuiteRun.from_report(sample_report(suite='dilate halmos', seed=1, passes=2, skipped=0))
        self.second.save()

    def test_list_runs(self):
        response = self.api_client.get('/api/runs/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data), 2)
        self.assertNotIn('report', response.data[0])

    def test_filter_and_limit(self):
        response = self.api_client.get('/api/runs/', {'suite': 'verify ucp'})
        self.assertEqual([r['id'] for r in response.data], [self.first.pk])
        response = self.api_client.get('/api/runs/', {'limit': 1})
        self.assertEqual(len(response.data), 1)
        response = self.api_client.get('/api/runs/', {'limit': 'many'})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_run_detail(self):
        response = self.api_client.get(f'/api/runs/{self.first.pk}/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['report']['suite'], 'verify ucp')
        self.assertTrue(response.data['passed'])

    def test_missing_run(self):
        response = self.api_client.get('/api/runs/9999/')
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)

    def test_runs_are_append_only(self):
        self.first.passes = 4
        with self.assertRaises(ValidationError):
            self.first.save()

    def test_inconsistent_counts_are_rejected(self):
        report = sample_report()
        report['trials'] = 10
        with self.assertRaises(ValidationError):
            SuiteRun.from_report(report).save()

    def test_non_finite_residual_is_stored_as_null(self):
        report = sample_report(suite='verify schwarz', passes=1, failures=1, skipped=0)
        report['worst_residual'] = 'inf'
        run = SuiteRun.from_report(report)
        run.save()
        self.assertIsNone(SuiteRun.objects.get(pk=run.pk).worst_residual)
        self.assertFalse(run.passed)


class SerializerTest(APITestCase):
    def test_graph_serializer(self):
        serializer = GraphSerializer(data={'n': 3, 'edges': [[2, 1]]})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data, SimplicialGraph.from_edges(3, [(1, 2)]))
        self.assertFalse(GraphSerializer(data={'edges': [[0, 1]]}).is_valid())

    def test_theta_spec_round_trip(self):
        spec = random_theta(SimplicialGraph.path(3), 2, seed=2)
        doc = ThetaSpecSerializer(spec).data
        self.assertEqual(doc['legs'], [2, 2])
        serializer = ThetaSpecSerializer(data=doc)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        rebuilt = serializer.validated_data
        a = np.arange(4, dtype=complex).reshape(2, 2)
        for v in range(3):
            np.testing.assert_allclose(rebuilt.theta(v, a), spec.theta(v, a), atol=1e-12)

    def test_theta_spec_rejects_a_non_isometry(self):
        doc = ThetaSpecSerializer(random_theta(SimplicialGraph.edgeless(1), 2, seed=2)).data
        doc['vertices'][0]['isometry']['re'] = (2 * np.asarray(doc['vertices'][0]['isometry']['re'])).tolist()
        doc['vertices'][0]['isometry']['im'] = (2 * np.asarray(doc['vertices'][0]['isometry']['im'])).tolist()
        serializer = ThetaSpecSerializer(data=doc)
        self.assertFalse(serializer.is_valid())
        self.assertIn('vertices', serializer.errors)
