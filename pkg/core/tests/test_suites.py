import csv
from pathlib import Path
import tempfile

from django.test import SimpleTestCase

from core import suites
from core.conf import setting
from core.exceptions import CapExceeded, HypothesisNotMet, SpecInvalid
from core.graphwords import SimplicialGraph
from core.mathcore import Verdict
from core.suites import Outcome, RunConfig, SuiteEntry, TrialRecord


def without_timestamp(report):
    return {k: v for k, v in report.items() if k != 'timestamp'}


class RunConfigTests(SimpleTestCase):
    def test_unknown_suite(self):
        with self.assertRaises(SpecInvalid):
            RunConfig('verify everything', seed=1)

    def test_caps(self):
        with self.assertRaises(CapExceeded):
            RunConfig('dilate halmos', seed=1, trials=0)
        with self.assertRaises(CapExceeded):
            RunConfig('dilate halmos', seed=1, block=9)
        with self.assertRaises(CapExceeded):
            RunConfig('verify ucp', seed=1, graph=SimplicialGraph.edgeless(9))

    def test_per_vertex_values_need_a_matching_graph(self):
        with self.assertRaises(SpecInvalid):
            RunConfig('verify ucp', seed=1, dims=(2, 3))
        with self.assertRaises(SpecInvalid):
            RunConfig('verify ucp', seed=1, graph=SimplicialGraph.path(3), dims=(2, 3))
        with self.assertRaises(SpecInvalid):
            RunConfig('groups pd', seed=1, groups=('dihedral:4',))

    def test_as_dict(self):
        cfg = RunConfig('verify ucp', seed=4, graph=SimplicialGraph.complete(2), dims=(2,))
        doc = cfg.as_dict()
        self.assertEqual(doc['graph'], {'n': 2, 'edges': [[0, 1]]})
        self.assertEqual(doc['dims'], [2])
        self.assertEqual(doc['seed'], 4)


class RunSuiteTests(SimpleTestCase):
    def test_reports_depend_only_on_the_seed(self):
        cfg = RunConfig('dilate egervary', seed=12, trials=3)
        first = suites.run_suite(cfg).report
        second = suites.run_suite(cfg).report
        self.assertEqual(without_timestamp(first), without_timestamp(second))
        self.assertTrue(first['passed'])
        self.assertEqual(first['passes'], 3)

    def test_threads_do_not_change_the_report(self):
        serial = suites.run_suite(RunConfig('dilate halmos', seed=2, trials=4)).report
        pooled = suites.run_suite(RunConfig('dilate halmos', seed=2, trials=4, threads=3)).report
        self.assertEqual(serial['results'], pooled['results'])

    def test_ucp_suite_on_a_fixed_graph(self):
        cfg = RunConfig('verify ucp', seed=3, trials=2, graph=SimplicialGraph.path(3), dims=(2,))
        report = suites.run_suite(cfg).report
        self.assertEqual(report['failures'], 0, report['results'])
        self.assertEqual(report['config']['graph'], {'n': 3, 'edges': [[0, 1], [1, 2]]})

    def test_schwarz_suite_on_a_fixed_graph(self):
        cfg = RunConfig('verify schwarz', seed=5, trials=3, graph=SimplicialGraph.path(3), dims=(2,))
        report = suites.run_suite(cfg).report
        self.assertEqual(report['failures'], 0, report['results'])

    def test_dilation_independence_runs_both_checks(self):
        cfg = RunConfig('dilate independence', seed=4, trials=2, graph=SimplicialGraph.edgeless(2))
        report = suites.run_suite(cfg).report
        self.assertEqual(report['passes'], 2, report['results'])
        for result in report['results']:
            self.assertEqual(set(result['detail']['checks']), {'independence', 'surrogate'})

    def test_word_oracle(self):
        report = suites.run_suite(RunConfig('words oracle', seed=0, max_vertices=3, max_word_len=4)).report
        self.assertEqual(report['trials'], 11)
        self.assertTrue(report['passed'], [r for r in report['results'] if r['status'] != 'passed'])

    def test_tolerance_override_is_scoped_to_the_run(self):
        before = setting('EQ_TOL')
        report = suites.run_suite(RunConfig('groups ball', seed=5, trials=2, tol=1e-6)).report
        self.assertEqual(report['config']['tol'], 1e-6)
        self.assertEqual(setting('EQ_TOL'), before)

    def test_write_spectra(self):
        result = suites.run_suite(RunConfig('dilate gram', seed=1, trials=2))
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'spectra.csv'
            suites.write_spectra(path, result)
            with open(path, newline='') as fh:
                rows = list(csv.reader(fh))
        self.assertEqual(rows[0], ['suite', 'trial', 'eigenvalues'])
        self.assertEqual(len(rows) - 1, sum(1 for r in result.records if r.spectrum is not None))
        for row in rows[1:]:
            self.assertEqual(row[0], 'dilate gram')


class TrialOutcomeTests(SimpleTestCase):
    def setUp(self):
        self.cfg = RunConfig('dilate halmos', seed=0, trials=1)

    def test_errors_fail_the_trial(self):
        def broken(t):
            raise SpecInvalid("bad vertex map")

        record = suites.run_trial(SuiteEntry('broken', broken), self.cfg, 0)
        self.assertEqual(record.status, 'failed')
        self.assertEqual(record.artifact['error'], 'SpecInvalid')

    def test_unmet_hypotheses_skip_the_trial(self):
        def vacuous(t):
            raise HypothesisNotMet("nothing to check")

        record = suites.run_trial(SuiteEntry('vacuous', vacuous), self.cfg, 0)
        self.assertEqual(record.status, 'skipped')

    def test_commutative_only_runs_do_not_pass_guarded_suites(self):
        entry = SuiteEntry('guarded', None, guarded=True)
        records = [TrialRecord(k, 'passed', 0.0, {}, noncommutative=False) for k in range(4)]
        report = suites.assemble_report(self.cfg, entry, records)
        self.assertFalse(report['passed'])
        self.assertFalse(report['guards']['noncommutative']['passed'])

    def test_failed_runs_keep_their_artifacts(self):
        entry = SuiteEntry('plain', None)
        records = [
            TrialRecord(0, 'passed', 1e-12, {}),
            TrialRecord(1, 'failed', float('inf'), {'error': 'GramNotPSD'}, {'trial': 1}),
        ]
        report = suites.assemble_report(self.cfg, entry, records)
        self.assertFalse(report['passed'])
        self.assertEqual(report['worst_residual'], 'inf')
        self.assertEqual(report['artifacts'], [{'trial': 1}])

    def test_outcome_merges_verdicts(self):
        out = Outcome.of({'a': Verdict(True, 1e-12, 1e-9), 'b': Verdict(False, 0.5, 1e-9)})
        self.assertFalse(out.passed)
        self.assertEqual(out.residual, 0.5)
        self.assertEqual(set(out.detail['checks']), {'a', 'b'})
