"""
Unit tests for apps.stability.theory.
"""
import math

from django.test import SimpleTestCase

from apps.core_math.bounds import stability_bound
from apps.core_math.constants import moment_term
from apps.core_math.errors import InvalidArgument
from apps.core_math.params import Algorithm, Schedule, TailParams, TheoryParams
from apps.stability.theory import MOMENT, OPTIMIZATION, STABILITY, theoretical_report

THEORY = TheoryParams(L=2.0, G=1.5, Delta=3.0)
TAIL = TailParams(p=1.6, sigma_p=0.8)
FULL = Schedule(T=50, eta=0.05, gamma=2.0, beta=0.9, B=4)


class TheoreticalReportTests(SimpleTestCase):

    def test_terms_nonnegative_and_categorized(self):
        for algorithm in Algorithm:
            report = theoretical_report(algorithm, FULL, THEORY, TAIL, 1000)
            for term in report.terms:
                self.assertGreaterEqual(term.value, 0.0, msg=(algorithm, term.name))
                self.assertIn(term.category, (OPTIMIZATION, STABILITY, MOMENT))
            self.assertAlmostEqual(
                report.total,
                report.by_category(OPTIMIZATION) + report.by_category(STABILITY) + report.by_category(MOMENT),
            )
            self.assertEqual(report.as_dict()['total'], report.total)

    def test_stability_term_is_four_epsilon(self):
        for algorithm in Algorithm:
            report = theoretical_report(algorithm, FULL, THEORY, TAIL, 1000)
            self.assertAlmostEqual(report.term('stability'), 4 * stability_bound(algorithm, FULL, THEORY.L, 1000))
            self.assertAlmostEqual(report.term('moment'), moment_term(TAIL, 1000))

    def test_full_batch_limit(self):
        n, G, p = 100, 1.0, 2.0
        tail = TailParams(p=p, sigma_p=0.5)
        schedule = Schedule(T=10, eta=1e-9, B=n)
        report = theoretical_report(Algorithm.NSGD_B, schedule, TheoryParams(L=1.0, G=G, Delta=0.0), tail, n)
        expected = 4 * G * n ** (-(p - 1) / p) + moment_term(tail, n)
        self.assertAlmostEqual(report.total, expected, places=5)

    def test_momentum_variants_share_terms(self):
        schedule = FULL.with_changes(gamma=math.inf)
        m = theoretical_report(Algorithm.NSGD_M, schedule, THEORY, TAIL, 500)
        cm = theoretical_report(Algorithm.NSGD_CM, schedule, THEORY, TAIL, 500)
        self.assertEqual(cm.term('clip_bias'), 0.0)
        skip = {'clip_bias', 'momentum_drift'}
        shared = {t.name: t.value for t in m.terms if t.name not in skip}
        self.assertEqual(shared, {t.name: t.value for t in cm.terms if t.name not in skip})

    def test_zero_gap_has_no_descent_term(self):
        report = theoretical_report(Algorithm.NSGD_M, FULL, TheoryParams(L=1.0, G=1.0), TAIL, 100)
        self.assertEqual(report.term('descent'), 0.0)

    def test_mismatched_schedule(self):
        with self.assertRaises(InvalidArgument):
            theoretical_report(Algorithm.NSGD_CM, Schedule(T=5, eta=0.1, beta=0.5), THEORY, TAIL, 100)
        with self.assertRaises(InvalidArgument):
            theoretical_report(Algorithm.NSGD_B, FULL, THEORY, TAIL, 0)
