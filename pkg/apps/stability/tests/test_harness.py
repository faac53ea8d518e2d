"""
Unit tests for apps.stability.harness, apps.stability.estimators and
apps.stability.reports. Classes tagged 'slow' are the desk-scale Monte
Carlo checks of the stability and generalization bounds.
"""
from unittest import mock

import numpy as np
from django.test import SimpleTestCase, tag

from apps.core_math.errors import InvalidArgument, NotAvailable, NumericalDivergence
from apps.core_math.params import Algorithm, Schedule, TailParams
from apps.core_math.schedules import schedule_for
from apps.noise.rng import SeededRng
from apps.noise.samplers import NoiseSpec
from apps.optimizers.config import OptimizerConfig
from apps.problems.families import make_quad_plus_sine
from apps.problems.sampling import ProblemSampler
from apps.stability import harness
from apps.stability.estimators import bootstrap, combined_stderr, root_mean_statistic
from apps.stability.harness import empirical_gen_gap, empirical_stability, measure, stability_report


def _sampler(n, d=3, noise='gaussian', c=0.2, center=None, seed=0):
    if noise == 'gaussian':
        noise = NoiseSpec('gaussian', dim=d)
    template = make_quad_plus_sine(n, d, noise, SeededRng(seed), c=c, center=center)
    return ProblemSampler(template, n)


def _config(algorithm, schedule, x0, seed=7):
    return OptimizerConfig(algorithm=algorithm, schedule=schedule, x0=np.asarray(x0, dtype=np.float64), seed=seed)


class BootstrapTests(SimpleTestCase):

    def test_constant_values(self):
        estimate = bootstrap([0.0] * 20)
        self.assertEqual((estimate.value, estimate.stderr, estimate.ci_low, estimate.ci_high), (0.0, 0.0, 0.0, 0.0))

    def test_mean_and_interval(self):
        values = np.random.default_rng(0).normal(loc=3.0, size=400)
        estimate = bootstrap(values, resamples=500, seed=1)
        self.assertAlmostEqual(estimate.value, values.mean())
        self.assertLess(abs(estimate.stderr - values.std(ddof=1) / 20.0), 0.01)
        self.assertLess(estimate.ci_low, estimate.value)
        self.assertGreater(estimate.ci_high, estimate.value)

    def test_root_mean(self):
        estimate = bootstrap([4.0, 4.0, 16.0, 16.0], root_mean_statistic, resamples=200)
        self.assertAlmostEqual(estimate.value, np.sqrt(10.0))

    def test_deterministic(self):
        values = np.random.default_rng(2).standard_cauchy(100)
        self.assertEqual(bootstrap(values, seed=3), bootstrap(values, seed=3))

    def test_invalid(self):
        with self.assertRaises(InvalidArgument):
            bootstrap([])
        with self.assertRaises(InvalidArgument):
            bootstrap([1.0, np.inf])

    def test_combined(self):
        self.assertAlmostEqual(combined_stderr(3.0, 4.0), 5.0)


class HarnessTests(SimpleTestCase):

    def test_zero_step_schedule_is_perfectly_stable(self):
        sampler = _sampler(32)
        for algorithm in Algorithm:
            schedule = Schedule(T=8, eta=0.0, gamma=1.0, beta=0.5, B=2)
            estimate = empirical_stability(sampler, _config(algorithm, schedule, np.ones(3)), reps=10, probe_count=8)
            self.assertEqual(estimate.epsilon_hat, 0.0)
            self.assertEqual(estimate.stderr, 0.0)
            self.assertEqual(estimate.argument.value, 0.0)

    def test_reps_floor(self):
        sampler = _sampler(32)
        config = _config(Algorithm.NSGD_M, Schedule(T=4, eta=0.1, beta=0.5), np.ones(3))
        with self.assertRaises(InvalidArgument):
            empirical_stability(sampler, config, reps=9)

    def test_fixed_probe_set(self):
        sampler = _sampler(32)
        config = _config(Algorithm.NSGD_M, Schedule(T=8, eta=0.1, beta=0.5), np.ones(3))
        probes = sampler.draw_samples(SeededRng(3), 5)
        estimate = empirical_stability(sampler, config, probes=probes, reps=10)
        self.assertEqual(estimate.probe_count, 5)

    def test_parallel_matches_sequential(self):
        sampler = _sampler(16)
        config = _config(Algorithm.NSGD_CM, Schedule(T=8, eta=0.1, beta=0.5, gamma=1.0), np.ones(3))
        sequential = measure(sampler, config, 12, probe_count=4)
        parallel = measure(sampler, config, 12, probe_count=4, parallelism=4)
        self.assertEqual(sequential, parallel)

    def test_hit_rate_reported(self):
        sampler = _sampler(16)
        config = _config(Algorithm.NSGD_B, Schedule(T=4, eta=0.1, B=2), np.ones(3))
        estimate = empirical_stability(sampler, config, reps=40, probe_count=4)
        self.assertEqual(estimate.hit_cap, 0.5)
        self.assertTrue(0.0 <= estimate.hit_rate <= 1.0)

    def test_point_mass_law_has_no_gap(self):
        sampler = _sampler(32, noise=None, center=[1.0, -1.0, 0.5])
        config = _config(Algorithm.NSGD_M, Schedule(T=8, eta=0.1, beta=0.5), np.zeros(3))
        estimate = empirical_gen_gap(sampler, config, reps=10)
        self.assertAlmostEqual(estimate.gap_hat, 0.0, places=12)

    def test_gap_needs_population_gradient(self):
        sampler = _sampler(32, noise=NoiseSpec('symmetric_alpha_stable', tail_index=1.0, dim=3))
        config = _config(Algorithm.NSGD_M, Schedule(T=4, eta=0.1, beta=0.5), np.zeros(3))
        with self.assertRaises(NotAvailable):
            empirical_gen_gap(sampler, config, reps=10)

    def test_divergent_replicates_are_counted(self):
        sampler = _sampler(16)
        config = _config(Algorithm.NSGD_M, Schedule(T=4, eta=0.1, beta=0.5), np.ones(3))
        real = harness.coupled_run

        def flaky(problem, problem_prime, rep_config):
            if rep_config.stream % 3 == 0:
                raise NumericalDivergence(2, 'nsgd_m')
            return real(problem, problem_prime, rep_config)

        with mock.patch.object(harness, 'coupled_run', side_effect=flaky):
            outcomes = measure(sampler, config, 12, probe_count=4)
        failed = sum(o.failed for o in outcomes)
        estimate = harness.summarize_stability(outcomes, config, 16, 4)
        self.assertEqual(estimate.failed_reps, failed)
        self.assertEqual(estimate.reps + estimate.failed_reps, 12)

    def test_all_replicates_failing_raises(self):
        sampler = _sampler(16)
        config = _config(Algorithm.NSGD_M, Schedule(T=4, eta=0.1, beta=0.5), np.ones(3))
        with mock.patch.object(harness, 'coupled_run', side_effect=NumericalDivergence(1, 'nsgd_m')):
            with self.assertRaises(NumericalDivergence):
                measure(sampler, config, 10, probe_count=4)

    def test_report_dict(self):
        sampler = _sampler(32)
        config = _config(Algorithm.NSGD_M, Schedule(T=8, eta=0.1, beta=0.5), np.ones(3))
        report = stability_report(sampler, config, 10, TailParams(2.0, np.sqrt(3.0)), probe_count=8, resamples=100)
        record = report.to_dict()
        for key in ('epsilon', 'epsilon_theory', 'gen_gap', 'gen_bound_theory', 'hit_rate', 'caveat', 'failed_reps'):
            self.assertIn(key, record)
        self.assertEqual(record['replication_count'], 10)
        self.assertGreaterEqual(record['epsilon']['stderr'], 0.0)
        self.assertGreater(record['G_hat']['value'], 0.0)

    def test_gradient_moment_along_trajectory(self):
        # frozen iterate at the origin, every sample at (3, 4, 0): each gradient has norm 5
        sampler = _sampler(16, noise=None, c=0.0, center=[3.0, 4.0, 0.0])
        config = _config(Algorithm.NSGD_M, Schedule(T=6, eta=0.0, beta=0.5), np.zeros(3))
        report = stability_report(sampler, config, 10, TailParams(1.5, 1.0), probe_count=4, resamples=100)
        self.assertAlmostEqual(report.G_hat, 5.0, places=12)
        self.assertLessEqual(report.gradient_moment.stderr, 1e-12)
        self.assertAlmostEqual(report.to_dict()['G_hat']['value'], 5.0, places=12)


@tag('slow')
class StabilityBoundAcceptanceTests(SimpleTestCase):

    def test_all_algorithms_within_bound(self):
        n, d = 1024, 8
        sampler = _sampler(n, d=d, seed=1)
        for algorithm in Algorithm:
            config = _config(algorithm, schedule_for(algorithm, n, 2.0), np.full(d, 2.0), seed=11)
            report = stability_report(sampler, config, 200, TailParams(2.0, np.sqrt(d)), include_gap=False)
            self.assertLessEqual(report.epsilon_hat, report.epsilon_theory + 3 * report.epsilon.stderr,
                                 msg=report.to_dict())
            self.assertLessEqual(report.argument.value, report.argument_theory + 3 * report.argument.stderr)

    def test_epsilon_does_not_shrink_with_horizon(self):
        sampler = _sampler(64, seed=2)
        estimates = []
        for T in (8, 16):
            config = _config(Algorithm.NSGD_M, Schedule(T=T, eta=0.1, beta=0.8), np.ones(3), seed=12)
            estimates.append(empirical_stability(sampler, config, reps=200))
        short, long = estimates
        self.assertGreaterEqual(long.epsilon_hat, short.epsilon_hat - 2 * combined_stderr(short.stderr, long.stderr))

    def test_threshold_sensitivity(self):
        # iterates stay far from the data so every gradient is clipped at both thresholds
        d, n = 4, 64
        sampler = _sampler(n, d=d, c=0.1, seed=3)
        x0 = np.full(d, 10.0)

        def epsilon(algorithm, gamma):
            schedule = Schedule(T=64, eta=0.05, beta=0.9, gamma=gamma)
            return empirical_stability(sampler, _config(algorithm, schedule, x0, seed=13), reps=200)

        cm_small, cm_large = epsilon(Algorithm.NSGD_CM, 0.25), epsilon(Algorithm.NSGD_CM, 1.0)
        self.assertLess(abs(cm_large.epsilon_hat - cm_small.epsilon_hat),
                        3 * combined_stderr(cm_small.stderr, cm_large.stderr) + 1e-12)
        sgd_small, sgd_large = epsilon(Algorithm.CLIPPED_SGD, 0.25), epsilon(Algorithm.CLIPPED_SGD, 1.0)
        self.assertGreater(sgd_large.epsilon_hat - sgd_small.epsilon_hat,
                           3 * combined_stderr(sgd_small.stderr, sgd_large.stderr))


@tag('slow')
class GeneralizationAcceptanceTests(SimpleTestCase):

    def test_gap_within_bound_and_decreasing(self):
        d = 2
        reports = {}
        for n in (256, 1024, 4096):
            sampler = _sampler(n, d=d, seed=4)
            config = _config(Algorithm.NSGD_M, schedule_for(Algorithm.NSGD_M, n, 2.0), np.ones(d), seed=14)
            report = stability_report(sampler, config, 200, TailParams(2.0, np.sqrt(d)))
            self.assertTrue(report.generalization_bound_holds, msg=report.to_dict())
            reports[n] = report
        first, last = reports[256].gen_gap, reports[4096].gen_gap
        self.assertGreater(first.value - last.value, 2 * combined_stderr(first.stderr, last.stderr))
