"""
Unit tests for apps.experiments.rates.fit_rate.
"""
import numpy as np
from django.test import SimpleTestCase

from apps.core_math.errors import InvalidArgument
from apps.experiments.rates import fit_rate

NS = [2 ** k for k in range(8, 15)]


class FitRateTests(SimpleTestCase):

    def test_exact_power_law(self):
        fit = fit_rate([(n, 3.0 * n ** -0.125) for n in NS], predicted=-0.125)
        self.assertAlmostEqual(fit.slope, -0.125, delta=1e-12)
        self.assertAlmostEqual(fit.intercept, np.log(3.0), delta=1e-10)
        self.assertAlmostEqual(fit.r_squared, 1.0, delta=1e-12)
        self.assertEqual(fit.predicted_slope, -0.125)
        self.assertEqual(len(fit.points), len(NS))

    def test_noisy_slope_recovered(self):
        slopes = []
        for seed in range(25):
            rng = np.random.default_rng(seed)
            points = [(n, n ** -0.25 * rng.uniform(0.9, 1.1)) for n in NS]
            slopes.append(fit_rate(points, predicted=-0.25).slope)
        self.assertAlmostEqual(float(np.median(slopes)), -0.25, delta=0.05)

    def test_slope_does_not_depend_on_scale(self):
        rng = np.random.default_rng(1)
        values = [n ** -0.3 * rng.uniform(0.8, 1.2) for n in NS]
        a = fit_rate(list(zip(NS, values)), predicted=-0.3)
        b = fit_rate([(n, 1000.0 * v) for n, v in zip(NS, values)], predicted=-0.3)
        self.assertAlmostEqual(a.slope, b.slope, delta=1e-12)

    def test_flat_data(self):
        fit = fit_rate([(n, 2.0) for n in NS], predicted=-0.1)
        self.assertAlmostEqual(fit.slope, 0.0, delta=1e-12)
        self.assertEqual(fit.r_squared, 1.0)

    def test_two_points_have_zero_stderr(self):
        with self.assertLogs('apps.experiments.rates', level='WARNING'):
            fit = fit_rate([(100, 1.0), (400, 0.5)], predicted=-0.5)
        self.assertAlmostEqual(fit.slope, -0.5, delta=1e-12)
        self.assertEqual(fit.slope_stderr, 0.0)

    def test_invalid_points(self):
        with self.assertRaises(InvalidArgument):
            fit_rate([(100, 1.0)], predicted=-0.5)
        with self.assertRaises(InvalidArgument):
            fit_rate([(100, 1.0), (200, 0.0)], predicted=-0.5)
        with self.assertRaises(InvalidArgument):
            fit_rate([(100, 1.0), (200, float('nan'))], predicted=-0.5)
        with self.assertRaises(InvalidArgument):
            fit_rate([(0, 1.0), (200, 0.5)], predicted=-0.5)
        with self.assertRaises(InvalidArgument):
            fit_rate([(100, 1.0), (100, 0.5)], predicted=-0.5)

    def test_as_dict(self):
        data = fit_rate([(n, n ** -0.5) for n in NS[:3]], predicted=-0.5).as_dict()
        self.assertEqual(
            set(data), {'slope', 'intercept', 'r_squared', 'slope_stderr', 'predicted_slope', 'points'},
        )
        self.assertEqual(len(data['points']), 3)
