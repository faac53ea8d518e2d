"""
Unit tests for apps.core_math.clipping.

clip() examples, the three clipping inequalities over 10^4 random instances,
and the normalized inner-product inequality.
"""
import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis.extra.numpy import arrays
from hypothesis.strategies import floats, integers

from apps.core_math.clipping import (
    clip,
    clip_rows,
    normalize,
    normalized_inner_product,
)
from apps.core_math.errors import InvalidArgument

TOL = 1e-12

finite_vectors = arrays(
    np.float64,
    integers(1, 16),
    elements=floats(-1e6, 1e6, allow_nan=False, allow_infinity=False),
)


def _random_instances(seed, count=10_000):
    """(u, v, gamma, p) batches with dimension drawn from 1..16 per instance."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        d = int(rng.integers(1, 17))
        scale = 10.0 ** rng.uniform(-3, 3)
        u = rng.standard_normal(d) * scale
        v = rng.standard_normal(d) * scale
        gamma = 10.0 ** rng.uniform(-3, 3)
        p = rng.uniform(1.0, 2.0)
        if p == 1.0:
            p = 2.0
        yield u, v, gamma, p


class ClipExampleTests(SimpleTestCase):

    def test_zero_vector_stays_zero(self):
        np.testing.assert_array_equal(clip(np.zeros(3), 1.0), np.zeros(3))

    def test_outside_ball_is_projected(self):
        np.testing.assert_allclose(clip([3.0, 4.0], 1.0), [0.6, 0.8], rtol=0, atol=1e-15)

    def test_inside_threshold_is_identity(self):
        np.testing.assert_array_equal(clip([0.5, 0.0], 2.0), [0.5, 0.0])

    def test_infinite_threshold_is_identity(self):
        u = np.array([1e300, -3.0])
        np.testing.assert_array_equal(clip(u, math.inf), u)

    def test_input_not_mutated(self):
        u = np.array([3.0, 4.0])
        clip(u, 1.0)
        np.testing.assert_array_equal(u, [3.0, 4.0])

    # -- errors ---------------------------------------------------------------

    def test_nonpositive_threshold_rejected(self):
        for gamma in (0.0, -1.0, float('nan')):
            with self.assertRaises(InvalidArgument):
                clip([1.0], gamma)

    def test_non_finite_input_rejected(self):
        with self.assertRaises(InvalidArgument):
            clip([1.0, float('nan')], 1.0)
        with self.assertRaises(InvalidArgument):
            clip([float('inf')], 1.0)

    def test_invalid_argument_is_a_value_error(self):
        with self.assertRaises(ValueError):
            clip([1.0], 0.0)


class ClipPropertyTests(SimpleTestCase):
    """Clipping inequalities (a)-(c) and the exact-norm identity."""

    def test_squared_norm_bound(self):
        for u, _, gamma, p in _random_instances(1):
            lhs = np.linalg.norm(clip(u, gamma)) ** 2
            rhs = gamma ** (2 - p) * np.linalg.norm(u) ** p
            self.assertLessEqual(lhs, rhs * (1 + TOL) + TOL)

    def test_residual_bound(self):
        for u, _, gamma, p in _random_instances(2):
            lhs = np.linalg.norm(u - clip(u, gamma))
            rhs = np.linalg.norm(u) ** p / gamma ** (p - 1)
            self.assertLessEqual(lhs, rhs * (1 + TOL) + TOL)

    def test_one_lipschitz(self):
        for u, v, gamma, _ in _random_instances(3):
            lhs = np.linalg.norm(clip(u, gamma) - clip(v, gamma))
            rhs = np.linalg.norm(u - v)
            self.assertLessEqual(lhs, rhs * (1 + TOL) + TOL)

    def test_norm_is_min_of_norm_and_threshold(self):
        for u, _, gamma, _ in _random_instances(4):
            expected = min(np.linalg.norm(u), gamma)
            self.assertAlmostEqual(np.linalg.norm(clip(u, gamma)), expected, delta=1e-14 * expected)

    @settings(max_examples=300, deadline=None)
    @given(u=finite_vectors, gamma=floats(1e-6, 1e6))
    def test_norm_never_exceeds_threshold(self, u, gamma):
        clipped = clip(u, gamma)
        self.assertLessEqual(np.linalg.norm(clipped), gamma * (1 + 1e-15))

    @settings(max_examples=300, deadline=None)
    @given(u=finite_vectors, gamma=floats(1e-6, 1e6))
    def test_direction_preserved(self, u, gamma):
        clipped = clip(u, gamma)
        # clip only rescales by a positive factor
        self.assertGreaterEqual(float(np.dot(clipped, u)), 0.0)


class ClipRowsTests(SimpleTestCase):

    def test_matches_rowwise_clip(self):
        rng = np.random.default_rng(7)
        U = rng.standard_normal((50, 4)) * 3
        expected = np.vstack([clip(row, 2.0) for row in U])
        np.testing.assert_allclose(clip_rows(U, 2.0), expected, rtol=1e-15, atol=0)

    def test_rejects_vector(self):
        with self.assertRaises(InvalidArgument):
            clip_rows(np.ones(3), 1.0)


class NormalizeTests(SimpleTestCase):

    def test_zero_direction_rule(self):
        direction, size = normalize(np.zeros(4))
        np.testing.assert_array_equal(direction, np.zeros(4))
        self.assertEqual(size, 0.0)

    def test_unit_norm(self):
        direction, size = normalize([3.0, 4.0])
        self.assertEqual(size, 5.0)
        self.assertAlmostEqual(np.linalg.norm(direction), 1.0, places=15)


class NormalizedInnerProductTests(SimpleTestCase):
    """<u, v/||v||> >= ||u|| - 2||u - v|| for v != 0."""

    def test_inequality_over_random_pairs(self):
        rng = np.random.default_rng(11)
        for _ in range(10_000):
            d = int(rng.integers(1, 17))
            u = rng.standard_normal(d) * 10.0 ** rng.uniform(-2, 2)
            # v near u half the time, unrelated otherwise
            if rng.random() < 0.5:
                v = u + rng.standard_normal(d) * 10.0 ** rng.uniform(-3, 1)
            else:
                v = rng.standard_normal(d)
            if not np.any(v):
                continue
            lhs = normalized_inner_product(u, v)
            rhs = np.linalg.norm(u) - 2 * np.linalg.norm(u - v)
            self.assertGreaterEqual(lhs, rhs - 1e-12 * max(1.0, np.linalg.norm(u)))

    def test_zero_v_rejected(self):
        with self.assertRaises(InvalidArgument):
            normalized_inner_product([1.0], [0.0])
