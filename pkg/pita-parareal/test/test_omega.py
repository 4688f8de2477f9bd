"""
Tests for the single-solver study (Psi trajectories and Omega series).
"""

from concurrent.futures import ThreadPoolExecutor
from unittest import TestCase

import numpy as np

from pita.accel import AccelSpec
from pita.exceptions import ConfigError, DimensionMismatchError, StepAlignmentError
from pita.omega import (
    OmegaSeries,
    SubdivisionSet,
    accelerate_omega,
    build_omega_series,
    build_psi,
    build_psi_family,
    omega_error_curve,
)
from pita.propagators import exact_solution, explicit_euler_propagate, explicit_euler_step

from .fixtures import sigma_system


class SubdivisionSetTest(TestCase):
    """Tests for SubdivisionSet."""

    def test_valid(self):
        sub = SubdivisionSet(0.1, [1, 2, 4])
        self.assertEqual(sub.deltas, (1, 2, 4))
        self.assertAlmostEqual(sub.step(4), 0.025)

    def test_first_must_be_one(self):
        with self.assertRaises(ConfigError):
            SubdivisionSet(0.1, [2, 4])

    def test_increasing(self):
        with self.assertRaises(ConfigError):
            SubdivisionSet(0.1, [1, 4, 4])

    def test_integral(self):
        with self.assertRaises(StepAlignmentError):
            SubdivisionSet(0.1, [1, 2.5])


class PsiTest(TestCase):
    """Tests for build_psi."""

    def setUp(self):
        self.sys = sigma_system()

    def test_delta_one_is_coarse(self):
        psi = build_psi(self.sys, 0.1, 1, 0.9)
        coarse = explicit_euler_propagate(self.sys, self.sys.y0, 0.0, 0.9, 0.1)
        np.testing.assert_array_equal(psi.states, coarse.states)
        np.testing.assert_allclose(psi.times, coarse.times, atol=1e-15)

    def test_composition(self):
        psi = build_psi(self.sys, 0.1, 2, 0.9)
        twice = explicit_euler_step(self.sys, explicit_euler_step(self.sys, self.sys.y0, 0.05), 0.05)
        np.testing.assert_array_equal(psi.states[1], twice)

    def test_point_count(self):
        for delta in (1, 3, 7):
            self.assertEqual(len(build_psi(self.sys, 0.1, delta, 0.9)), 10)

    def test_alignment(self):
        with self.assertRaises(StepAlignmentError):
            build_psi(self.sys, 0.1, 2, 0.95)

    def test_family_in_parallel(self):
        sub = SubdivisionSet(0.1, [1, 2, 5, 10])
        sequential = build_psi_family(self.sys, sub, 0.9)
        with ThreadPoolExecutor(max_workers=3) as executor:
            parallel = build_psi_family(self.sys, sub, 0.9, executor)
        self.assertEqual(list(parallel), [1, 2, 5, 10])
        for delta in sub.deltas:
            np.testing.assert_array_equal(parallel[delta].states, sequential[delta].states)


class OmegaSeriesTest(TestCase):
    """Tests for build_omega_series, omega_error_curve and accelerate_omega."""

    def setUp(self):
        self.sys = sigma_system()

    def test_single_term(self):
        series = build_omega_series(self.sys, SubdivisionSet(0.1, [1]), 3, 0.9)
        self.assertEqual(len(series), 1)
        coarse = explicit_euler_propagate(self.sys, self.sys.y0, 0.0, 0.9, 0.1)
        np.testing.assert_array_equal(series.terms[0], coarse.states[3])
        self.assertAlmostEqual(series.anchor_time, 0.3, places=15)

    def test_k0_range(self):
        sub = SubdivisionSet(0.1, [1])
        with self.assertRaises(ConfigError):
            build_omega_series(self.sys, sub, 0, 0.9)
        with self.assertRaises(ConfigError):
            build_omega_series(self.sys, sub, 10, 0.9)

    def test_error_decreases_inside_stability_region(self):
        deltas = [1] + [2 ** i for i in range(1, 10)]
        series = build_omega_series(self.sys, SubdivisionSet(0.1, deltas), 1, 0.1)
        errors = omega_error_curve(series, exact_solution(self.sys, 0.1))
        self.assertTrue(np.all(np.diff(errors[1:]) < 0))

    def test_first_order_ratio(self):
        sub = SubdivisionSet(0.1, [1, 50, 100, 200, 400])
        series = build_omega_series(self.sys, sub, 1, 0.1)
        errors = omega_error_curve(series, exact_solution(self.sys, 0.1))[1:]
        for ratio in errors[:-1] / errors[1:]:
            self.assertGreaterEqual(ratio, 1.7)
            self.assertLessEqual(ratio, 2.3)

    def test_error_curve(self):
        exact = np.array([1.0, 2.0])
        series = OmegaSeries(0.1, [exact, exact], [1, 2])
        np.testing.assert_array_equal(omega_error_curve(series, exact), [0.0, 0.0])
        series = OmegaSeries(0.1, [exact], [1])
        np.testing.assert_allclose(omega_error_curve(series, exact + [3.0, 4.0]), [5.0])
        with self.assertRaises(DimensionMismatchError):
            omega_error_curve(series, [1.0, 2.0, 3.0])

    def test_acceleration_is_no_worse(self):
        sub = SubdivisionSet(0.1, [1, 2, 5, 10, 20, 50, 100, 200, 400, 800])
        family = build_psi_family(self.sys, sub, 0.5)
        spec = AccelSpec(k=4, n=0)
        for k0 in range(1, 6):
            series = build_omega_series(self.sys, sub, k0, 0.5, family)
            tail = series.tail(50)
            exact = exact_solution(self.sys, k0 * 0.1)
            accelerated = accelerate_omega(tail, spec)
            best_raw = np.min(omega_error_curve(tail, exact))
            self.assertLessEqual(np.linalg.norm(accelerated - exact), best_raw)

    def test_invariants(self):
        with self.assertRaises(ConfigError):
            OmegaSeries(0.1, [[1.0], [2.0]], [2, 1])
        with self.assertRaises(DimensionMismatchError):
            OmegaSeries(0.1, [[1.0], [2.0]], [1])
        with self.assertRaises(DimensionMismatchError):
            OmegaSeries(0.1, [[1.0], [2.0, 3.0]], [1, 2])
        with self.assertRaises(ConfigError):
            OmegaSeries(0.1, [[1.0]], [1]).tail(5)
