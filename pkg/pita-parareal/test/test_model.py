"""
Tests for the system, grid and trajectory types.
"""

from unittest import TestCase

import numpy as np

from pita.exceptions import ConfigError, DimensionMismatchError, NonFiniteEntryError
from pita.model import LTISystem, TimeGrid, Trajectory, as_state, slice_boundaries, validate_system

from .fixtures import SIGMA_A, sigma_system


class LTISystemTest(TestCase):
    """Tests for LTISystem and validate_system."""

    def test_sigma_is_accepted(self):
        sys = sigma_system()
        self.assertIs(validate_system(sys), sys)
        self.assertEqual(sys.dim, 2)

    def test_flat_B_is_one_column(self):
        sys = sigma_system()
        self.assertEqual(sys.B.shape, (2, 1))
        np.testing.assert_array_equal(sys.forcing, [0.0, 10.0])

    def test_non_square_A(self):
        sys = LTISystem([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]], [0.0, 1.0], [1.0], [0.0, 1.0])
        with self.assertRaises(DimensionMismatchError) as cm:
            validate_system(sys)
        self.assertEqual(cm.exception.field, 'A')

    def test_y0_length(self):
        sys = LTISystem(SIGMA_A, [0.0, 1.0], [10.0], [0.0, 1.0, 2.0])
        with self.assertRaises(DimensionMismatchError) as cm:
            validate_system(sys)
        self.assertEqual(cm.exception.field, 'y0')

    def test_u_length(self):
        sys = LTISystem(SIGMA_A, [0.0, 1.0], [10.0, 1.0], [0.0, 1.0])
        with self.assertRaises(DimensionMismatchError) as cm:
            validate_system(sys)
        self.assertEqual(cm.exception.field, 'u')

    def test_non_finite_entry(self):
        sys = LTISystem(SIGMA_A, [0.0, 1.0], [np.nan], [0.0, 1.0])
        with self.assertRaises(NonFiniteEntryError) as cm:
            validate_system(sys)
        self.assertEqual(cm.exception.field, 'u')

    def test_arrays_are_read_only(self):
        sys = sigma_system()
        with self.assertRaises(ValueError):
            sys.A[0, 0] = 3.0

    def test_with_initial_state(self):
        sys = sigma_system()
        moved = sys.with_initial_state([1.0, 2.0])
        np.testing.assert_array_equal(moved.y0, [1.0, 2.0])
        np.testing.assert_array_equal(moved.A, sys.A)
        self.assertNotEqual(moved, sys)
        self.assertEqual(sys, sigma_system())

    def test_as_state_rejects_inf(self):
        with self.assertRaises(NonFiniteEntryError):
            as_state([1.0, np.inf])


class TimeGridTest(TestCase):
    """Tests for TimeGrid and slice_boundaries."""

    def test_boundaries(self):
        grid = TimeGrid(0.0, 0.9, 9)
        times = slice_boundaries(grid)
        self.assertEqual(len(times), 10)
        self.assertEqual(times[0], 0.0)
        self.assertEqual(times[-1], 0.9)
        np.testing.assert_allclose(np.diff(times), 0.1, rtol=1e-12)
        self.assertAlmostEqual(grid.h_g, 0.1, places=15)

    def test_invalid(self):
        with self.assertRaises(ConfigError):
            TimeGrid(1.0, 1.0, 3)
        with self.assertRaises(ConfigError):
            TimeGrid(0.0, 1.0, 0)
        with self.assertRaises(ConfigError):
            TimeGrid(0.0, 1.0, 2.5)


class TrajectoryTest(TestCase):
    """Tests for Trajectory."""

    def test_times_must_increase(self):
        with self.assertRaises(ConfigError):
            Trajectory([0.0, 0.2, 0.1], np.zeros((3, 2)))

    def test_state_count(self):
        with self.assertRaises(DimensionMismatchError):
            Trajectory([0.0, 0.1], np.zeros((3, 2)))

    def test_sample(self):
        traj = Trajectory(np.arange(7) * 0.1, np.arange(14.0).reshape(7, 2))
        sampled = traj.sample(3)
        self.assertEqual(len(sampled), 3)
        np.testing.assert_array_equal(sampled.endpoint, [12.0, 13.0])
