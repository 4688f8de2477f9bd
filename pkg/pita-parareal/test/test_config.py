"""
Tests for configuration parsing, presets and the key schema.
"""

import os
import shutil
import tempfile
from unittest import TestCase

import numpy as np

from pita.config import PRESETS, SCHEMA, describe_schema, parse_config
from pita.exceptions import ConfigError, OddOrderError, ScheduleViolationError
from pita.parareal import ClassicMode, SemiExplicitMode

SIGMA_YAML = """\
system.A: [[-1, 5], [-5, -1]]
system.B: [0, 1]
system.u: [10]
system.y0: [0, 1]
grid.Tf: 0.9
"""


class ParseConfigTest(TestCase):
    """Tests for parse_config."""

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def write(self, text, name='experiment.yaml'):
        path = os.path.join(self.tmp, name)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def test_preset_loads_sigma(self):
        config = parse_config(preset='paper-sigma')
        np.testing.assert_array_equal(config.system.A, [[-1.0, 5.0], [-5.0, -1.0]])
        np.testing.assert_array_equal(config.system.forcing, [0.0, 10.0])
        np.testing.assert_array_equal(config.system.y0, [0.0, 1.0])
        self.assertEqual(config.grid.N, 9)
        self.assertEqual(config.parareal.iterations, 8)
        self.assertEqual((config.accel.k, config.accel.n), (4, 2))
        self.assertIsInstance(config.parareal.mode, SemiExplicitMode)
        self.assertEqual(config.report_scale, 4)
        self.assertEqual(config.parareal.coarse_steps, 14)
        self.assertEqual(parse_config(preset='sigma').values, config.values)

    def test_one_coarse_step_where_whole(self):
        self.assertEqual(parse_config(preset='sigma-d100-s1').parareal.coarse_steps, 1)
        self.assertEqual(parse_config(preset='sigma-d500-s5').parareal.coarse_steps, 1)
        self.assertEqual(parse_config(preset='sigma-d50-s0.5').parareal.coarse_steps, 2)
        self.assertEqual(parse_config(preset='sigma-d100-s0.1').parareal.coarse_steps, 10)

    def test_every_preset_is_valid(self):
        for name in PRESETS:
            config = parse_config(preset=name)
            self.assertEqual(config.mode, 'parareal-semi')

    def test_file(self):
        config = parse_config(self.write(SIGMA_YAML))
        self.assertEqual(config.grid.Tf, 0.9)
        self.assertAlmostEqual(config.h0, 0.1)
        self.assertEqual(config.seed, 0)

    def test_nested_mapping(self):
        path = self.write("system:\n  A: [[-2]]\n  B: [1]\n  u: [1]\n  y0: [0]\ngrid:\n  Tf: 1.0\n  N: 4\n")
        config = parse_config(path)
        self.assertEqual(config.system.dim, 1)
        self.assertEqual(config.grid.N, 4)

    def test_missing_Tf(self):
        path = self.write(SIGMA_YAML.replace("grid.Tf: 0.9\n", ""))
        with self.assertRaises(ConfigError) as cm:
            parse_config(path)
        self.assertIn('grid.Tf', str(cm.exception))

    def test_unknown_key(self):
        with self.assertRaises(ConfigError) as cm:
            parse_config(self.write(SIGMA_YAML + "grid.tf: 1.0\n"))
        self.assertIn('grid.tf', str(cm.exception))

    def test_wrong_type(self):
        with self.assertRaises(ConfigError) as cm:
            parse_config(self.write(SIGMA_YAML + "grid.N: many\n"))
        self.assertIn('grid.N', str(cm.exception))

    def test_yaml_syntax_error(self):
        with self.assertRaises(ConfigError) as cm:
            parse_config(self.write(SIGMA_YAML + "grid.N: [9\n"))
        self.assertIn('invalid YAML', str(cm.exception))
        self.assertIn('experiment.yaml:', str(cm.exception))

    def test_directory_as_file(self):
        with self.assertRaises(ConfigError) as cm:
            parse_config(self.tmp)
        self.assertIn('cannot read config file', str(cm.exception))

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            parse_config(os.path.join(self.tmp, 'absent.yaml'))

    def test_schedule_violation(self):
        with self.assertRaises(ScheduleViolationError):
            parse_config(preset='sigma', assignments=['schedule.delta_step=2'])

    def test_odd_order(self):
        with self.assertRaises(OddOrderError):
            parse_config(preset='sigma', assignments=['accel.k=3'])

    def test_precedence(self):
        path = self.write(SIGMA_YAML + "seed: 5\ngrid.N: 3\n")
        config = parse_config(path, preset='sigma', assignments=['seed=6', 'anneal.steps=10'])
        self.assertEqual(config.grid.N, 3)
        self.assertEqual(config.seed, 6)
        self.assertEqual(config.anneal.steps, 10)
        config = parse_config(path, assignments=['seed=6'], seed=7, out=self.tmp)
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.anneal.seed, 7)
        self.assertEqual(str(config.out), self.tmp)

    def test_bad_assignment(self):
        with self.assertRaises(ConfigError):
            parse_config(preset='sigma', assignments=['seed'])

    def test_unknown_preset(self):
        with self.assertRaises(ConfigError):
            parse_config(preset='nothing')

    def test_classic_mode(self):
        with self.assertRaises(ConfigError):
            parse_config(preset='sigma', assignments=['mode=parareal-classic'])
        config = parse_config(preset='sigma', assignments=[
            'mode=parareal-classic', 'parareal.fine_step=0.001', 'parareal.coarse_kind=explicit'])
        self.assertIsInstance(config.parareal.mode, ClassicMode)
        self.assertEqual(config.parareal.mode.coarse_kind.value, 'explicit')

    def test_invalid_choice(self):
        with self.assertRaises(ConfigError):
            parse_config(preset='sigma', assignments=['calibration.mode=sometimes'])

    def test_with_mode(self):
        config = parse_config(preset='sigma').with_mode('euler-study')
        self.assertEqual(config.mode, 'euler-study')
        self.assertEqual(config.study.subdivisions.deltas[0], 1)


class SchemaTest(TestCase):
    """Tests for the documented key table."""

    def test_every_key_documented(self):
        text = describe_schema()
        for name in SCHEMA:
            self.assertIn(name, text)
        self.assertIn('sigma', text)
