# -*- coding: utf-8 -*-

import copy
import json
import math
import unittest
import sys
import os
import tempfile
from unittest import mock

sys.path.insert(0, os.path.abspath('..'))

from faa_sim.base import ChannelAxis, FrequencyPlan, ConfigError
from faa_sim.dispersion import LinearSine, LookupTable
from faa_sim.config import ExperimentConfig, parse_config, load_config

BASE = {
    'plan': {'f_min_hz': 60e9, 'f_max_hz': 66e9, 'M': 16},
    'dispersion': {'kind': 'linear_sine', 'theta_max_deg': 60.0},
    'antenna': {'L_phys_m': 0.12, 'two_way': True},
    'chirp': {'T_c_s': 100e-6, 'T_guard_s': 5e-6, 'N_s': 64, 'f_s_hz': 1e6},
    'scene': {'targets': [{'x_m': 0.0, 'y_m': 0.1, 'z_m': 2.0}], 'snr_db': 20, 'seed': 3},
    'grid': {'x_range_m': [-0.1, 0.1], 'y_range_m': [-0.1, 0.1], 'z_range_m': [1.5, 2.5], 'counts': [3, 3, 5]},
}


def _with(**sections):
    data = copy.deepcopy(BASE)
    for key, value in sections.items():
        if value is None:
            data.pop(key, None)
        else:
            data[key] = value
    return data


class ParseConfigTestCase(unittest.TestCase):

    def test_full(self):
        config = parse_config(BASE, 'base.json')
        self.assertEqual(FrequencyPlan(60e9, 66e9, 16), config.plan)
        self.assertIsInstance(config.dispersion, LinearSine)
        self.assertTrue(config.antenna.two_way)
        self.assertEqual('gaussian', config.antenna.pattern)
        # 斜率由频带拼接推出
        self.assertAlmostEqual(6e9 / 16 / 100e-6, config.chirp.k, delta=1.0)
        self.assertEqual(20.0, config.scene.noise.snr_db)
        self.assertEqual(3, config.scene.noise.seed)
        self.assertEqual((3, 3, 5), config.grid.counts)
        self.assertIsNone(config.architectures)
        self.assertEqual(3.0, config.r_query_m)
        self.assertEqual('base.json', config.source)

    def test_targets(self):
        scene = {'targets': [{'x_m': 0, 'y_m': 0, 'z_m': 1, 'alpha_re': 2, 'alpha_im': -1},
                             {'x_m': 0, 'y_m': 0, 'z_m': 1, 'alpha_x_re': 1, 'alpha_y_im': 1}],
                 'snr_db': 'noiseless'}
        config = parse_config(_with(scene=scene))
        first, second = config.scene.targets
        self.assertEqual(2 - 1j, first.alpha(ChannelAxis.XScan))
        self.assertEqual(2 - 1j, first.alpha(ChannelAxis.YScan))
        self.assertEqual((1 + 0j, 1j), (second.alpha_x, second.alpha_y))
        self.assertTrue(config.scene.noise.noiseless)
        self.assertEqual(0, config.scene.noise.seed)

    def test_sections_optional(self):
        config = parse_config({'plan': BASE['plan']})
        self.assertIsNone(config.scene)
        with self.assertRaises(ConfigError) as cm:
            config.require('plan', 'scene', 'grid')
        self.assertIn('scene, grid', str(cm.exception))

    def test_architectures(self):
        arch = {'name': 'X', 'rf_chains': 1, 'L_m': 0.12, 'B_hz': 6e9, 'M': 128, 'aperture_kind': 'virtual',
                'f_ref_hz': 63e9, 'power_mw': 850, 'cost_usd': 55, 'fov_deg': 60, 'paper_eta': 926}
        config = parse_config({'architectures': [arch], 'compare': {'r_query_m': 5.0, 'baseline': 'X'}, 'workers': 2})
        self.assertEqual(('X',), tuple(a.name for a in config.architectures))
        self.assertEqual((5.0, 'X', 2), (config.r_query_m, config.baseline, config.workers))

    def test_with_seed(self):
        config = parse_config(BASE)
        self.assertIs(config, config.with_seed(None))
        reseeded = config.with_seed(11)
        self.assertEqual(11, reseeded.scene.noise.seed)
        self.assertEqual(config.scene.targets, reseeded.scene.targets)
        self.assertEqual(20.0, reseeded.scene.noise.snr_db)
        empty = ExperimentConfig()
        self.assertIs(empty, empty.with_seed(11))

    def test_invalid(self):
        cases = {
            'unknown top-level': dict(BASE, extra={}),
            'unknown plan key': _with(plan={'f_min_hz': 60e9, 'f_max_hz': 66e9, 'M': 16, 'f_c': 63e9}),
            'bad M': _with(plan={'f_min_hz': 60e9, 'f_max_hz': 66e9, 'M': 16.5}),
            'missing f_max': _with(plan={'f_min_hz': 60e9, 'M': 16}),
            'string number': _with(antenna={'L_phys_m': '0.12'}),
            'bad two_way': _with(antenna={'two_way': 'yes'}),
            'bad pattern': _with(antenna={'pattern': 'cosine'}),
            'bad kind': _with(dispersion={'kind': 'quadratic'}),
            'no table path': _with(dispersion={'kind': 'lookup_table'}),
            'linear without plan': _with(plan=None),
            'bad snr': _with(scene={'targets': [], 'snr_db': 'loud'}),
            'target behind': _with(scene={'targets': [{'x_m': 0, 'y_m': 0, 'z_m': -1}]}),
            'unknown target key': _with(scene={'targets': [{'x_m': 0, 'y_m': 0, 'z_m': 1, 'rcs': 1}]}),
            'bad counts': _with(grid=dict(BASE['grid'], counts=[3, 3])),
            'bad range': _with(grid=dict(BASE['grid'], z_range_m=[2.5])),
            'bad architecture': {'architectures': [{'name': 'X'}]},
            'bad workers': dict(BASE, workers='four'),
            'not an object': [],
        }
        for name, data in cases.items():
            with self.subTest(name):
                with self.assertRaises(ConfigError):
                    parse_config(data, 'test.json')

    def test_error_names_source(self):
        with self.assertRaises(ConfigError) as cm:
            parse_config(_with(plan={'f_min_hz': 60e9, 'M': 16}), 'test.json')
        self.assertIn('test.json', str(cm.exception))
        self.assertIn('f_max_hz', str(cm.exception))


class LoadConfigTestCase(unittest.TestCase):

    def setUp(self) -> None:
        self.tmpdir = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmpdir.name, 'config.json')

    def tearDown(self) -> None:
        self.tmpdir.cleanup()

    def _write(self, text):
        with open(self.path, 'w', encoding='utf-8') as f:
            f.write(text)

    def test_load(self):
        self._write(json.dumps(BASE))
        self.assertEqual(16, load_config(self.path).plan.M)
        with mock.patch.dict(os.environ, {'FAA_CONFIG': self.path}):
            self.assertEqual(self.path, load_config().source)

    def test_no_config(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            with self.assertRaises(ConfigError):
                load_config()
        with self.assertRaises(ConfigError):
            load_config(os.path.join(self.tmpdir.name, 'missing.json'))

    def test_json_error_line(self):
        self._write('{\n  "plan": {"M": 16,}\n}\n')
        with self.assertRaises(ConfigError) as cm:
            load_config(self.path)
        self.assertIn('line 2', str(cm.exception))

    def test_not_utf8(self):
        with open(self.path, 'wb') as f:
            f.write(b'{"plan": "\xe9t\xe9"}')
        with self.assertRaises(ConfigError) as cm:
            load_config(self.path)
        self.assertIn(self.path, str(cm.exception))

    def test_table_relative_to_config(self):
        with open(os.path.join(self.tmpdir.name, 'table.csv'), 'w', encoding='utf-8') as f:
            f.write('frequency_hz,angle_deg\n60e9,-50\n66e9,50\n')
        self._write(json.dumps(_with(dispersion={'kind': 'lookup_table', 'table_path': 'table.csv'})))
        config = load_config(self.path)
        self.assertIsInstance(config.dispersion, LookupTable)
        self.assertAlmostEqual(0.0, math.degrees(config.dispersion.beam_angle(63e9)), places=9)


if __name__ == '__main__':
    unittest.main()
