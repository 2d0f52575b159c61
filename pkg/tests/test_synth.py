# -*- coding: utf-8 -*-

import cmath
import math
import unittest
import sys
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

sys.path.insert(0, os.path.abspath('..'))

from faa_sim.base import (C, ChannelAxis, ChirpConfig, Target, NoiseConfig, Scene, AliasingError,
                          ConfigError, GeometryError)
from faa_sim.dispersion import aperture_angles
from faa_sim.synth import (AntennaModel, antenna_gain, phase_curvature, synthesize_sample,
                           noise_sample, noise_vector, dechirp_range_profile, range_axis, beat_frequency,
                           frame_schedule, scene_range_profiles)
import tests.base_case

# 例: k=2.34375e12 Hz/s, f_s=1 MHz, N_s=64 时 2kR/c 恰为第3个频点
EXACT_BIN_CHIRP = ChirpConfig(100e-6, 5e-6, 2.34375e12, 64, 1e6)
EXACT_BIN_RANGE = 46875.0 * C / (2 * 2.34375e12)


def naive_dft(x):
    n = np.arange(len(x))
    return np.array([np.sum(x * np.exp(-2j * math.pi * q * n / len(x))) for q in range(len(x))])


class AntennaGainTestCase(tests.base_case.FaaTestCase):

    def test_hp_beamwidth(self):
        self.assertAlmostEqual(0.039655, self.antenna.hp_beamwidth(63e9), places=6)

    def test_half_power(self):
        f = 63e9
        half = AntennaModel(0.12).hp_beamwidth(f) / 2
        p = (0.0, 0.0, 2.0)
        self.assertAlmostEqual(1.0, abs(antenna_gain(self.antenna, f, 0.0, p, ChannelAxis.XScan)), places=12)
        self.assertAlmostEqual(0.5, abs(antenna_gain(AntennaModel(0.12, False), f, -half, p, ChannelAxis.XScan)),
                               places=12)
        self.assertAlmostEqual(0.25, abs(antenna_gain(AntennaModel(0.12, True), f, half, p, ChannelAxis.XScan)),
                               places=12)

    def test_axis_plane(self):
        # 正交平面内无锥削
        p = (0.5, 0.0, 2.0)
        self.assertAlmostEqual(1.0, abs(antenna_gain(self.antenna, 63e9, 0.0, p, ChannelAxis.YScan)), places=12)
        self.assertLess(abs(antenna_gain(self.antenna, 63e9, 0.0, p, ChannelAxis.XScan)), 1e-6)

    def test_isotropic(self):
        antenna = AntennaModel(0.12, True, 'isotropic')
        gains = antenna_gain(antenna, self.plan.grid(), np.zeros(self.plan.M), (1.0, -1.0, 1.0), ChannelAxis.XScan)
        np.testing.assert_array_equal(np.ones(self.plan.M), gains)

    def test_invalid(self):
        with self.assertRaises(ConfigError):
            AntennaModel(0.0)
        with self.assertRaises(ConfigError):
            AntennaModel(0.12, True, 'cosine')


class SampleTestCase(unittest.TestCase):

    def test_phase_curvature(self):
        R = C / 2.4e11
        self.assertAlmostEqual(math.pi, phase_curvature(60e9, (0, 0, R)), places=12)
        self.assertAlmostEqual(2 * math.pi, phase_curvature(60e9, (0, 0, 2 * R)), places=12)
        self.assertEqual(0.0, phase_curvature(0.0, (0, 0, R)))

    def test_synthesize_sample(self):
        R = C / 2.4e11
        self.assertEqual(0j, synthesize_sample(1, 60e9, (0, 0, R), 0j, 1.0))
        self.assertEqual(0j, synthesize_sample(1, 60e9, (0, 0, R), 1 + 0j, 0.0))
        sample = synthesize_sample(1, 60e9, (0, 0, R), 1 + 0j, 1.0)
        self.assertAlmostEqual(-1.0, sample.real, places=12)
        self.assertAlmostEqual(0.0, sample.imag, places=12)

    def test_sample_against_scalar(self):
        # 逐点标量计算 alpha*G*exp(-j*4*pi*f*R/c)
        rng = np.random.default_rng(17)
        antenna = AntennaModel(0.12)
        for _ in range(50):
            f = float(rng.uniform(60e9, 66e9))
            x, y, z = (float(v) for v in rng.uniform((-1.0, -1.0, 0.5), (1.0, 1.0, 4.0)))
            alpha = complex(*rng.normal(size=2))
            theta = float(rng.uniform(-1.0, 1.0))
            G = antenna_gain(antenna, f, theta, (x, y, z), ChannelAxis.XScan)
            delta = (math.atan2(x, z) - theta) / ((C / f) / 0.12)
            self.assertAlmostEqual(math.exp(-2.0 * 4.0 * math.log(2.0) * delta ** 2), G.real, delta=1e-12)
            R = math.sqrt(x * x + y * y + z * z)
            expected = alpha * G * cmath.exp(-1j * 4.0 * math.pi * f * R / C)
            actual = synthesize_sample(1, f, (x, y, z), alpha, G)
            self.assertLessEqual(abs(actual - expected), 1e-9 * max(abs(expected), 1e-300))


class SimulateTestCase(tests.base_case.FaaTestCase):

    def test_empty_scene(self):
        for snr_db in (None, 10.0):
            with self.subTest(snr_db=snr_db):
                meas = self.simulate(snr_db=snr_db)
                np.testing.assert_array_equal(np.zeros(self.plan.M), meas.s_x)
                np.testing.assert_array_equal(np.zeros(self.plan.M), meas.s_y)

    def test_single_target(self):
        target = Target((0.1, -0.05, 2.0), 0.7 - 0.2j, 0.3j)
        meas = self.simulate(target)
        freqs, thetas = aperture_angles(self.plan, self.model)
        for axis, alpha, signal in ((ChannelAxis.XScan, target.alpha_x, meas.s_x),
                                    (ChannelAxis.YScan, target.alpha_y, meas.s_y)):
            expected = [synthesize_sample(m, f, target.p, alpha,
                                          antenna_gain(self.antenna, f, theta, target.p, axis))
                        for m, (f, theta) in enumerate(zip(freqs, thetas), 1)]
            np.testing.assert_allclose(expected, signal, rtol=1e-12, atol=1e-300)

    def test_superposition(self):
        a = Target((0.05, 0.02, 1.5), 1 + 1j)
        b = Target((-0.2, 0.1, 2.5), 0.5)
        both = self.simulate(a, b)
        np.testing.assert_allclose(self.simulate(a).s_x + self.simulate(b).s_x, both.s_x, rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(self.simulate(a).s_y + self.simulate(b).s_y, both.s_y, rtol=1e-12, atol=1e-15)

    def test_noise_reproducible(self):
        target = Target((0.0, 0.0, 2.0))
        first = self.simulate(target, snr_db=0.0, seed=7)
        np.testing.assert_array_equal(first.s_x, self.simulate(target, snr_db=0.0, seed=7).s_x)
        self.assertFalse(np.array_equal(first.s_x, self.simulate(target, snr_db=0.0, seed=8).s_x))
        with ThreadPoolExecutor(max_workers=4) as executor:
            runs = list(executor.map(lambda _: self.simulate(target, snr_db=0.0, seed=7), range(8)))
        for run in runs:
            np.testing.assert_array_equal(first.s_x, run.s_x)
            np.testing.assert_array_equal(first.s_y, run.s_y)

    def test_noise_order_independent(self):
        noise = NoiseConfig(0.0, 11, (2, 5))
        vector = noise_vector(noise, ChannelAxis.YScan, 16)
        for m in reversed(range(1, 17)):
            self.assertEqual(vector[m - 1], noise_sample(noise, ChannelAxis.YScan, m))
        self.assertNotEqual(noise_sample(noise, ChannelAxis.XScan, 1), noise_sample(noise, ChannelAxis.YScan, 1))

    def test_noise_power(self):
        samples = noise_vector(NoiseConfig(0.0, 3), ChannelAxis.XScan, 20000)
        self.assertAlmostEqual(1.0, float(np.mean(np.abs(samples) ** 2)), delta=0.05)

    def test_snr_scaling(self):
        target = Target((0.0, 0.0, 2.0))
        clean = self.simulate(target)
        noisy = self.simulate(target, snr_db=20.0, seed=1)
        p_sig = np.mean(np.concatenate((np.abs(clean.s_x) ** 2, np.abs(clean.s_y) ** 2)))
        residual = np.concatenate((noisy.s_x - clean.s_x, noisy.s_y - clean.s_y))
        expected = math.sqrt(p_sig / 100.0) * np.concatenate(
            (noise_vector(NoiseConfig(20.0, 1), ChannelAxis.XScan, self.plan.M),
             noise_vector(NoiseConfig(20.0, 1), ChannelAxis.YScan, self.plan.M)))
        np.testing.assert_allclose(expected, residual, rtol=1e-9, atol=1e-12)


class DechirpTestCase(unittest.TestCase):

    def test_exact_bin(self):
        profile = dechirp_range_profile(EXACT_BIN_CHIRP, [(EXACT_BIN_RANGE, 1.0)])
        self.assertEqual(3, profile.peak_bin())
        self.assertAlmostEqual(2.99792458, EXACT_BIN_RANGE, places=9)
        self.assertAlmostEqual(EXACT_BIN_RANGE, profile.peak_range(), places=9)
        self.assertAlmostEqual(46875.0, float(profile.beat_frequencies[0]), places=6)

    def test_near_zero_range(self):
        self.assertEqual(0, dechirp_range_profile(EXACT_BIN_CHIRP, [(1e-6, 2.0)]).peak_bin())

    def test_two_targets(self):
        ranges = range_axis(EXACT_BIN_CHIRP)
        profile = dechirp_range_profile(EXACT_BIN_CHIRP, [(ranges[3], 1.0), (ranges[10], 0.8j)])
        mag = np.abs(profile.spectrum)
        for q in (3, 10):
            with self.subTest(q=q):
                self.assertGreater(mag[q], mag[q - 1])
                self.assertGreater(mag[q], mag[q + 1])

    def _beat_signal(self, chirp, targets):
        t = np.arange(chirp.N_s) / chirp.f_s
        return sum(A * np.exp(2j * math.pi * beat_frequency(chirp, R) * t) for R, A in targets)

    def test_parseval(self):
        targets = [(1.3, 1.0), (7.7, 0.4 - 0.3j), (12.1, 0.05j)]
        x = self._beat_signal(EXACT_BIN_CHIRP, targets)
        X = dechirp_range_profile(EXACT_BIN_CHIRP, targets).spectrum
        energy = float(np.sum(np.abs(x) ** 2))
        self.assertLessEqual(abs(energy - float(np.sum(np.abs(X) ** 2)) / len(X)), 1e-9 * energy)

    def test_naive_dft(self):
        targets = [(2.2, 1.0), (9.4, 0.6j)]
        X = dechirp_range_profile(EXACT_BIN_CHIRP, targets).spectrum
        oracle = naive_dft(self._beat_signal(EXACT_BIN_CHIRP, targets))
        np.testing.assert_allclose(oracle, X, rtol=1e-9, atol=1e-9)
        self.assertEqual(int(np.argmax(np.abs(oracle))), int(np.argmax(np.abs(X))))

    def test_errors(self):
        with self.assertRaises(AliasingError):
            dechirp_range_profile(EXACT_BIN_CHIRP, [(40.0, 1.0)])
        for R in (0.0, -1.0):
            with self.subTest(R=R):
                with self.assertRaises(GeometryError):
                    dechirp_range_profile(EXACT_BIN_CHIRP, [(R, 1.0)])


class FrameScheduleTestCase(tests.base_case.FaaTestCase):

    def test_schedule(self):
        chirp = ChirpConfig.for_plan(self.plan)
        schedule = frame_schedule(self.plan, chirp, self.model)
        self.assertAlmostEqual(12.8e-3, schedule.T_frame, places=12)
        self.assertEqual(self.plan.M, len(schedule.entries))
        freqs, thetas = aperture_angles(self.plan, self.model)
        previous_end = 0.0
        for entry in schedule.entries:
            with self.subTest(m=entry.m):
                self.assertAlmostEqual((entry.m - 1) * 100e-6, entry.t_start, places=15)
                self.assertAlmostEqual(47.5e-6, entry.t_tx_end - entry.t_start, places=15)
                self.assertAlmostEqual(5e-6, entry.t_rx_start - entry.t_tx_end, places=15)
                self.assertAlmostEqual(47.5e-6, entry.t_rx_end - entry.t_rx_start, places=15)
                self.assertGreaterEqual(entry.t_start, previous_end - 1e-15)
                self.assertEqual(freqs[entry.m - 1], entry.f_c)
                self.assertEqual(thetas[entry.m - 1], entry.theta)
                previous_end = entry.t_rx_end

    def test_invalid_guard(self):
        with self.assertRaises(ConfigError):
            frame_schedule(self.plan, ChirpConfig(100e-6, 50e-6, self.plan.step / 100e-6, 64, 1e6), self.model)

    def test_tiling_mismatch(self):
        with self.assertRaises(ConfigError):
            frame_schedule(self.plan, ChirpConfig(100e-6, 5e-6, 1e12, 64, 1e6), self.model)


class RangeProfilesTestCase(tests.base_case.FaaTestCase):
    M = 8
    pattern = 'isotropic'

    def test_shape(self):
        chirp = ChirpConfig.for_plan(self.plan)
        scene = Scene((Target((0.0, 0.0, 6.0)),))
        profiles, ranges = scene_range_profiles(scene, self.plan, self.model, self.antenna, chirp)
        self.assertEqual((self.plan.M, chirp.N_s), profiles.shape)
        np.testing.assert_allclose(range_axis(chirp), ranges)
        # 各向同性方向图下每个频点都能看到目标
        expected_bin = int(round(6.0 / ranges[1]))
        self.assertEqual(expected_bin, int(np.argmax(np.abs(profiles[self.plan.M // 2]))))

    def test_empty(self):
        chirp = ChirpConfig.for_plan(self.plan)
        profiles, _ = scene_range_profiles(Scene(), self.plan, self.model, self.antenna, chirp)
        np.testing.assert_array_equal(np.zeros((self.plan.M, chirp.N_s)), profiles)


if __name__ == '__main__':
    unittest.main()
