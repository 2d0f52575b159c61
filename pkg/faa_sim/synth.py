# -*- coding: utf-8 -*-

import logging
import math
from dataclasses import dataclass
from typing import Any, Union, Optional, Tuple, Sequence

import numpy as np
import scipy.fft

from .base import (C, ChannelAxis, FrequencyPlan, ChirpConfig, Scene, NoiseConfig, Measurement, AliasingError,
                   ConfigError, GeometryError, range_of, check_forward)
from .dispersion import DispersionModel, aperture_angles

logger = logging.getLogger(__name__)

FOUR_LN2 = 4.0 * math.log(2.0)


@dataclass(frozen=True)
class AntennaModel:
    # 高斯主瓣替代模型, 单程半功率波束宽度 = lambda(f)/L_phys
    L_phys: float = 0.12
    two_way: bool = True
    pattern: str = 'gaussian'

    def __post_init__(self):
        if not self.L_phys > 0:
            raise ConfigError('L_phys must be > 0, got {}'.format(self.L_phys))
        if self.pattern not in ('gaussian', 'isotropic'):
            raise ConfigError('antenna pattern must be gaussian or isotropic, got {!r}'.format(self.pattern))

    def hp_beamwidth(self, f: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return (C / np.asarray(f, dtype=float)) / self.L_phys


@dataclass(frozen=True)
class ScheduleEntry:
    m: int
    t_start: float
    t_tx_end: float
    t_rx_start: float
    t_rx_end: float
    f_c: float
    theta: float


@dataclass(frozen=True)
class FrameSchedule:
    entries: Tuple[ScheduleEntry, ...]
    T_frame: float


@dataclass(frozen=True)
class RangeProfile:
    spectrum: np.ndarray
    ranges: np.ndarray
    beat_frequencies: np.ndarray

    def peak_bin(self) -> int:
        return int(np.argmax(np.abs(self.spectrum)))

    def peak_range(self) -> float:
        return float(self.ranges[self.peak_bin()])


def antenna_gain(model: AntennaModel, f: Union[float, np.ndarray], theta_beam: Union[float, np.ndarray], p: Any,
                 axis: ChannelAxis) -> Union[complex, np.ndarray]:
    # 只在扫描平面内有方向性, 正交平面无锥削
    x, y, z = check_forward(p)
    if model.pattern == 'isotropic':
        gain = np.ones(np.broadcast(np.asarray(f), np.asarray(theta_beam)).shape)
    else:
        theta_target = math.atan2(x, z) if axis == ChannelAxis.XScan else math.atan2(y, z)
        delta = (theta_target - np.asarray(theta_beam, dtype=float)) / model.hp_beamwidth(f)
        gain = np.exp(-FOUR_LN2 * delta ** 2)
        if model.two_way:
            gain = gain * gain
    gain = gain.astype(complex)
    return complex(gain) if gain.ndim == 0 else gain


def phase_curvature(f: Union[float, np.ndarray], p: Any) -> Union[float, np.ndarray]:
    # 不做2*pi取模
    phase = 4.0 * math.pi * np.asarray(f, dtype=float) * range_of(p) / C
    return float(phase) if phase.ndim == 0 else phase


def synthesize_sample(m: Union[int, np.ndarray], f: Union[float, np.ndarray], p: Any, alpha: complex,
                      G: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
    # 无噪声样本, 噪声在测量层面叠加; m只作索引标注
    sample = alpha * np.asarray(G, dtype=complex) * np.exp(-1j * np.asarray(phase_curvature(f, p)))
    return complex(sample) if sample.ndim == 0 else sample


def _channel_signal(scene: Scene, freqs: np.ndarray, thetas: np.ndarray, antenna: AntennaModel,
                    axis: ChannelAxis) -> np.ndarray:
    m = np.arange(1, freqs.size + 1)
    signal = np.zeros(freqs.size, dtype=complex)
    for target in scene.targets:
        gain = antenna_gain(antenna, freqs, thetas, target.p, axis)
        signal += synthesize_sample(m, freqs, target.p, target.alpha(axis), gain)
    return signal


def noise_sample(noise: NoiseConfig, axis: ChannelAxis, m: int) -> complex:
    # 计数器型子流: (seed, stream..., channel, m) 唯一确定一个Philox生成器, 与计算顺序无关
    seq = np.random.SeedSequence(noise.seed, spawn_key=noise.stream + (int(axis), int(m)))
    rng = np.random.Generator(np.random.Philox(seq))
    re, im = rng.standard_normal(2)
    return complex(re, im) / math.sqrt(2.0)


def noise_vector(noise: NoiseConfig, axis: ChannelAxis, M: int) -> np.ndarray:
    return np.array([noise_sample(noise, axis, m) for m in range(1, M + 1)], dtype=complex)


def noise_variance(s_x: np.ndarray, s_y: np.ndarray, snr_db: Optional[float]) -> float:
    # SNR以两通道无噪声合成信号的平均单样本功率为参考
    if snr_db is None:
        return 0.0
    p_sig = float(np.mean(np.concatenate((np.abs(s_x) ** 2, np.abs(s_y) ** 2))))
    return p_sig / 10.0 ** (snr_db / 10.0)


def simulate_measurement(scene: Scene, plan: FrequencyPlan, model: DispersionModel,
                         antenna: AntennaModel) -> Measurement:
    freqs, thetas = aperture_angles(plan, model)
    s_x = _channel_signal(scene, freqs, thetas, antenna, ChannelAxis.XScan)
    s_y = _channel_signal(scene, freqs, thetas, antenna, ChannelAxis.YScan)
    sigma2 = noise_variance(s_x, s_y, scene.noise.snr_db)
    if sigma2 > 0:
        sigma = math.sqrt(sigma2)
        s_x = s_x + sigma * noise_vector(scene.noise, ChannelAxis.XScan, plan.M)
        s_y = s_y + sigma * noise_vector(scene.noise, ChannelAxis.YScan, plan.M)
    logger.debug('simulated %d target(s) over M=%d points, noise variance %g', len(scene.targets), plan.M, sigma2)
    return Measurement(plan, s_x, s_y)


def beat_frequency(chirp: ChirpConfig, R: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    return 2.0 * chirp.k * np.asarray(R, dtype=float) / C


def range_axis(chirp: ChirpConfig) -> np.ndarray:
    q = np.arange(chirp.N_s, dtype=float)
    return C * q * chirp.f_s / (2.0 * chirp.k * chirp.N_s)


def dechirp_range_profile(chirp: ChirpConfig, targets: Sequence[Tuple[float, complex]]) -> RangeProfile:
    ranges = np.array([float(R) for R, _ in targets], dtype=float)
    amplitudes = np.array([complex(A) for _, A in targets], dtype=complex)
    if np.any(~(ranges > 0)):
        raise GeometryError('dechirp targets need R > 0, got {}'.format(ranges[~(ranges > 0)][0]))
    beats = beat_frequency(chirp, ranges)
    if np.any(beats >= chirp.f_s / 2.0):
        raise AliasingError('beat frequency {} Hz >= f_s/2 = {} Hz'.format(beats.max(), chirp.f_s / 2.0))
    t = np.arange(chirp.N_s, dtype=float) / chirp.f_s
    beat_signal = np.zeros(chirp.N_s, dtype=complex)
    for A, f_b in zip(amplitudes, beats):
        beat_signal += A * np.exp(2j * math.pi * f_b * t)
    return RangeProfile(scipy.fft.fft(beat_signal), range_axis(chirp), beats)


def frame_schedule(plan: FrequencyPlan, chirp: ChirpConfig, model: DispersionModel) -> FrameSchedule:
    if not chirp.T_guard < chirp.T_c / 2.0:
        raise ConfigError('invalid guard: T_guard={} s must be < T_c/2={} s'.format(chirp.T_guard, chirp.T_c / 2.0))
    chirp.check_plan(plan)
    freqs, thetas = aperture_angles(plan, model)
    # 每个chirp时隙: Tx窗口, 保护间隔, Rx窗口
    window = (chirp.T_c - chirp.T_guard) / 2.0
    entries = []
    for m, (f, theta) in enumerate(zip(freqs, thetas), 1):
        t0 = (m - 1) * chirp.T_c
        entries.append(ScheduleEntry(m, t0, t0 + window, t0 + window + chirp.T_guard, t0 + chirp.T_c, float(f),
                                     float(theta)))
    return FrameSchedule(tuple(entries), chirp.T_frame(plan))


def scene_range_profiles(scene: Scene, plan: FrequencyPlan, model: DispersionModel, antenna: AntennaModel,
                         chirp: ChirpConfig) -> Tuple[np.ndarray, np.ndarray]:
    # 短时尺度: 每个频点m一条dechirp距离像S_m(R), 取x通道
    freqs, thetas = aperture_angles(plan, model)
    profiles = np.zeros((plan.M, chirp.N_s), dtype=complex)
    for i, (f, theta) in enumerate(zip(freqs, thetas)):
        components = []
        for target in scene.targets:
            gain = antenna_gain(antenna, f, theta, target.p, ChannelAxis.XScan)
            components.append((range_of(target.p), synthesize_sample(i + 1, f, target.p, target.alpha_x, gain)))
        if components:
            profiles[i] = dechirp_range_profile(chirp, components).spectrum
    return profiles, range_axis(chirp)
