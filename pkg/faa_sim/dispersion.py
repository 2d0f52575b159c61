# -*- coding: utf-8 -*-

import logging
import math
from dataclasses import dataclass
from typing import Union, Optional, List, Sequence, Tuple

import numpy as np

from .base import FrequencyPlan, ChannelAxis, BandError, ConfigError
from ._records import RecordCollection

logger = logging.getLogger(__name__)

FloatOrArray = Union[float, np.ndarray]


class DispersionModel(object):
    kind = None

    # 子类需提供: f_min, f_max(标定频带), _angle(f), _frequency(theta)

    f_min: float
    f_max: float

    def beam_angle(self, f: FloatOrArray) -> FloatOrArray:
        self.check_band(f)
        return self._angle(f)

    def frequency_for_angle(self, theta: FloatOrArray) -> FloatOrArray:
        theta_arr = np.asarray(theta, dtype=float)
        lo, hi = self._angle(self.f_min), self._angle(self.f_max)
        if np.any(theta_arr < lo) or np.any(theta_arr > hi):
            raise BandError('angle {} outside the scan range [{}, {}] rad'.format(theta, lo, hi))
        return self._frequency(theta)

    def check_band(self, f: FloatOrArray) -> None:
        f_arr = np.asarray(f, dtype=float)
        if np.any(~np.isfinite(f_arr)) or np.any(f_arr < self.f_min) or np.any(f_arr > self.f_max):
            bad = f_arr[(f_arr < self.f_min) | (f_arr > self.f_max) | ~np.isfinite(f_arr)] if f_arr.ndim else f_arr
            raise BandError('frequency {} Hz outside the calibrated band [{}, {}] Hz'.format(
                np.ravel(bad)[0], self.f_min, self.f_max))

    def _angle(self, f: FloatOrArray) -> FloatOrArray:
        raise NotImplementedError

    def _frequency(self, theta: FloatOrArray) -> FloatOrArray:
        raise NotImplementedError


class LinearSine(DispersionModel):
    kind = 'linear_sine'

    def __init__(self, theta_max: float, f_min: float, f_max: float, theta_min: Optional[float] = None):
        # sin(theta)在[f_min, f_max]上随频率线性变化; theta_min默认-theta_max
        if theta_min is None:
            theta_min = -theta_max
        if not (-math.pi / 2 < theta_min < theta_max < math.pi / 2):
            raise ConfigError('dispersion needs -pi/2 < theta_min < theta_max < pi/2, got {}, {}'.format(
                theta_min, theta_max))
        if not f_max > f_min > 0:
            raise ConfigError('dispersion band needs f_max > f_min > 0, got {}, {}'.format(f_min, f_max))
        self.theta_min = float(theta_min)
        self.theta_max = float(theta_max)
        self.f_min = float(f_min)
        self.f_max = float(f_max)
        self._sin_min = math.sin(self.theta_min)
        self._sin_span = math.sin(self.theta_max) - self._sin_min

    @classmethod
    def for_plan(cls, plan: FrequencyPlan, theta_max_deg: float = 60.0,
                 theta_min_deg: Optional[float] = None) -> 'LinearSine':
        return cls(math.radians(theta_max_deg), plan.f_min, plan.f_max,
                   None if theta_min_deg is None else math.radians(theta_min_deg))

    def _angle(self, f: FloatOrArray) -> FloatOrArray:
        u = (np.asarray(f, dtype=float) - self.f_min) / (self.f_max - self.f_min)
        s = np.clip(self._sin_min + self._sin_span * u, -1.0, 1.0)
        theta = np.arcsin(s)
        return float(theta) if np.ndim(theta) == 0 else theta

    def _frequency(self, theta: FloatOrArray) -> FloatOrArray:
        u = (np.sin(np.asarray(theta, dtype=float)) - self._sin_min) / self._sin_span
        f = self.f_min + u * (self.f_max - self.f_min)
        return float(f) if np.ndim(f) == 0 else f

    def __repr__(self):
        return 'LinearSine(theta_min={!r}, theta_max={!r}, f_min={!r}, f_max={!r})'.format(
            self.theta_min, self.theta_max, self.f_min, self.f_max)


class LookupTable(DispersionModel):
    kind = 'lookup_table'

    def __init__(self, frequencies: Sequence[float], angles: Sequence[float]):
        # 实测/仿真色散数据, 线性插值; angles单位rad
        freqs = np.asarray(frequencies, dtype=float)
        thetas = np.asarray(angles, dtype=float)
        if freqs.ndim != 1 or freqs.shape != thetas.shape or freqs.size < 2:
            raise ConfigError('lookup table needs at least two (frequency, angle) pairs of equal length')
        if np.any(np.diff(freqs) <= 0):
            raise ConfigError('lookup table frequencies must be strictly increasing')
        if np.any(np.diff(thetas) <= 0):
            raise ConfigError('lookup table angles must be strictly increasing (monotone dispersion)')
        if not (freqs[0] > 0 and -math.pi / 2 < thetas[0] and thetas[-1] < math.pi / 2):
            raise ConfigError('lookup table angles must lie within (-pi/2, pi/2) and frequencies be positive')
        freqs.setflags(write=False)
        thetas.setflags(write=False)
        self.frequencies = freqs
        self.angles = thetas
        self.f_min = float(freqs[0])
        self.f_max = float(freqs[-1])
        self.theta_min = float(thetas[0])
        self.theta_max = float(thetas[-1])

    @classmethod
    def from_csv(cls, path: str, encoding: Optional[str] = 'utf-8') -> 'LookupTable':
        # 两列CSV: frequency_hz, angle_deg; 必须有表头
        with open(path, encoding=encoding) as f:
            text = f.read()
        collection = RecordCollection.from_csv(text, ('frequency_hz', 'angle_deg'), source=path)
        freqs, angles = [], []
        for line_no, record in collection.numbered():
            try:
                freqs.append(float(record['frequency_hz']))
                angles.append(math.radians(float(record['angle_deg'])))
            except ValueError as e:
                raise ConfigError('{}: line {}: {}'.format(path, line_no, e))
        logger.debug('loaded %d dispersion samples from %s', len(freqs), path)
        return cls(freqs, angles)

    def _angle(self, f: FloatOrArray) -> FloatOrArray:
        theta = np.interp(np.asarray(f, dtype=float), self.frequencies, self.angles)
        return float(theta) if np.ndim(theta) == 0 else theta

    def _frequency(self, theta: FloatOrArray) -> FloatOrArray:
        f = np.interp(np.asarray(theta, dtype=float), self.angles, self.frequencies)
        return float(f) if np.ndim(f) == 0 else f

    def __repr__(self):
        return 'LookupTable({} points, {}..{} Hz)'.format(self.frequencies.size, self.f_min, self.f_max)


@dataclass(frozen=True)
class VirtualElement:
    m: int
    f: float
    theta: float
    axis: ChannelAxis


def beam_angle(model: DispersionModel, f: FloatOrArray) -> FloatOrArray:
    return model.beam_angle(f)


def frequency_for_angle(model: DispersionModel, theta: FloatOrArray) -> FloatOrArray:
    return model.frequency_for_angle(theta)


def virtual_aperture(plan: FrequencyPlan, model: DispersionModel, axis: ChannelAxis) -> List[VirtualElement]:
    # 两个正交通道共用同一角度表, 作用于各自平面
    return [VirtualElement(m, float(f), beam_angle(model, float(f)), ChannelAxis(axis))
            for m, f in enumerate(plan.grid(), 1)]


def aperture_angles(plan: FrequencyPlan, model: DispersionModel) -> Tuple[np.ndarray, np.ndarray]:
    freqs = plan.grid()
    return freqs, np.asarray(beam_angle(model, freqs), dtype=float)
