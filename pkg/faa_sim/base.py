# -*- coding: utf-8 -*-

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Union, Optional, Tuple

import numpy as np
from scipy import constants

# 光速, 精确SI值
C = constants.c


class Notset:
    pass


NOTSET = Notset()


class FaaError(Exception):
    pass


class ConfigError(FaaError):
    pass


class GeometryError(FaaError):
    pass


class BandError(FaaError):
    pass


class AliasingError(FaaError):
    pass


class DegenerateMeasurementError(FaaError):
    pass


class DimensionError(FaaError):
    pass


class ChannelAxis(enum.IntEnum):
    # XScan: x-z平面(方位角), YScan: y-z平面(俯仰角)
    XScan = 0
    YScan = 1


Position = Tuple[float, float, float]


def as_position(p: Any) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (3,):
        raise GeometryError('position must have 3 coordinates, got shape {}'.format(arr.shape))
    return arr


def range_of(p: Any) -> float:
    # 单站, 相位中心在原点
    norm = float(np.linalg.norm(as_position(p)))
    if not norm > 0:
        raise GeometryError('degenerate geometry: position {} is at the phase center'.format(tuple(p)))
    return norm


def azimuth_of(p: Any) -> float:
    x, _, z = as_position(p)
    return math.atan2(x, z)


def elevation_of(p: Any) -> float:
    _, y, z = as_position(p)
    return math.atan2(y, z)


def axis_angle(p: Any, axis: ChannelAxis) -> float:
    return azimuth_of(p) if axis == ChannelAxis.XScan else elevation_of(p)


def check_forward(p: Any) -> np.ndarray:
    arr = as_position(p)
    range_of(arr)
    if not arr[2] > 0:
        raise GeometryError('position {} is not in the forward half-space (z > 0)'.format(tuple(arr)))
    return arr


@dataclass(frozen=True)
class FrequencyPlan:
    f_min: float
    f_max: float
    M: int

    def __post_init__(self):
        if not (isinstance(self.M, (int, np.integer)) and self.M >= 1):
            raise ConfigError('M must be a positive integer, got {!r}'.format(self.M))
        if not (self.f_max > self.f_min > 0):
            raise ConfigError('frequency plan requires f_max > f_min > 0, got f_min={}, f_max={}'.format(
                self.f_min, self.f_max))

    @property
    def bandwidth(self) -> float:
        return self.f_max - self.f_min

    @property
    def step(self) -> float:
        return self.bandwidth / self.M

    @property
    def center(self) -> float:
        return 0.5 * (self.f_min + self.f_max)

    def grid(self) -> np.ndarray:
        return frequency_grid(self)


def frequency_grid(plan: FrequencyPlan) -> np.ndarray:
    # 子带中心: f_c[m] = f_min + (m - 1/2)(f_max - f_min)/M
    m = np.arange(1, plan.M + 1, dtype=float)
    return plan.f_min + (m - 0.5) * plan.step


@dataclass(frozen=True)
class ChirpConfig:
    T_c: float
    T_guard: float
    k: float
    N_s: int
    f_s: float

    def __post_init__(self):
        if not self.T_c > 0:
            raise ConfigError('T_c must be > 0, got {}'.format(self.T_c))
        if not self.T_guard >= 0:
            raise ConfigError('T_guard must be >= 0, got {}'.format(self.T_guard))
        if not self.k > 0:
            raise ConfigError('chirp slope k must be > 0, got {}'.format(self.k))
        if not (isinstance(self.N_s, (int, np.integer)) and self.N_s >= 2):
            raise ConfigError('N_s must be an integer >= 2, got {!r}'.format(self.N_s))
        if not self.f_s > 0:
            raise ConfigError('f_s must be > 0, got {}'.format(self.f_s))

    @classmethod
    def for_plan(cls, plan: FrequencyPlan, T_c: float = 100e-6, T_guard: float = 5e-6, N_s: int = 64,
                 f_s: float = 1e6) -> 'ChirpConfig':
        # 斜率取 B/(M*T_c), 使各chirp恰好拼满整个频带
        return cls(T_c, T_guard, plan.step / T_c, N_s, f_s)

    @property
    def bandwidth(self) -> float:
        return self.k * self.T_c

    def T_frame(self, plan: FrequencyPlan) -> float:
        return plan.M * self.T_c

    def check_plan(self, plan: FrequencyPlan, rel_tol: float = 1e-9) -> None:
        if not math.isclose(self.bandwidth, plan.step, rel_tol=rel_tol):
            raise ConfigError('chirp bandwidth k*T_c = {} Hz does not tile the plan: (f_max - f_min)/M = {} Hz'.format(
                self.bandwidth, plan.step))


@dataclass(frozen=True)
class Target:
    p: Position
    alpha_x: complex = 1 + 0j
    alpha_y: Union[complex, Notset] = NOTSET

    def __post_init__(self):
        object.__setattr__(self, 'p', tuple(float(v) for v in check_forward(self.p)))
        object.__setattr__(self, 'alpha_x', complex(self.alpha_x))
        # 两通道反射率默认相等
        alpha_y = self.alpha_x if self.alpha_y is NOTSET else self.alpha_y
        object.__setattr__(self, 'alpha_y', complex(alpha_y))

    def alpha(self, axis: ChannelAxis) -> complex:
        return self.alpha_x if axis == ChannelAxis.XScan else self.alpha_y

    def scaled(self, factor: complex) -> 'Target':
        return Target(self.p, self.alpha_x * factor, self.alpha_y * factor)


@dataclass(frozen=True)
class NoiseConfig:
    # snr_db=None 表示无噪声
    snr_db: Optional[float] = None
    seed: int = 0
    stream: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.snr_db is not None:
            if not math.isfinite(self.snr_db):
                raise ConfigError('snr_db must be finite or None (noiseless), got {}'.format(self.snr_db))
            object.__setattr__(self, 'snr_db', float(self.snr_db))
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2 ** 64):
            raise ConfigError('seed must be a 64-bit unsigned integer, got {!r}'.format(self.seed))
        stream = tuple(int(s) for s in self.stream)
        if any(s < 0 for s in stream):
            raise ConfigError('stream keys must be non-negative, got {}'.format(stream))
        object.__setattr__(self, 'stream', stream)

    @property
    def noiseless(self) -> bool:
        return self.snr_db is None

    def substream(self, *key: int) -> 'NoiseConfig':
        return NoiseConfig(self.snr_db, self.seed, self.stream + tuple(key))


@dataclass(frozen=True)
class Scene:
    targets: Tuple[Target, ...] = ()
    noise: NoiseConfig = field(default_factory=NoiseConfig)

    def __post_init__(self):
        object.__setattr__(self, 'targets', tuple(self.targets))


@dataclass(frozen=True)
class Measurement:
    plan: FrequencyPlan
    s_x: np.ndarray
    s_y: np.ndarray

    def __post_init__(self):
        for name in ('s_x', 's_y'):
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.shape != (self.plan.M,):
                raise DimensionError('{} must have length M={}, got shape {}'.format(name, self.plan.M, arr.shape))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def M(self) -> int:
        return self.plan.M

    def channel(self, axis: ChannelAxis) -> np.ndarray:
        return self.s_x if axis == ChannelAxis.XScan else self.s_y

    def scaled(self, factor: complex) -> 'Measurement':
        return Measurement(self.plan, self.s_x * factor, self.s_y * factor)
