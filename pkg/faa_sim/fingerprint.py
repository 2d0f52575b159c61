# -*- coding: utf-8 -*-

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Optional, List, Tuple, Sequence

import numpy as np

from .base import (FrequencyPlan, Measurement, Scene, Target, ConfigError, DegenerateMeasurementError,
                   DimensionError, as_position, check_forward, range_of)
from .dispersion import DispersionModel
from .synth import AntennaModel, simulate_measurement
from ._records import RecordCollection

logger = logging.getLogger(__name__)

HALF_POWER = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class Fingerprint:
    F: np.ndarray
    plan: FrequencyPlan

    def __post_init__(self):
        arr = np.array(self.F, dtype=complex)
        if arr.shape != (2 * self.plan.M,):
            raise DimensionError('fingerprint must have length 2M={}, got shape {}'.format(2 * self.plan.M, arr.shape))
        for name, half in (('x', arr[:self.plan.M]), ('y', arr[self.plan.M:])):
            norm = np.linalg.norm(half)
            if not abs(norm - 1.0) <= 1e-9:
                raise DegenerateMeasurementError('fingerprint {}-half norm is {}, expected 1'.format(name, norm))
        arr.setflags(write=False)
        object.__setattr__(self, 'F', arr)

    @property
    def M(self) -> int:
        return self.plan.M

    @property
    def x(self) -> np.ndarray:
        return self.F[:self.plan.M]

    @property
    def y(self) -> np.ndarray:
        return self.F[self.plan.M:]


def _unit(s: np.ndarray) -> np.ndarray:
    # 先按峰值缩放再求范数, 大偏角下增益接近下溢时平方和不会变成0
    scaled = s / np.max(np.abs(s))
    return scaled / np.linalg.norm(scaled)


def build_fingerprint(meas: Measurement) -> Fingerprint:
    # 各通道单独归一化, 消除RCS与路径损耗的幅度影响
    peak_x = float(np.max(np.abs(meas.s_x)))
    peak_y = float(np.max(np.abs(meas.s_y)))
    if not (peak_x > 0 and peak_y > 0 and math.isfinite(peak_x) and math.isfinite(peak_y)):
        raise DegenerateMeasurementError('degenerate measurement: channel peaks max|s_x|={}, max|s_y|={}'.format(
            peak_x, peak_y))
    return Fingerprint(np.concatenate((_unit(meas.s_x), _unit(meas.s_y))), meas.plan)


def channel_correlations(a: Fingerprint, b: Fingerprint) -> Tuple[float, float]:
    if a.M != b.M:
        raise DimensionError('fingerprint dimension mismatch: M={} vs M={}'.format(a.M, b.M))
    # <a, b> 共轭第二个参数
    return abs(np.vdot(b.x, a.x)), abs(np.vdot(b.y, a.y))


def similarity(a: Fingerprint, b: Fingerprint) -> float:
    # 各通道相干相关幅度的均值, 对通道间固定相位差不敏感
    c_x, c_y = channel_correlations(a, b)
    return min(0.5 * (c_x + c_y), 1.0)


@dataclass(frozen=True)
class PositionGrid:
    x_range: Tuple[float, float]
    y_range: Tuple[float, float]
    z_range: Tuple[float, float]
    counts: Tuple[int, int, int]

    def __post_init__(self):
        counts = tuple(self.counts)
        if len(counts) != 3 or not all(isinstance(n, (int, np.integer)) and n >= 1 for n in counts):
            raise ConfigError('grid counts must be three integers >= 1, got {!r}'.format(self.counts))
        object.__setattr__(self, 'counts', tuple(int(n) for n in counts))
        for name in ('x_range', 'y_range', 'z_range'):
            lo, hi = (float(v) for v in getattr(self, name))
            if not lo <= hi:
                raise ConfigError('grid {} must satisfy lo <= hi, got ({}, {})'.format(name, lo, hi))
            object.__setattr__(self, name, (lo, hi))
        if not self.z_range[0] > 0:
            raise ConfigError('grid z range must be strictly positive, got {}'.format(self.z_range))

    @property
    def size(self) -> int:
        nx, ny, nz = self.counts
        return nx * ny * nz

    def axes(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        # 某轴点数为1时取下界
        return tuple(np.linspace(lo, hi, n) if n > 1 else np.array([lo])
                     for (lo, hi), n in zip((self.x_range, self.y_range, self.z_range), self.counts))

    @property
    def spacing(self) -> Tuple[float, float, float]:
        return tuple((hi - lo) / (n - 1) if n > 1 else 0.0
                     for (lo, hi), n in zip((self.x_range, self.y_range, self.z_range), self.counts))

    def indices(self, index: int) -> Tuple[int, int, int]:
        # x最快, 其次y, 最后z
        nx, ny, _ = self.counts
        if not 0 <= index < self.size:
            raise IndexError('grid index {} out of range [0, {})'.format(index, self.size))
        return index % nx, (index // nx) % ny, index // (nx * ny)

    def index_of(self, ix: int, iy: int, iz: int) -> int:
        nx, ny, _ = self.counts
        return ix + nx * (iy + ny * iz)

    def point(self, index: int) -> Tuple[float, float, float]:
        xs, ys, zs = self.axes()
        ix, iy, iz = self.indices(index)
        return float(xs[ix]), float(ys[iy]), float(zs[iz])

    def points(self) -> np.ndarray:
        xs, ys, zs = self.axes()
        zz, yy, xx = np.meshgrid(zs, ys, xs, indexing='ij')
        return np.column_stack((xx.ravel(), yy.ravel(), zz.ravel()))


@dataclass(frozen=True)
class Dictionary:
    grid: PositionGrid
    plan: FrequencyPlan
    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        for name in ('X', 'Y'):
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.shape != (self.grid.size, self.plan.M):
                raise DimensionError('dictionary {} must have shape {}, got {}'.format(
                    name, (self.grid.size, self.plan.M), arr.shape))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def size(self) -> int:
        return self.grid.size

    def entry(self, index: int) -> Fingerprint:
        return Fingerprint(np.concatenate((self.X[index], self.Y[index])), self.plan)

    @property
    def entries(self) -> List[Fingerprint]:
        return [self.entry(i) for i in range(self.size)]


@dataclass(frozen=True)
class Localization:
    position: Tuple[float, float, float]
    score: float
    index: int


@dataclass(frozen=True)
class AmbiguityCurve:
    axis: Any
    offsets: np.ndarray
    similarity: np.ndarray
    similarity_x: np.ndarray
    similarity_y: np.ndarray
    half_power_width: Optional[float]
    width_x: Optional[float]
    width_y: Optional[float]


def point_fingerprint(p: Any, plan: FrequencyPlan, model: DispersionModel, antenna: AntennaModel) -> Fingerprint:
    # 单位反射率, 无噪声
    return build_fingerprint(simulate_measurement(Scene((Target(tuple(p)),)), plan, model, antenna))


def _dictionary_rows(points: np.ndarray, plan: FrequencyPlan, model: DispersionModel,
                     antenna: AntennaModel) -> Tuple[np.ndarray, np.ndarray]:
    X = np.empty((len(points), plan.M), dtype=complex)
    Y = np.empty((len(points), plan.M), dtype=complex)
    for i, p in enumerate(points):
        fp = point_fingerprint(p, plan, model, antenna)
        X[i] = fp.x
        Y[i] = fp.y
    return X, Y


def build_dictionary(grid: PositionGrid, plan: FrequencyPlan, model: DispersionModel, antenna: AntennaModel,
                     workers: Optional[int] = 1) -> Dictionary:
    points = grid.points()
    for p in points:
        check_forward(p)
    workers = max(1, int(workers or 1))
    if workers == 1 or len(points) < 2:
        X, Y = _dictionary_rows(points, plan, model, antenna)
    else:
        # 按索引分块并行, 按原顺序拼接, 结果与分块方式无关
        chunks = np.array_split(np.arange(len(points)), min(workers, len(points)))
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(lambda idx: _dictionary_rows(points[idx], plan, model, antenna), chunks))
        X = np.concatenate([part[0] for part in parts])
        Y = np.concatenate([part[1] for part in parts])
    logger.debug('built dictionary of %d entries (M=%d, workers=%d)', grid.size, plan.M, workers)
    return Dictionary(grid, plan, X, Y)


def match_scores(fp: Fingerprint, dictionary: Dictionary) -> np.ndarray:
    if fp.M != dictionary.plan.M:
        raise DimensionError('fingerprint M={} does not match dictionary M={}'.format(fp.M, dictionary.plan.M))
    scores = 0.5 * (np.abs(dictionary.X @ np.conj(fp.x)) + np.abs(dictionary.Y @ np.conj(fp.y)))
    return np.minimum(scores, 1.0)


def localize(meas: Measurement, dictionary: Dictionary) -> Localization:
    if dictionary.size < 1:
        raise ConfigError('dictionary is empty')
    scores = match_scores(build_fingerprint(meas), dictionary)
    # argmax取第一个最大值, 即最小网格索引
    index = int(np.argmax(scores))
    return Localization(dictionary.grid.point(index), float(scores[index]), index)


def displaced(p0: Any, axis: Any, delta: float) -> np.ndarray:
    p0 = as_position(p0)
    if isinstance(axis, str):
        if axis == 'azimuth':
            # 绕y轴旋转, 保持距离和y
            c, s = math.cos(delta), math.sin(delta)
            return np.array([p0[0] * c + p0[2] * s, p0[1], -p0[0] * s + p0[2] * c])
        if axis == 'elevation':
            c, s = math.cos(delta), math.sin(delta)
            return np.array([p0[0], p0[1] * c + p0[2] * s, -p0[1] * s + p0[2] * c])
        if axis == 'range':
            return p0 + delta * p0 / range_of(p0)
        raise ConfigError('probe axis must be azimuth, elevation, range or a direction vector, got {!r}'.format(axis))
    direction = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(direction) if direction.shape == (3,) else 0.0
    if not norm > 0:
        raise ConfigError('probe direction must be a non-zero 3-vector, got {!r}'.format(axis))
    return p0 + delta * direction / norm


def half_power_width(offsets: Sequence[float], values: Sequence[float],
                     threshold: float = HALF_POWER) -> Optional[float]:
    # 从0向两侧走, 第一次低于阈值处线性插值, 取两侧较小者
    offsets = np.asarray(offsets, dtype=float)
    values = np.asarray(values, dtype=float)
    width = None
    for side in (offsets >= 0, offsets <= 0):
        idx = np.nonzero(side)[0]
        order = idx[np.argsort(np.abs(offsets[idx]), kind='stable')]
        prev = None
        for i in order:
            if values[i] < threshold:
                b = abs(offsets[i])
                if prev is None:
                    w = b
                else:
                    a = abs(offsets[prev])
                    w = a + (values[prev] - threshold) * (b - a) / (values[prev] - values[i])
                width = w if width is None else min(width, w)
                break
            prev = i
    return None if width is None else float(width)


def ambiguity_probe(p0: Any, axis: Any, offsets: Sequence[float], plan: FrequencyPlan, model: DispersionModel,
                    antenna: AntennaModel) -> AmbiguityCurve:
    offsets = np.asarray(offsets, dtype=float)
    reference = point_fingerprint(check_forward(p0), plan, model, antenna)
    sims = np.empty(offsets.size)
    c_x = np.empty(offsets.size)
    c_y = np.empty(offsets.size)
    for i, delta in enumerate(offsets):
        fp = point_fingerprint(check_forward(displaced(p0, axis, float(delta))), plan, model, antenna)
        c_x[i], c_y[i] = channel_correlations(reference, fp)
        sims[i] = similarity(reference, fp)
    return AmbiguityCurve(axis, offsets, sims, c_x, c_y, half_power_width(offsets, sims),
                          half_power_width(offsets, c_x), half_power_width(offsets, c_y))


def _dictionary_headers(M: int) -> List[str]:
    headers = ['ix', 'iy', 'iz', 'x', 'y', 'z']
    for q in range(1, 2 * M + 1):
        headers.extend(('re_{}'.format(q), 'im_{}'.format(q)))
    return headers


def dictionary_records(dictionary: Dictionary) -> RecordCollection:
    headers = _dictionary_headers(dictionary.plan.M)
    rows = []
    for i in range(dictionary.size):
        F = np.concatenate((dictionary.X[i], dictionary.Y[i]))
        row = list(dictionary.grid.indices(i)) + list(dictionary.grid.point(i))
        for value in F:
            row.extend((float(value.real), float(value.imag)))
        rows.append(row)
    return RecordCollection.from_rows(headers, rows)


def save_dictionary(dictionary: Dictionary, path: str) -> None:
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(dictionary_records(dictionary).export('csv'))


def load_dictionary(path: str, grid: PositionGrid, plan: FrequencyPlan) -> Dictionary:
    with open(path, encoding='utf-8') as f:
        text = f.read()
    headers = _dictionary_headers(plan.M)
    collection = RecordCollection.from_csv(text, headers, source=path, exact=True)
    if len(collection) != grid.size:
        raise ConfigError('{}: expected {} dictionary rows, got {}'.format(path, grid.size, len(collection)))
    X = np.empty((grid.size, plan.M), dtype=complex)
    Y = np.empty((grid.size, plan.M), dtype=complex)
    for i, (line_no, record) in enumerate(collection.numbered()):
        try:
            ijk = tuple(int(record[key]) for key in ('ix', 'iy', 'iz'))
            xyz = np.array([float(record[key]) for key in ('x', 'y', 'z')])
            values = np.array([float(v) for v in record.values()[6:]])
        except ValueError as e:
            raise ConfigError('{}: line {}: {}'.format(path, line_no, e))
        if ijk != grid.indices(i) or not np.allclose(xyz, grid.point(i), rtol=1e-12, atol=1e-12):
            raise ConfigError('{}: line {}: row does not match grid point {}'.format(path, line_no, i))
        F = values[0::2] + 1j * values[1::2]
        try:
            fp = Fingerprint(F, plan)
        except DegenerateMeasurementError as e:
            raise ConfigError('{}: line {}: {}'.format(path, line_no, e))
        X[i] = fp.x
        Y[i] = fp.y
    return Dictionary(grid, plan, X, Y)
