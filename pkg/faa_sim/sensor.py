# -*- coding: utf-8 -*-

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Union, Optional, Tuple, Sequence, Callable

import numpy as np

from .base import (NOTSET, Notset, FrequencyPlan, ChirpConfig, Scene, NoiseConfig, Measurement, ConfigError)
from .dispersion import DispersionModel, LinearSine
from .synth import AntennaModel, FrameSchedule, simulate_measurement, frame_schedule, scene_range_profiles
from .fingerprint import (Fingerprint, PositionGrid, Dictionary, Localization, AmbiguityCurve, build_fingerprint,
                          build_dictionary, localize, ambiguity_probe)


@dataclass(frozen=True)
class SweepTrial:
    snr_db: Optional[float]
    trial: int
    position: Tuple[float, float, float]
    error_m: float
    score: float


@dataclass(frozen=True)
class SweepPoint:
    snr_db: Optional[float]
    rmse_m: float
    trials: int


@dataclass(frozen=True)
class SweepResult:
    points: Tuple[SweepPoint, ...]
    trials: Tuple[SweepTrial, ...]

    def rmse(self, snr_db: Optional[float]) -> float:
        for point in self.points:
            if point.snr_db == snr_db:
                return point.rmse_m
        raise KeyError('sweep contains no SNR {!r}'.format(snr_db))


def _env(name: str, cast: Callable, default: Any) -> Any:
    value = os.environ.get(name)
    if value is None:
        return default
    try:
        return cast(value)
    except ValueError:
        raise ConfigError('environment variable {}={!r} is not a valid {}'.format(name, value, cast.__name__))


class FaaSensor(object):
    """Single-chain frequency-scanned sensor: plan, dispersion, antenna and chirp bundled together."""

    # 未传入的参数依次读取环境变量 FAA_F_MIN_HZ, FAA_F_MAX_HZ, FAA_M, FAA_THETA_MAX_DEG, FAA_L_PHYS_M, FAA_WORKERS

    def __init__(self, plan: Optional[FrequencyPlan] = None, dispersion: Optional[DispersionModel] = None,
                 antenna: Optional[AntennaModel] = None, chirp: Optional[ChirpConfig] = None,
                 workers: Optional[int] = None, log: bool = True, raise_error: bool = False,
                 exc_info: Optional[bool] = None):
        if plan is None:
            plan = FrequencyPlan(_env('FAA_F_MIN_HZ', float, 60e9), _env('FAA_F_MAX_HZ', float, 66e9),
                                 _env('FAA_M', int, 128))
        if dispersion is None:
            dispersion = LinearSine.for_plan(plan, _env('FAA_THETA_MAX_DEG', float, 60.0))
        if antenna is None:
            antenna = AntennaModel(_env('FAA_L_PHYS_M', float, 0.12))
        if chirp is None:
            chirp = ChirpConfig.for_plan(plan)
        if workers is None:
            workers = _env('FAA_WORKERS', int, 1)
        if not workers >= 1:
            raise ConfigError('workers must be >= 1, got {}'.format(workers))
        dispersion.check_band(plan.grid())
        self.plan = plan
        self.dispersion = dispersion
        self.antenna = antenna
        self.chirp = chirp
        self.workers = workers
        self.log = log
        if log:
            import logging
            self.logger = logging.getLogger(__name__)
        self.raise_error = raise_error
        self.exc_info = exc_info

    @classmethod
    def from_config(cls, config: Any, **kwargs) -> 'FaaSensor':
        config.require('plan', 'dispersion', 'antenna')
        kwargs.setdefault('workers', config.workers)
        return cls(config.plan, config.dispersion, config.antenna, config.chirp, **kwargs)

    def __repr__(self):
        return 'FaaSensor(M={}, band=[{}, {}] Hz, {!r}, L_phys={} m)'.format(
            self.plan.M, self.plan.f_min, self.plan.f_max, self.dispersion, self.antenna.L_phys)

    def simulate(self, scene: Scene) -> Measurement:
        return simulate_measurement(scene, self.plan, self.dispersion, self.antenna)

    def fingerprint(self, meas: Union[Measurement, Scene]) -> Fingerprint:
        if isinstance(meas, Scene):
            meas = self.simulate(meas)
        return build_fingerprint(meas)

    def dictionary(self, grid: PositionGrid, workers: Optional[int] = None) -> Dictionary:
        if workers is None:
            workers = self.workers
        if self.log:
            self.logger.info('building dictionary: %d grid points, M=%d, workers=%d', grid.size, self.plan.M, workers)
        return build_dictionary(grid, self.plan, self.dispersion, self.antenna, workers)

    def localize(self, meas: Union[Measurement, Scene], dictionary: Union[Dictionary, PositionGrid]) -> Localization:
        if isinstance(meas, Scene):
            meas = self.simulate(meas)
        if isinstance(dictionary, PositionGrid):
            dictionary = self.dictionary(dictionary)
        if meas.M != dictionary.plan.M:
            raise ConfigError('measurement has M={} but the dictionary has M={}'.format(meas.M, dictionary.plan.M))
        return localize(meas, dictionary)

    def probe(self, p0: Any, axis: Any, offsets: Sequence[float]) -> AmbiguityCurve:
        return ambiguity_probe(p0, axis, offsets, self.plan, self.dispersion, self.antenna)

    def schedule(self) -> FrameSchedule:
        return frame_schedule(self.plan, self.chirp, self.dispersion)

    def range_profiles(self, scene: Scene) -> Tuple[np.ndarray, np.ndarray]:
        return scene_range_profiles(scene, self.plan, self.dispersion, self.antenna, self.chirp)

    def _trial(self, scene: Scene, dictionary: Dictionary, snr_db: Optional[float], snr_index: int, trial: int,
               raise_error: bool, exc_info: Optional[bool]) -> SweepTrial:
        target = scene.targets[0]
        # 子流键 (seed, snr序号, trial序号), 与并行方式无关
        noise = NoiseConfig(snr_db, scene.noise.seed, scene.noise.stream + (snr_index, trial))
        try:
            result = self.localize(Scene((target,), noise), dictionary)
        except Exception as e:
            if self.log:
                self.logger.error('{}: {}  (in sweep trial snr={} #{})'.format(str(type(e))[8:-2], e, snr_db, trial),
                                  exc_info=exc_info)
            if raise_error:
                raise
            nan = float('nan')
            return SweepTrial(snr_db, trial, (nan, nan, nan), nan, nan)
        error = float(np.linalg.norm(np.subtract(result.position, target.p)))
        return SweepTrial(snr_db, trial, result.position, error, result.score)

    def sweep(self, scene: Scene, dictionary: Union[Dictionary, PositionGrid], snr_list: Sequence[Optional[float]],
              trials: int, seed: Union[int, Notset] = NOTSET, workers: Optional[int] = None,
              raise_error: Optional[bool] = None, exc_info: Union[bool, Notset, None] = NOTSET) -> SweepResult:
        # Monte-Carlo: 每个SNR下独立加噪trials次, 统计首个目标的定位RMSE
        # snr_list中None表示无噪声; 失败的trial记为NaN, raise_error=True时直接抛出
        if not scene.targets:
            raise ConfigError('sweep needs at least one scene target')
        if not (isinstance(trials, int) and trials >= 1):
            raise ConfigError('trials must be an integer >= 1, got {!r}'.format(trials))
        if seed is not NOTSET:
            scene = Scene(scene.targets, NoiseConfig(scene.noise.snr_db, seed, scene.noise.stream))
        if isinstance(dictionary, PositionGrid):
            dictionary = self.dictionary(dictionary)
        if workers is None:
            workers = self.workers
        if raise_error is None:
            raise_error = self.raise_error
        if exc_info is NOTSET:
            exc_info = self.exc_info
        keys = [(snr_db, s, t) for s, snr_db in enumerate(snr_list) for t in range(trials)]

        def run(key):
            return self._trial(scene, dictionary, key[0], key[1], key[2], raise_error, exc_info)

        if workers == 1:
            results = [run(key) for key in keys]
        else:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                results = list(executor.map(run, keys))
        points = []
        for s, snr_db in enumerate(snr_list):
            errors = np.array([r.error_m for r in results[s * trials:(s + 1) * trials]])
            finite = errors[np.isfinite(errors)]
            rmse = float(np.sqrt(np.mean(finite ** 2))) if finite.size else math.nan
            points.append(SweepPoint(snr_db, rmse, int(finite.size)))
        if self.log:
            self.logger.info('sweep done: %d SNR values x %d trials', len(snr_list), trials)
        return SweepResult(tuple(points), tuple(results))
