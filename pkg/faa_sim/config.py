# -*- coding: utf-8 -*-

import dataclasses
import json
import logging
import numbers
import os
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple, Collection

from .base import (NOTSET, FrequencyPlan, ChirpConfig, Target, NoiseConfig, Scene, ConfigError, GeometryError)
from .dispersion import DispersionModel, LinearSine, LookupTable
from .synth import AntennaModel
from .fingerprint import PositionGrid
from .archcomp import ArchitectureSpec, architecture_from_dict

logger = logging.getLogger(__name__)

SECTIONS = {
    'plan': ('f_min_hz', 'f_max_hz', 'M'),
    'dispersion': ('kind', 'theta_max_deg', 'theta_min_deg', 'table_path'),
    'antenna': ('L_phys_m', 'two_way', 'pattern'),
    'chirp': ('T_c_s', 'T_guard_s', 'N_s', 'f_s_hz', 'slope_hz_per_s'),
    'scene': ('targets', 'snr_db', 'seed'),
    'grid': ('x_range_m', 'y_range_m', 'z_range_m', 'counts'),
    'compare': ('r_query_m', 'baseline'),
}
TOP_LEVEL = tuple(SECTIONS) + ('architectures', 'workers')
TARGET_KEYS = ('x_m', 'y_m', 'z_m', 'alpha_re', 'alpha_im', 'alpha_x_re', 'alpha_x_im', 'alpha_y_re', 'alpha_y_im')


@dataclass(frozen=True)
class ExperimentConfig:
    plan: Optional[FrequencyPlan] = None
    dispersion: Optional[DispersionModel] = None
    antenna: Optional[AntennaModel] = None
    chirp: Optional[ChirpConfig] = None
    scene: Optional[Scene] = None
    grid: Optional[PositionGrid] = None
    architectures: Optional[Tuple[ArchitectureSpec, ...]] = None
    r_query_m: float = 3.0
    baseline: Optional[str] = None
    workers: Optional[int] = None
    source: str = '<config>'

    def require(self, *sections: str) -> None:
        missing = [name for name in sections if getattr(self, name) is None]
        if missing:
            raise ConfigError('{}: missing required section(s): {}'.format(self.source, ', '.join(missing)))

    def with_seed(self, seed: Optional[int]) -> 'ExperimentConfig':
        # --seed 覆盖配置中的种子
        if seed is None or self.scene is None:
            return self
        noise = NoiseConfig(self.scene.noise.snr_db, seed, self.scene.noise.stream)
        return dataclasses.replace(self, scene=Scene(self.scene.targets, noise))


def _check_keys(data: Any, allowed: Collection[str], where: str) -> Dict[str, Any]:
    if not isinstance(data, dict):
        raise ConfigError('{}: expected an object, got {}'.format(where, type(data).__name__))
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError('{}: unknown key(s): {}'.format(where, ', '.join(unknown)))
    return data


def _number(data: Dict[str, Any], key: str, where: str, default: Any = NOTSET) -> Any:
    if key not in data:
        if default is NOTSET:
            raise ConfigError('{}: missing key {!r}'.format(where, key))
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError('{}.{}: expected a number, got {!r}'.format(where, key, value))
    return float(value)


def _integer(data: Dict[str, Any], key: str, where: str, default: Any = NOTSET) -> Any:
    if key not in data:
        if default is NOTSET:
            raise ConfigError('{}: missing key {!r}'.format(where, key))
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError('{}.{}: expected an integer, got {!r}'.format(where, key, value))
    return value


def _range(data: Dict[str, Any], key: str, where: str) -> Tuple[float, float]:
    value = data.get(key)
    if not (isinstance(value, list) and len(value) == 2):
        raise ConfigError('{}.{}: expected [lo, hi], got {!r}'.format(where, key, value))
    return _number({'lo': value[0]}, 'lo', where + '.' + key), _number({'hi': value[1]}, 'hi', where + '.' + key)


def parse_plan(data: Any, where: str = 'plan') -> FrequencyPlan:
    data = _check_keys(data, SECTIONS['plan'], where)
    return FrequencyPlan(_number(data, 'f_min_hz', where), _number(data, 'f_max_hz', where),
                         _integer(data, 'M', where))


def parse_dispersion(data: Any, plan: Optional[FrequencyPlan], base_dir: str = '.',
                     where: str = 'dispersion') -> DispersionModel:
    data = _check_keys(data, SECTIONS['dispersion'], where)
    kind = data.get('kind', LinearSine.kind)
    if kind == LinearSine.kind:
        if plan is None:
            raise ConfigError('{}: linear_sine dispersion needs the plan section for its band'.format(where))
        return LinearSine.for_plan(plan, _number(data, 'theta_max_deg', where, 60.0),
                                   _number(data, 'theta_min_deg', where, None))
    if kind == LookupTable.kind:
        path = data.get('table_path')
        if not isinstance(path, str):
            raise ConfigError('{}: lookup_table dispersion needs table_path'.format(where))
        # 相对路径以配置文件所在目录为基准
        path = os.path.join(base_dir, path)
        try:
            return LookupTable.from_csv(path)
        except (OSError, UnicodeDecodeError) as e:
            raise ConfigError('{}: cannot read dispersion table: {}'.format(where, e))
    raise ConfigError('{}.kind: expected linear_sine or lookup_table, got {!r}'.format(where, kind))


def parse_antenna(data: Any, where: str = 'antenna') -> AntennaModel:
    data = _check_keys(data, SECTIONS['antenna'], where)
    two_way = data.get('two_way', True)
    if not isinstance(two_way, bool):
        raise ConfigError('{}.two_way: expected true or false, got {!r}'.format(where, two_way))
    return AntennaModel(_number(data, 'L_phys_m', where, 0.12), two_way, data.get('pattern', 'gaussian'))


def parse_chirp(data: Any, plan: Optional[FrequencyPlan], where: str = 'chirp') -> ChirpConfig:
    data = _check_keys(data, SECTIONS['chirp'], where)
    T_c = _number(data, 'T_c_s', where, 100e-6)
    slope = _number(data, 'slope_hz_per_s', where, None)
    if slope is None:
        if plan is None:
            raise ConfigError('{}: slope_hz_per_s is required without a plan section'.format(where))
        # 未给斜率时按频带拼接推出
        slope = plan.step / T_c
    return ChirpConfig(T_c, _number(data, 'T_guard_s', where, 5e-6), slope, _integer(data, 'N_s', where, 64),
                       _number(data, 'f_s_hz', where, 1e6))


def parse_target(data: Any, where: str) -> Target:
    data = _check_keys(data, TARGET_KEYS, where)
    p = (_number(data, 'x_m', where), _number(data, 'y_m', where), _number(data, 'z_m', where))
    alpha = complex(_number(data, 'alpha_re', where, 1.0), _number(data, 'alpha_im', where, 0.0))
    alpha_x = alpha
    if 'alpha_x_re' in data or 'alpha_x_im' in data:
        alpha_x = complex(_number(data, 'alpha_x_re', where, 0.0), _number(data, 'alpha_x_im', where, 0.0))
    alpha_y = alpha_x
    if 'alpha_y_re' in data or 'alpha_y_im' in data:
        alpha_y = complex(_number(data, 'alpha_y_re', where, 0.0), _number(data, 'alpha_y_im', where, 0.0))
    try:
        return Target(p, alpha_x, alpha_y)
    except GeometryError as e:
        raise ConfigError('{}: {}'.format(where, e))


def parse_snr(value: Any, where: str = 'scene.snr_db') -> Optional[float]:
    if value is None or value == 'noiseless':
        return None
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError('{}: expected a number or "noiseless", got {!r}'.format(where, value))
    return float(value)


def parse_scene(data: Any, where: str = 'scene') -> Scene:
    data = _check_keys(data, SECTIONS['scene'], where)
    targets = data.get('targets', [])
    if not isinstance(targets, list):
        raise ConfigError('{}.targets: expected a list'.format(where))
    targets = tuple(parse_target(t, '{}.targets[{}]'.format(where, i)) for i, t in enumerate(targets))
    noise = NoiseConfig(parse_snr(data.get('snr_db')), _integer(data, 'seed', where, 0))
    return Scene(targets, noise)


def parse_grid(data: Any, where: str = 'grid') -> PositionGrid:
    data = _check_keys(data, SECTIONS['grid'], where)
    counts = data.get('counts')
    if not (isinstance(counts, list) and len(counts) == 3):
        raise ConfigError('{}.counts: expected [nx, ny, nz], got {!r}'.format(where, counts))
    counts = tuple(_integer({'n': n}, 'n', where + '.counts') for n in counts)
    return PositionGrid(_range(data, 'x_range_m', where), _range(data, 'y_range_m', where),
                        _range(data, 'z_range_m', where), counts)


def parse_config(data: Any, source: str = '<config>', base_dir: str = '.') -> ExperimentConfig:
    data = _check_keys(data, TOP_LEVEL, source)
    try:
        plan = parse_plan(data['plan']) if 'plan' in data else None
        kwargs = dict(plan=plan, source=source)
        if 'dispersion' in data:
            kwargs['dispersion'] = parse_dispersion(data['dispersion'], plan, base_dir)
        if 'antenna' in data:
            kwargs['antenna'] = parse_antenna(data['antenna'])
        if 'chirp' in data:
            kwargs['chirp'] = parse_chirp(data['chirp'], plan)
        if 'scene' in data:
            kwargs['scene'] = parse_scene(data['scene'])
        if 'grid' in data:
            kwargs['grid'] = parse_grid(data['grid'])
        if 'architectures' in data:
            if not isinstance(data['architectures'], list):
                raise ConfigError('architectures: expected a list')
            kwargs['architectures'] = tuple(architecture_from_dict(a) for a in data['architectures'])
        if 'compare' in data:
            section = _check_keys(data['compare'], SECTIONS['compare'], 'compare')
            kwargs['r_query_m'] = _number(section, 'r_query_m', 'compare', 3.0)
            kwargs['baseline'] = section.get('baseline')
        if 'workers' in data:
            kwargs['workers'] = _integer(data, 'workers', source)
    except ConfigError as e:
        raise ConfigError('{}: {}'.format(source, e))
    return ExperimentConfig(**kwargs)


def load_config(path: Optional[str] = None) -> ExperimentConfig:
    if path is None:
        path = os.environ.get('FAA_CONFIG')
    if path is None:
        raise ConfigError('no config given: pass --config or set FAA_CONFIG')
    try:
        with open(path, encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError('cannot read config {}: {}'.format(path, e))
    except json.JSONDecodeError as e:
        raise ConfigError('{}: line {}: {}'.format(path, e.lineno, e.msg))
    logger.debug('loaded config %s', path)
    return parse_config(data, path, os.path.dirname(os.path.abspath(path)))
