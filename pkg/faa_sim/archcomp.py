# -*- coding: utf-8 -*-

import itertools
import logging
import math
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, Optional, List, Tuple, Sequence

import tablib

from .base import C, ConfigError
from ._records import RecordCollection

logger = logging.getLogger(__name__)

APERTURE_KINDS = ('virtual', 'physical')

# 打印值与计算值相差超过该比例即标记
ETA_DISCREPANCY_TOLERANCE = 0.05


def range_resolution(B: float) -> float:
    return C / (2.0 * B)


def effective_aperture(M: int, f_ref: float) -> float:
    return M * (C / f_ref) / 2.0


def angular_resolution_virtual(f_ref: float, D: float) -> float:
    # D为有效孔径时等于2/M, 与频率无关
    return (C / f_ref) / D


def angular_resolution_mimo(f_ref: float, L: float) -> float:
    return (C / f_ref) / (L * math.sqrt(3.0))


def resolution_cell_volume(theta_az: float, theta_el: float, delta_r: float, R: float) -> float:
    return (theta_az * R) * (theta_el * R) * delta_r


def efficiency(theta_res: float, chains: int, L: float) -> float:
    return (1.0 / theta_res) / (chains * L)


@dataclass(frozen=True)
class ArchitectureSpec:
    name: str
    rf_chains: int
    L: float
    B: float
    M: int
    aperture_kind: str
    f_ref: float
    power_mw: float
    cost_usd: float
    fov_deg: float
    paper_eta: Optional[float] = None
    printed_angular_resolution_rad: Optional[float] = None
    antenna_form: Optional[str] = None
    qualitative: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not (isinstance(self.rf_chains, int) and self.rf_chains >= 1):
            raise ConfigError('{}: rf_chains must be an integer >= 1, got {!r}'.format(self.name, self.rf_chains))
        if not (isinstance(self.M, int) and self.M >= 1):
            raise ConfigError('{}: M must be an integer >= 1, got {!r}'.format(self.name, self.M))
        for key in ('L', 'B', 'f_ref'):
            if not getattr(self, key) > 0:
                raise ConfigError('{}: {} must be > 0, got {}'.format(self.name, key, getattr(self, key)))
        if self.aperture_kind not in APERTURE_KINDS:
            raise ConfigError('{}: aperture_kind must be virtual or physical, got {!r}'.format(
                self.name, self.aperture_kind))
        if not 0 < self.fov_deg < 90:
            raise ConfigError('{}: fov_deg must lie in (0, 90), got {}'.format(self.name, self.fov_deg))
        for key in ('paper_eta', 'printed_angular_resolution_rad'):
            value = getattr(self, key)
            if value is not None and not value > 0:
                raise ConfigError('{}: {} must be > 0 when given, got {}'.format(self.name, key, value))
        object.__setattr__(self, 'qualitative', dict(self.qualitative))


@dataclass(frozen=True)
class ArchitectureRow:
    name: str
    aperture_kind: str
    rf_chains: int
    physical_size_m: float
    bandwidth_hz: float
    M: int
    range_resolution_m: float
    effective_aperture_m: float
    angular_resolution_rad: float
    angular_resolution_deg: float
    cell_volume_m3: float
    eta: float
    # eta用公式的θ; eta_from_printed_theta用表中印刷的θ, 与表中η_computed一列对应
    eta_from_printed_theta: Optional[float]
    paper_eta: Optional[float]
    eta_discrepancy: bool
    relative_advantage: Optional[float]
    power_mw: float
    cost_usd: float
    fov_deg: float
    antenna_form: Optional[str]
    qualitative: Dict[str, str]


@dataclass(frozen=True)
class EfficiencyRatio:
    numerator: str
    denominator: str
    computed: float
    printed: Optional[float]


@dataclass(frozen=True)
class ComparisonReport:
    rows: Tuple[ArchitectureRow, ...]
    ratios: Tuple[EfficiencyRatio, ...]
    R_query: float
    baseline: Optional[str]

    def row(self, name: str) -> ArchitectureRow:
        for row in self.rows:
            if row.name == name:
                return row
        raise KeyError("report contains no '{}' architecture.".format(name))

    def ratio(self, numerator: str, denominator: str) -> EfficiencyRatio:
        for ratio in self.ratios:
            if ratio.numerator == numerator and ratio.denominator == denominator:
                return ratio
        raise KeyError("report contains no '{}/{}' ratio.".format(numerator, denominator))

    def to_dict(self) -> dict:
        return {'R_query_m': self.R_query,
                'baseline': self.baseline,
                'rows': [asdict(row) for row in self.rows],
                'ratios': [asdict(ratio) for ratio in self.ratios]}

    def records(self) -> RecordCollection:
        headers = ('name', 'kind', 'chains', 'L_m', 'range_res_m', 'aperture_m', 'ang_res_deg', 'cell_m3', 'eta',
                   'eta_printed_theta', 'paper_eta', 'discrepancy', 'advantage', 'power_mw', 'cost_usd')
        rows = [(r.name, r.aperture_kind, r.rf_chains, r.physical_size_m, r.range_resolution_m,
                 r.effective_aperture_m, r.angular_resolution_deg, r.cell_volume_m3, r.eta,
                 '' if r.eta_from_printed_theta is None else r.eta_from_printed_theta,
                 '' if r.paper_eta is None else r.paper_eta, r.eta_discrepancy,
                 '' if r.relative_advantage is None else r.relative_advantage, r.power_mw, r.cost_usd)
                for r in self.rows]
        return RecordCollection.from_rows(headers, rows)

    def table(self) -> str:
        # 对齐文本表, 数值取4位有效数字
        records = self.records()
        data = tablib.Dataset(headers=list(records.headers))
        for row in records:
            data.append(tuple('{:.4g}'.format(v) if isinstance(v, float) else
                               ('yes' if v else 'no') if isinstance(v, bool) else v for v in row.values()))
        return data.export('cli', tablefmt='simple')


def _row(spec: ArchitectureSpec, R_query: float) -> ArchitectureRow:
    delta_r = range_resolution(spec.B)
    if spec.aperture_kind == 'virtual':
        # 每条链各自的频率点数构成虚拟孔径, 两个正交通道分别分辨方位和俯仰
        aperture = effective_aperture(spec.M, spec.f_ref)
        theta = angular_resolution_virtual(spec.f_ref, aperture)
        volume = resolution_cell_volume(theta, theta, delta_r, R_query)
    else:
        # 线阵只分辨一个平面, 另一轴取视场限定的横向范围
        aperture = spec.L
        theta = angular_resolution_mimo(spec.f_ref, spec.L)
        extent = 2.0 * R_query * math.tan(math.radians(spec.fov_deg))
        volume = resolution_cell_volume(theta, extent / R_query, delta_r, R_query)
    eta = efficiency(theta, spec.rf_chains, spec.L)
    eta_printed = None if spec.printed_angular_resolution_rad is None else efficiency(
        spec.printed_angular_resolution_rad, spec.rf_chains, spec.L)
    discrepancy = spec.paper_eta is not None and abs(spec.paper_eta - eta) > ETA_DISCREPANCY_TOLERANCE * eta
    if discrepancy:
        logger.info('%s: printed efficiency %g differs from computed %g', spec.name, spec.paper_eta, eta)
    return ArchitectureRow(spec.name, spec.aperture_kind, spec.rf_chains, spec.L, spec.B, spec.M, delta_r, aperture,
                           theta, math.degrees(theta), volume, eta, eta_printed, spec.paper_eta, discrepancy, None,
                           spec.power_mw, spec.cost_usd, spec.fov_deg, spec.antenna_form, dict(spec.qualitative))


def compare(specs: Sequence[ArchitectureSpec], R_query: float = 3.0,
            baseline: Optional[str] = None) -> ComparisonReport:
    specs = list(specs)
    if not specs:
        raise ConfigError('compare needs at least one architecture')
    if not R_query > 0:
        raise ConfigError('R_query must be > 0, got {}'.format(R_query))
    names = [spec.name for spec in specs]
    if len(set(names)) != len(names):
        raise ConfigError('architecture names must be unique, got {}'.format(names))
    rows = [_row(spec, R_query) for spec in specs]
    if baseline is None:
        physical = [spec.name for spec in specs if spec.aperture_kind == 'physical']
        baseline = physical[-1] if physical else None
    elif baseline not in names:
        raise ConfigError('baseline {!r} is not one of {}'.format(baseline, names))
    if baseline is not None:
        reference = rows[names.index(baseline)].cell_volume_m3
        rows = [ArchitectureRow(**dict(asdict(row), relative_advantage=reference / row.cell_volume_m3))
                for row in rows]
    ratios = []
    for a, b in itertools.permutations(rows, 2):
        printed = a.paper_eta / b.paper_eta if a.paper_eta is not None and b.paper_eta is not None else None
        ratios.append(EfficiencyRatio(a.name, b.name, a.eta / b.eta, printed))
    return ComparisonReport(tuple(rows), tuple(ratios), float(R_query), baseline)


def default_architectures() -> List[ArchitectureSpec]:
    # 同为12 cm物理尺寸, 6 GHz总带宽
    polarization = 'Polarization-Aware Spatial Observability'
    noise = 'Sensitivity for Noise Rejection'
    return [
        ArchitectureSpec('FaA-Single', 1, 0.12, 6e9, 128, 'virtual', 63e9, 850.0, 55.0, 60.0,
                         paper_eta=926.0, printed_angular_resolution_rad=0.0157,
                         antenna_form='2-port orthogonal microstrip leaky-wave antenna',
                         qualitative={polarization: 'High (orthogonal dual-channel)', noise: 'High'}),
        ArchitectureSpec('FaA-Dual', 2, 0.12, 6e9, 64, 'virtual', 63e9, 1400.0, 90.0, 60.0,
                         paper_eta=231.0, printed_angular_resolution_rad=0.0314,
                         antenna_form='2 x leaky-wave antenna, 3 GHz sub-band per chain',
                         qualitative={polarization: 'High (orthogonal dual-channel)', noise: 'Medium'}),
        ArchitectureSpec('1T3R-MIMO', 4, 0.12, 6e9, 4, 'physical', 60e9, 1600.0, 100.0, 60.0,
                         paper_eta=58.0, printed_angular_resolution_rad=0.0244,
                         antenna_form='1 x 4 patch array',
                         qualitative={polarization: 'Low (single polarization)', noise: 'Low'}),
    ]


def architecture_from_dict(data: Dict[str, Any]) -> ArchitectureSpec:
    if not isinstance(data, dict):
        raise ConfigError('architecture: expected an object, got {}'.format(type(data).__name__))
    # 配置文件中的键名带单位后缀
    keys = {'name': 'name', 'rf_chains': 'rf_chains', 'L_m': 'L', 'B_hz': 'B', 'M': 'M',
            'aperture_kind': 'aperture_kind', 'f_ref_hz': 'f_ref', 'power_mw': 'power_mw', 'cost_usd': 'cost_usd',
            'fov_deg': 'fov_deg', 'paper_eta': 'paper_eta',
            'printed_angular_resolution_rad': 'printed_angular_resolution_rad', 'antenna_form': 'antenna_form',
            'qualitative': 'qualitative'}
    unknown = sorted(set(data) - set(keys))
    if unknown:
        raise ConfigError('unknown architecture keys: {}'.format(', '.join(unknown)))
    required = ('name', 'rf_chains', 'L_m', 'B_hz', 'M', 'aperture_kind', 'f_ref_hz', 'power_mw', 'cost_usd',
                'fov_deg')
    missing = [key for key in required if key not in data]
    if missing:
        raise ConfigError('architecture {!r} missing keys: {}'.format(data.get('name'), ', '.join(missing)))
    try:
        return ArchitectureSpec(**{keys[k]: v for k, v in data.items()})
    except (TypeError, ValueError) as e:
        raise ConfigError('invalid architecture {!r}: {}'.format(data.get('name'), e))
