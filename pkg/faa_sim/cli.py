# -*- coding: utf-8 -*-

import argparse
import json
import logging
import math
import os
import sys
from typing import Any, Optional, List, Sequence

import numpy as np

from .base import FaaError, ConfigError, Measurement
from .config import ExperimentConfig, load_config, parse_snr
from .sensor import FaaSensor
from .fingerprint import (Dictionary, dictionary_records, save_dictionary, load_dictionary, match_scores,
                          build_fingerprint)
from .archcomp import compare, default_architectures
from ._records import RecordCollection

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

MEASUREMENT_HEADERS = ('m', 'f_hz', 'theta_deg', 'sx_re', 'sx_im', 'sy_re', 'sy_im')


def write_output(text: str, path: Optional[str]) -> None:
    # 未指定路径时写stdout
    if path is None:
        sys.stdout.write(text)
        if not text.endswith('\n'):
            sys.stdout.write('\n')
        return
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + '\n'


def measurement_records(meas: Measurement, sensor: FaaSensor) -> RecordCollection:
    freqs = sensor.plan.grid()
    thetas = np.degrees(sensor.dispersion.beam_angle(freqs))
    rows = [(m + 1, freqs[m], thetas[m], meas.s_x[m].real, meas.s_x[m].imag, meas.s_y[m].real, meas.s_y[m].imag)
            for m in range(meas.M)]
    return RecordCollection.from_rows(MEASUREMENT_HEADERS, rows)


def read_measurement(path: str, sensor: FaaSensor) -> Measurement:
    try:
        with open(path, encoding='utf-8') as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError('cannot read measurement {}: {}'.format(path, e))
    collection = RecordCollection.from_csv(text, MEASUREMENT_HEADERS, source=path, exact=True)
    if len(collection) != sensor.plan.M:
        raise ConfigError('{}: measurement has {} rows but the plan has M={}'.format(path, len(collection),
                                                                                     sensor.plan.M))
    s_x = np.empty(sensor.plan.M, dtype=complex)
    s_y = np.empty(sensor.plan.M, dtype=complex)
    for i, (line_no, record) in enumerate(collection.numbered()):
        try:
            if int(record['m']) != i + 1:
                raise ValueError('expected m={}, got {}'.format(i + 1, record['m']))
            s_x[i] = complex(float(record['sx_re']), float(record['sx_im']))
            s_y[i] = complex(float(record['sy_re']), float(record['sy_im']))
        except ValueError as e:
            raise ConfigError('{}: line {}: {}'.format(path, line_no, e))
    return Measurement(sensor.plan, s_x, s_y)


def parse_vector(text: str, name: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(',')]
    except ValueError:
        raise ConfigError('{} must be three comma-separated numbers, got {!r}'.format(name, text))
    if len(values) != 3:
        raise ConfigError('{} must be three comma-separated numbers, got {!r}'.format(name, text))
    return values


def parse_snr_list(text: str) -> List[Optional[float]]:
    snrs = []
    for item in text.split(','):
        item = item.strip()
        try:
            snrs.append(parse_snr(item if item == 'noiseless' else float(item), '--snr'))
        except ValueError:
            raise ConfigError('--snr items must be numbers or noiseless, got {!r}'.format(item))
    return snrs


def _dictionary(args: argparse.Namespace, config: ExperimentConfig, sensor: FaaSensor) -> Dictionary:
    config.require('grid')
    if getattr(args, 'dictionary', None):
        try:
            return load_dictionary(args.dictionary, config.grid, sensor.plan)
        except (OSError, UnicodeDecodeError) as e:
            raise ConfigError('cannot read dictionary {}: {}'.format(args.dictionary, e))
    return sensor.dictionary(config.grid)


def cmd_simulate(args: argparse.Namespace, config: ExperimentConfig) -> None:
    config.require('scene')
    sensor = FaaSensor.from_config(config)
    meas = sensor.simulate(config.scene)
    write_output(measurement_records(meas, sensor).export('csv'), args.out)


def cmd_dict(args: argparse.Namespace, config: ExperimentConfig) -> None:
    config.require('grid')
    sensor = FaaSensor.from_config(config)
    dictionary = sensor.dictionary(config.grid)
    if args.out is None:
        write_output(dictionary_records(dictionary).export('csv'), None)
    else:
        save_dictionary(dictionary, args.out)


def cmd_localize(args: argparse.Namespace, config: ExperimentConfig) -> None:
    sensor = FaaSensor.from_config(config)
    meas = read_measurement(args.measurement, sensor)
    dictionary = _dictionary(args, config, sensor)
    result = sensor.localize(meas, dictionary)
    if args.scores:
        scores = match_scores(build_fingerprint(meas), dictionary)
        rows = [tuple(dictionary.grid.indices(i)) + dictionary.grid.point(i) + (scores[i],)
                for i in range(dictionary.size)]
        write_output(RecordCollection.from_rows(('ix', 'iy', 'iz', 'x', 'y', 'z', 'score'), rows).export('csv'),
                     args.scores)
    write_output(dump_json({'estimate': list(result.position), 'score': result.score, 'grid_index': result.index,
                            'dictionary_size': dictionary.size}), args.out)


def cmd_probe(args: argparse.Namespace, config: ExperimentConfig) -> None:
    sensor = FaaSensor.from_config(config)
    if args.p0 is not None:
        p0 = parse_vector(args.p0, '--p0')
    else:
        if config.scene is None or not config.scene.targets:
            raise ConfigError('probe needs --p0 or a scene target')
        p0 = list(config.scene.targets[0].p)
    axis = args.axis if args.axis in ('azimuth', 'elevation', 'range') else parse_vector(args.axis, '--axis')
    if args.steps < 1 or not args.span > 0:
        raise ConfigError('--steps must be >= 1 and --span > 0')
    curve = sensor.probe(p0, axis, np.linspace(-args.span, args.span, 2 * args.steps + 1))
    rows = zip(curve.offsets, curve.similarity, curve.similarity_x, curve.similarity_y)
    write_output(RecordCollection.from_rows(('offset', 'similarity', 'similarity_x', 'similarity_y'), rows)
                 .export('csv'), args.out)
    summary = {'p0': p0, 'axis': args.axis, 'span': args.span, 'steps': args.steps,
               'half_power_width': curve.half_power_width, 'width_x': curve.width_x, 'width_y': curve.width_y}
    if args.summary is not None or args.out is not None:
        write_output(dump_json(summary), args.summary)


def cmd_compare(args: argparse.Namespace, config: ExperimentConfig) -> None:
    specs = config.architectures if config.architectures is not None else default_architectures()
    R_query = args.r_query if args.r_query is not None else config.r_query_m
    report = compare(specs, R_query, config.baseline)
    if args.out is not None:
        write_output(dump_json(report.to_dict()), args.out)
    if args.table is not None or args.out is None:
        write_output(report.table(), args.table)


def cmd_sweep(args: argparse.Namespace, config: ExperimentConfig) -> None:
    config.require('scene', 'grid')
    sensor = FaaSensor.from_config(config)
    snrs = parse_snr_list(args.snr)
    result = sensor.sweep(config.scene, config.grid, snrs, args.trials)

    def label(snr_db):
        return 'noiseless' if snr_db is None else snr_db

    rows = [(label(p.snr_db), p.rmse_m, p.trials) for p in result.points]
    write_output(RecordCollection.from_rows(('snr_db', 'rmse_m', 'trials'), rows).export('csv'), args.out)
    if args.trials_out:
        rows = [(label(t.snr_db), t.trial) + tuple(t.position) + (t.error_m, t.score) for t in result.trials]
        write_output(RecordCollection.from_rows(('snr_db', 'trial', 'x', 'y', 'z', 'error_m', 'score'), rows)
                     .export('csv'), args.trials_out)


def cmd_schedule(args: argparse.Namespace, config: ExperimentConfig) -> None:
    sensor = FaaSensor.from_config(config)
    schedule = sensor.schedule()
    rows = [(e.m, e.t_start, e.t_tx_end, e.t_rx_start, e.t_rx_end, e.f_c, math.degrees(e.theta))
            for e in schedule.entries]
    write_output(RecordCollection.from_rows(('m', 't_start_s', 't_tx_end_s', 't_rx_start_s', 't_rx_end_s', 'f_hz',
                                             'theta_deg'), rows).export('csv'), args.out)


def cmd_profile(args: argparse.Namespace, config: ExperimentConfig) -> None:
    config.require('scene')
    sensor = FaaSensor.from_config(config)
    profiles, ranges = sensor.range_profiles(config.scene)
    rows = [(m + 1, q, ranges[q], profiles[m, q].real, profiles[m, q].imag, abs(profiles[m, q]))
            for m in range(profiles.shape[0]) for q in range(profiles.shape[1])]
    write_output(RecordCollection.from_rows(('m', 'q', 'range_m', 're', 'im', 'mag'), rows).export('csv'), args.out)


COMMANDS = {
    'simulate': cmd_simulate,
    'dict': cmd_dict,
    'localize': cmd_localize,
    'probe': cmd_probe,
    'compare': cmd_compare,
    'sweep': cmd_sweep,
    'schedule': cmd_schedule,
    'profile': cmd_profile,
}


class _ArgumentParser(argparse.ArgumentParser):

    def error(self, message):
        # 参数错误与配置错误同为退出码2
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, '{}: error: {}\n'.format(self.prog, message))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='experiment config JSON (default: $FAA_CONFIG)')
    common.add_argument('--out', help='output path (default: stdout)')
    common.add_argument('--seed', type=int, help='override the scene seed')
    common.add_argument('-v', '--verbose', action='count', default=0, help='-v info, -vv debug')

    parser = _ArgumentParser(prog='faa-sim', description='Frequency-scanned single-chain radar sensing simulator.')
    sub = parser.add_subparsers(dest='command', metavar='command', parser_class=_ArgumentParser)
    sub.required = True
    sub.add_parser('simulate', parents=[common], help='synthesize a two-channel measurement CSV')
    p = sub.add_parser('dict', parents=[common], help='build the fingerprint dictionary over the grid')
    p = sub.add_parser('localize', parents=[common], help='localize a measurement CSV against the dictionary')
    p.add_argument('measurement', help='measurement CSV written by simulate')
    p.add_argument('--dictionary', help='reuse a dictionary CSV written by dict --out')
    p.add_argument('--scores', help='write the score map CSV here')
    p = sub.add_parser('probe', parents=[common], help='ambiguity curve along one axis')
    p.add_argument('--p0', help='reference position X,Y,Z in m (default: first scene target)')
    p.add_argument('--axis', default='azimuth', help='azimuth, elevation, range or a direction ux,uy,uz')
    p.add_argument('--span', type=float, default=0.05, help='half span: rad for angles, m otherwise')
    p.add_argument('--steps', type=int, default=50, help='samples per side')
    p.add_argument('--summary', help='write the summary JSON here')
    p = sub.add_parser('compare', parents=[common], help='architecture comparison report')
    p.add_argument('--table', help='write the aligned text table here')
    p.add_argument('--r-query', dest='r_query', type=float, help='query range for cell volumes in m')
    p = sub.add_parser('sweep', parents=[common], help='Monte-Carlo localization RMSE against SNR')
    p.add_argument('--snr', default='-10,0,10,20,30', help='comma list of dB values and/or noiseless')
    p.add_argument('--trials', type=int, default=200, help='trials per SNR value')
    p.add_argument('--trials-out', dest='trials_out', help='write the per-trial CSV here')
    sub.add_parser('schedule', parents=[common], help='per-chirp Tx/guard/Rx frame schedule CSV')
    sub.add_parser('profile', parents=[common], help='per-chirp dechirp range profiles CSV')
    return parser


def configure_logging(verbose: int) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = os.environ.get('FAA_LOG_LEVEL', 'WARNING').upper()
    logging.basicConfig(level=level, stream=sys.stderr, format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configure_logging(args.verbose)
    except ValueError as e:
        sys.stderr.write('faa-sim: invalid FAA_LOG_LEVEL: {}\n'.format(e))
        return EXIT_CONFIG
    try:
        if args.command == 'compare' and args.config is None and os.environ.get('FAA_CONFIG') is None:
            # compare无配置时使用内置的三种架构
            config = ExperimentConfig(source='<defaults>')
        else:
            config = load_config(args.config)
        config = config.with_seed(args.seed)
        COMMANDS[args.command](args, config)
    except ConfigError as e:
        logger.error('{}: {}  (in {})'.format(str(type(e))[8:-2], e, args.command))
        return EXIT_CONFIG
    except Exception as e:
        logger.error('{}: {}  (in {})'.format(str(type(e))[8:-2], e, args.command),
                     exc_info=not isinstance(e, FaaError))
        return EXIT_RUNTIME
    return EXIT_OK
