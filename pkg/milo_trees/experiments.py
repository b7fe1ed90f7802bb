#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Benchmark harness driven by one YAML run configuration.

bench  trains every (dataset, height, method, replicate) cell, with methods
       the configured formulations plus CART and CART_str, and writes
       cells.csv, summary.csv and table.txt
cuts   solves CUT1 and CUT2 under every cut strategy and writes
       cut_cells.csv and cut_ratios.csv, with the other strategies' times
       relative to ALL

Every run also writes manifest.json (configuration hash, seeds, backend,
package version, timestamp) to the output directory. Optimal objectives of one
(dataset, height, replicate) must agree across methods; disagreements are
logged and make the command exit with status 2.
"""

from __future__ import division

import io
import os
import sys
import json
import math
import logging
import argparse
import hashlib
import datetime
import time
from multiprocessing import Pool

import yaml
import numpy as np
import pandas as pd

from . import __version__
from . import dataset
from . import backends
from .formulations import FormulationKind, ALL_KINDS
from .separation import CutStrategy, DEFAULT_FRAC_EPSILON
from .milp_core import SolveConfig, OPTIMAL, ERROR
from .learn_tree import train, BASELINES
from .tree_extraction import accuracy
from .errors import MiloTreesError, ConfigError

logger = logging.getLogger(__name__)

DEFAULTS = {
    'data_dir': 'data',
    'output_dir': 'results',
    'heights': [2, 3],
    'formulations': [k.value for k in ALL_KINDS],
    'strategies': ['ALL'],
    'cut_strategies': [s.value for s in CutStrategy],
    'replicates': 5,
    'train_fraction': 0.75,
    'seed': 0,
    'time_limit': 3600.0,
    'gap_tolerance': 1e-4,
    'backend': 'highs',
    'threads': 1,
    'workers': 1,
    'include_cart': True,
    'frac_epsilon': DEFAULT_FRAC_EPSILON,
    'frac_all_rounds': False,
    'pareto': {'k_max': None, 'formulations': ['CUT2'], 'strategy': 'ALL'},
}

# command-line flag -> configuration key
OVERRIDES = ('time_limit', 'heights', 'datasets', 'workers', 'backend', 'output_dir', 'seed', 'replicates')

HEURISTIC = 'heuristic'

CELL_COLUMNS = ['dataset', 'height', 'method', 'strategy', 'replicate', 'status', 'objective', 'best_bound',
                'gap', 'seconds', 'cuts_added', 'nodes', 'n_train', 'n_test', 'train_acc', 'test_acc',
                'n_branch', 'message']


def create_parser(subparsers=None, command='bench'):

    descriptions = {
        'bench': "train every configured method on every dataset, height and replicate",
        'cuts': "compare cut strategies for CUT1 and CUT2",
    }
    if subparsers:
        parser = subparsers.add_parser(command,
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description=descriptions[command])
    else:
        parser = argparse.ArgumentParser(
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description=descriptions[command])

    add_config_arguments(parser)
    return parser


def add_config_arguments(parser):
    parser.add_argument(
        '--config', '-c', required=True, metavar='PATH',
        help="YAML run configuration.")
    parser.add_argument(
        '--time-limit', type=float, metavar='SECONDS',
        help="Solver time limit per cell (overrides the configuration).")
    parser.add_argument(
        '--heights', type=int, nargs='+', metavar='H',
        help="Tree heights (overrides the configuration).")
    parser.add_argument(
        '--datasets', nargs='+', metavar='NAME',
        help="Dataset names (overrides the configuration).")
    parser.add_argument(
        '--workers', type=int, metavar='N',
        help="Parallel worker processes (overrides the configuration).")
    parser.add_argument(
        '--backend', choices=sorted(backends.BACKENDS),
        help="MILP backend (overrides the configuration).")
    parser.add_argument(
        '--output-dir', metavar='PATH',
        help="Directory for result tables (overrides the configuration).")
    parser.add_argument(
        '--seed', type=int,
        help="Split seed (overrides the configuration).")
    parser.add_argument(
        '--replicates', type=int, metavar='N',
        help="Number of train/test splits (overrides the configuration).")
    parser.add_argument(
        '--verbose', '-v', action="store_true",
        help="verbose mode.")


def load_config(path, args=None):
    """Merge the YAML file at `path` over DEFAULTS, then command-line overrides.

    Returns the configuration dict and the SHA-256 of the file contents.
    """
    try:
        with io.open(path, encoding='utf-8') as fobj:
            text = fobj.read()
    except (IOError, OSError):
        raise ConfigError('cannot read configuration {0}'.format(path))
    try:
        loaded = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        raise ConfigError('configuration {0} is not valid YAML: {1}'.format(path, e))
    if not isinstance(loaded, dict):
        raise ConfigError('configuration {0} must be a mapping'.format(path))
    unknown = sorted(set(loaded) - set(DEFAULTS) - {'datasets'})
    if unknown:
        raise ConfigError('unknown configuration keys: {0}'.format(', '.join(unknown)))

    cfg = dict(DEFAULTS)
    cfg['pareto'] = dict(DEFAULTS['pareto'], **(loaded.pop('pareto', None) or {}))
    cfg.update(loaded)
    if args is not None:
        for key in OVERRIDES:
            value = getattr(args, key, None)
            if value is not None:
                cfg[key] = value
    validate_config(cfg)
    return cfg, hashlib.sha256(text.encode('utf-8')).hexdigest()


def validate_config(cfg):
    if not cfg.get('datasets'):
        raise ConfigError('configuration lists no datasets')
    if isinstance(cfg['datasets'], str):
        cfg['datasets'] = [cfg['datasets']]
    try:
        cfg['formulations'] = [FormulationKind.parse(k).value for k in cfg['formulations']]
        cfg['strategies'] = [CutStrategy.parse(s).value for s in cfg['strategies']]
        cfg['cut_strategies'] = [CutStrategy.parse(s).value for s in cfg['cut_strategies']]
        cfg['pareto']['formulations'] = [FormulationKind.parse(k).value for k in cfg['pareto']['formulations']]
        cfg['pareto']['strategy'] = CutStrategy.parse(cfg['pareto']['strategy']).value
    except ValueError as e:
        raise ConfigError(str(e))
    for key in ('replicates', 'workers', 'threads'):
        if not isinstance(cfg[key], int) or cfg[key] < 1:
            raise ConfigError('{0} must be a positive integer'.format(key))
    if not cfg['heights'] or any(not isinstance(h, int) or h < 1 for h in cfg['heights']):
        raise ConfigError('heights must be positive integers')
    if not 0 < float(cfg['train_fraction']) < 1:
        raise ConfigError('train_fraction must lie strictly between 0 and 1')
    if float(cfg['time_limit']) <= 0:
        raise ConfigError('time_limit must be positive')
    if float(cfg['frac_epsilon']) <= 0:
        raise ConfigError('frac_epsilon must be positive')
    if cfg['backend'] not in backends.BACKENDS:
        raise ConfigError('unknown backend {0!r}'.format(cfg['backend']))
    return cfg


def solve_config(cfg):
    return SolveConfig(time_limit=float(cfg['time_limit']), gap_tolerance=float(cfg['gap_tolerance']),
                       backend=cfg['backend'], threads=cfg['threads'], seed=cfg['seed'],
                       frac_all_rounds=bool(cfg['frac_all_rounds']))


_DATASETS = {}


def load_named(cfg, name):
    """Dataset `name` from <data_dir>/<name>.csv and the optional <name>.json manifest; cached per process."""
    csv_path = os.path.join(cfg['data_dir'], name + '.csv')
    manifest_path = os.path.join(cfg['data_dir'], name + '.json')
    key = (csv_path, manifest_path)
    if key not in _DATASETS:
        if not os.path.exists(csv_path):
            raise ConfigError('dataset {0!r} not found at {1}'.format(name, csv_path))
        _DATASETS[key] = dataset.load_dataset(
            csv_path, manifest_path if os.path.exists(manifest_path) else None, name=name)
    return _DATASETS[key]


def split_for(cfg, data, replicate):
    spec = dataset.SplitSpec(cfg['seed'], cfg['train_fraction'], replicate)
    return dataset.split(data, spec)


def write_manifest(output_dir, verb, cfg, config_hash):
    manifest = {
        'command': verb,
        'config_sha256': config_hash,
        'config': cfg,
        'seed': cfg['seed'],
        'split_seeds': [{'seed': cfg['seed'], 'replicate_index': r} for r in range(cfg['replicates'])],
        'backend': backends.identity(cfg['backend']),
        'version': __version__,
        'timestamp': datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    with io.open(os.path.join(output_dir, 'manifest.json'), 'w', encoding='utf-8') as fobj:
        json.dump(manifest, fobj, indent=2, sort_keys=True, default=str)
        fobj.write('\n')
    return manifest


def _run_cell(job):
    """One training run; failures become rows with status 'error'."""
    cfg, name, height, method, strategy, replicate, cut_log = job
    row = {'dataset': name, 'height': height, 'method': method, 'strategy': strategy, 'replicate': replicate}
    start = time.time()
    try:
        train_data, test_data = split_for(cfg, load_named(cfg, name), replicate)
        result = train(train_data, height, method, solve_config(cfg), strategy,
                       frac_epsilon=float(cfg['frac_epsilon']), cut_log=cut_log)
    except (MiloTreesError, ValueError) as e:
        logger.warning('%s h=%d %s %s r%d failed: %s', name, height, method, strategy, replicate, e)
        row.update(status=ERROR, message=str(e))
        return row

    if result.report is not None:
        row.update(result.report.as_row())
        row['message'] = result.report.message
    else:
        row.update(status=HEURISTIC, objective=result.train_correct, seconds=time.time() - start,
                   message=result.label)
    row['n_train'] = train_data.n_samples
    row['n_test'] = test_data.n_samples
    if result.tree is not None:
        row['train_acc'] = result.train_correct / train_data.n_samples
        row['test_acc'] = accuracy(result.tree, test_data)
        row['n_branch'] = result.tree.n_branch
    logger.info('%s h=%d %-8s %-5s r%d: %s train %.4f', name, height, method, strategy, replicate,
                row['status'], row.get('train_acc', float('nan')))
    return row


def run_jobs(jobs, workers):
    if workers > 1 and len(jobs) > 1:
        pool = Pool(workers)
        try:
            return pool.map(_run_cell, jobs, chunksize=1)
        finally:
            pool.close()
            pool.join()
    return [_run_cell(job) for job in jobs]


def check_agreement(cells, group_by, label):
    """Groups whose optimal objectives differ; logged as errors."""
    optimal = cells[cells['status'] == OPTIMAL]
    problems = []
    for key, group in optimal.groupby(group_by):
        values = group['objective'].round().astype(int).unique()
        if len(values) > 1:
            problems.append(key)
            logger.error('%s disagree on %s: %s', label, key,
                         ', '.join('{0}={1}'.format(m, o) for m, o in zip(group[label], group['objective'])))
    return problems


def check_dominance(cells):
    """(dataset, height, replicate) where CART beats an optimal formulation on training data."""
    problems = []
    key = ['dataset', 'height', 'replicate']
    baseline = cells[cells['method'].isin(BASELINES)]
    milo = cells[(~cells['method'].isin(BASELINES)) & (cells['status'] == OPTIMAL)]
    if baseline.empty or milo.empty:
        return problems
    best_cart = baseline.groupby(key)['objective'].max()
    best_milo = milo.groupby(key)['objective'].max()
    for index in best_milo.index.intersection(best_cart.index):
        if best_milo[index] < best_cart[index] - 1e-6:
            problems.append(index)
            logger.error('optimal objective %g below CART %g on %s', best_milo[index], best_cart[index], index)
    return problems


def format_time_or_gap(row):
    """'12.34' for optimal cells, '(5.2%)' with the remaining gap otherwise."""
    if row['status'] in (OPTIMAL, HEURISTIC):
        return '{0:.2f}'.format(row['seconds'])
    if row['status'] in (ERROR, 'infeasible') or math.isnan(row['gap']):
        return '-'
    return '({0:.1f}%)'.format(100 * row['gap'])


def cells_frame(rows):
    return pd.DataFrame(rows).reindex(columns=CELL_COLUMNS)


def summarize(cells):
    frame = cells.copy()
    frame['optimal'] = (frame['status'] == OPTIMAL).astype(int)
    grouped = frame.groupby(['dataset', 'height', 'method'], sort=True)
    summary = grouped.agg(train_acc=('train_acc', 'mean'), test_acc=('test_acc', 'mean'),
                          seconds=('seconds', 'mean'), gap=('gap', 'mean'), optimal=('optimal', 'sum'),
                          runs=('status', 'size')).reset_index()
    summary['status'] = np.where(summary['optimal'] == summary['runs'], OPTIMAL, 'feasible-limit')
    summary.loc[summary['method'].isin(BASELINES), 'status'] = HEURISTIC
    return summary


def render_table(summary, value='time'):
    """Text table, rows (dataset, h), one column per method."""
    frame = summary.copy()
    if value == 'time':
        frame['cell'] = frame.apply(format_time_or_gap, axis=1)
    else:
        frame['cell'] = frame[value].map(lambda x: '-' if pd.isnull(x) else '{0:.2f}'.format(100 * x))
    table = frame.pivot_table(index=['dataset', 'height'], columns='method', values='cell', aggfunc='first')
    return table.to_string()


def _prepare_output(cfg):
    output_dir = cfg['output_dir']
    if not os.path.isdir(output_dir):
        os.makedirs(output_dir)
    return output_dir


def run_matrix(cfg, config_hash='', verb='bench'):
    """Returns (cells, summary, number of invariant failures)."""
    output_dir = _prepare_output(cfg)
    methods = [(k, s if FormulationKind.parse(k).is_cut else 'ALL')
               for k in cfg['formulations'] for s in cfg['strategies']]
    methods = list(dict.fromkeys(methods))
    if cfg['include_cart']:
        methods += [(b, '-') for b in BASELINES]
    jobs = [(cfg, name, h, method, strategy, r, None)
            for name in cfg['datasets'] for h in cfg['heights']
            for method, strategy in methods for r in range(cfg['replicates'])]
    logger.info('%s: %d cells with %d workers', verb, len(jobs), cfg['workers'])
    write_manifest(output_dir, verb, cfg, config_hash)

    cells = cells_frame(run_jobs(jobs, cfg['workers']))
    cells.to_csv(os.path.join(output_dir, 'cells.csv'), index=False, lineterminator='\n')
    summary = summarize(cells)
    summary.to_csv(os.path.join(output_dir, 'summary.csv'), index=False, lineterminator='\n')
    with io.open(os.path.join(output_dir, 'table.txt'), 'w', encoding='utf-8') as fobj:
        fobj.write('time in seconds, (gap) when the time limit was hit\n')
        fobj.write(render_table(summary, 'time') + '\n\n')
        fobj.write('training accuracy (%)\n')
        fobj.write(render_table(summary, 'train_acc') + '\n\n')
        fobj.write('test accuracy (%)\n')
        fobj.write(render_table(summary, 'test_acc') + '\n')

    failures = check_agreement(cells, ['dataset', 'height', 'replicate'], 'method')
    failures += check_dominance(cells)
    return cells, summary, len(failures)


def cut_ratios(cells):
    """ALL time (or gap) per (dataset, h, formulation); other strategies as time ratios to ALL."""
    frame = cells.copy()
    grouped = frame.groupby(['dataset', 'height', 'method', 'strategy'])
    means = grouped.agg(seconds=('seconds', 'mean'), gap=('gap', 'max'),
                        optimal=('status', lambda s: int((s == OPTIMAL).all()))).reset_index()
    rows = []
    for (name, height, method), group in means.groupby(['dataset', 'height', 'method']):
        group = group.set_index('strategy')
        row = {'dataset': name, 'height': height, 'method': method}
        if 'ALL' in group.index:
            base = group.loc['ALL']
            row['ALL'] = (base['seconds'] if base['optimal']
                          else '({0:.1f}%)'.format(100 * base['gap']) if not pd.isnull(base['gap']) else '-')
        for strategy in group.index:
            if strategy == 'ALL':
                continue
            if 'ALL' in group.index and group.loc['ALL', 'seconds'] > 0:
                row[strategy] = group.loc[strategy, 'seconds'] / group.loc['ALL', 'seconds']
            else:
                row[strategy] = np.nan
        rows.append(row)
    columns = ['dataset', 'height', 'method'] + [s.value for s in CutStrategy]
    return pd.DataFrame(rows).reindex(columns=columns)


def run_cut_comparison(cfg, config_hash='', verb='cuts'):
    """Returns (cells, ratios, number of invariant failures)."""
    output_dir = _prepare_output(cfg)
    log_dir = os.path.join(output_dir, 'cut_logs')
    if not os.path.isdir(log_dir):
        os.makedirs(log_dir)
    kinds = [k for k in cfg['formulations'] if FormulationKind.parse(k).is_cut] or ['CUT1', 'CUT2']
    jobs = []
    for name in cfg['datasets']:
        for h in cfg['heights']:
            for kind in kinds:
                for strategy in cfg['cut_strategies']:
                    for r in range(cfg['replicates']):
                        log = None
                        if strategy != 'ALL':
                            log = os.path.join(log_dir, 'cuts_{0}_h{1}_{2}_{3}_r{4}.csv'.format(
                                name, h, kind, strategy, r))
                        jobs.append((cfg, name, h, kind, strategy, r, log))
    logger.info('%s: %d cells with %d workers', verb, len(jobs), cfg['workers'])
    write_manifest(output_dir, verb, cfg, config_hash)

    cells = cells_frame(run_jobs(jobs, cfg['workers']))
    cells.to_csv(os.path.join(output_dir, 'cut_cells.csv'), index=False, lineterminator='\n')
    ratios = cut_ratios(cells)
    ratios.to_csv(os.path.join(output_dir, 'cut_ratios.csv'), index=False, lineterminator='\n')
    failures = check_agreement(cells, ['dataset', 'height', 'method', 'replicate'], 'strategy')
    return cells, ratios, len(failures)


def bench(args):
    cfg, config_hash = load_config(args.config, args)
    _, _, failures = run_matrix(cfg, config_hash, 'bench')
    return failures


def cuts(args):
    cfg, config_hash = load_config(args.config, args)
    _, _, failures = run_cut_comparison(cfg, config_hash, 'cuts')
    return failures


if __name__ == '__main__':

    command = sys.argv.pop(1) if len(sys.argv) > 1 and sys.argv[1] in ('bench', 'cuts') else 'bench'
    parser = create_parser(command=command)
    args = parser.parse_args()
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(levelname)s: %(message)s')
    try:
        failures = bench(args) if command == 'bench' else cuts(args)
    except MiloTreesError as e:
        sys.stderr.write('Error: {0}\n'.format(e))
        sys.exit(1)
    sys.exit(2 if failures else 0)
