#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Sweep the number of branching vertices and record the accuracy trade-off.

For k = 0..k_max a tree with at most k branching vertices is trained; the tree
found for k is the warm start for k+1. A row is Pareto-dominant when no other
row reaches at least its test accuracy with at most its k (and is strictly
better in one of the two).

The frontier is written as CSV with columns
  dataset, formulation, h, k, train_obj, test_acc, status, seconds, dominant
and optionally drawn as an SVG scatter plot (requires matplotlib).
"""

from __future__ import division

import os
import sys
import logging
import argparse

import numpy as np
import pandas as pd

from .tree_topology import TreeTopology
from .formulations import FormulationKind, ExtraConstraints, build
from .separation import CutStrategy, DEFAULT_FRAC_EPSILON, run_strategy
from .milp_core import ERROR, solve
from .tree_extraction import decode, encode, accuracy
from .experiments import load_config, load_named, split_for, solve_config, write_manifest, add_config_arguments
from .errors import MiloTreesError

logger = logging.getLogger(__name__)

COLUMNS = ['dataset', 'formulation', 'h', 'k', 'train_obj', 'test_acc', 'status', 'seconds',
           'warm_start_accepted', 'dominant']


def create_parser(subparsers=None):

    if subparsers:
        parser = subparsers.add_parser('pareto',
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description="sweep the branching budget and mark Pareto-dominant trees")
    else:
        parser = argparse.ArgumentParser(
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description="sweep the branching budget and mark Pareto-dominant trees")

    add_config_arguments(parser)
    parser.add_argument(
        '--k-max', type=int, default=None, metavar='K',
        help="Largest branching budget (default: configuration value, else 2^h - 1).")
    parser.add_argument(
        '--svg', action='store_true',
        help="Also draw each frontier as SVG (needs matplotlib).")

    return parser


def dominance(k, test_acc):
    """Boolean mask of rows not dominated by any other (fewer or equal k, higher or equal accuracy)."""
    k = np.asarray(k, dtype=np.float64)
    acc = np.asarray(test_acc, dtype=np.float64)
    valid = ~np.isnan(acc)
    dominant = np.zeros(len(k), dtype=bool)
    for r in np.flatnonzero(valid):
        others = valid & (k <= k[r]) & (acc >= acc[r]) & ((k < k[r]) | (acc > acc[r]))
        dominant[r] = not others.any()
    return dominant


def sweep(topology, train_data, test_data, kind, k_max, cfg, strategy='ALL', extra=None,
          frac_epsilon=DEFAULT_FRAC_EPSILON, name=None):
    """Frontier table for k = 0..k_max; a failed k is recorded and the sweep goes on."""
    kind = FormulationKind.parse(kind)
    strategy = CutStrategy.parse(strategy) if kind.is_cut else CutStrategy.ALL
    n_branch = topology.first_leaf - 1
    if k_max is None:
        k_max = n_branch
    if not 0 <= k_max <= n_branch:
        raise ValueError('k_max must lie in 0..{0}, got {1}'.format(n_branch, k_max))
    extra = extra or ExtraConstraints()

    rows = []
    previous = None
    for k in range(k_max + 1):
        row = {'dataset': name or train_data.name, 'formulation': kind.value, 'h': topology.height, 'k': k}
        try:
            budget = ExtraConstraints(k, extra.feature_cap, extra.min_leaf_support)
            model = build(kind, topology, train_data, strategy, budget)
            warm = encode(previous, model) if previous is not None else None
            run_cfg = cfg.derive(warm_start=warm)
            if kind.is_cut:
                report, values = run_strategy(model, strategy, run_cfg, frac_epsilon)
            else:
                report, values = solve(model, run_cfg)
            row.update(train_obj=report.objective, status=report.status, seconds=report.wall_seconds,
                       warm_start_accepted=report.warm_start_accepted)
            if values is not None:
                tree = decode(values, model)
                row['test_acc'] = accuracy(tree, test_data)
                previous = tree
        except MiloTreesError as e:
            logger.warning('k=%d failed: %s', k, e)
            row.update(status=ERROR)
        logger.info('%s h=%d k=%d: %s train %s test %s', kind, topology.height, k, row['status'],
                    row.get('train_obj'), row.get('test_acc'))
        rows.append(row)

    frame = pd.DataFrame(rows).reindex(columns=COLUMNS)
    frame['dominant'] = dominance(frame['k'], frame['test_acc']).astype(int)
    return frame


def plot_frontier(frame, path):
    """Scatter of test accuracy against k, dominant rows highlighted."""
    try:
        import matplotlib
        matplotlib.use('Agg')
        import matplotlib.pyplot as plt
    except ImportError:
        logger.warning('matplotlib is not installed; skipping %s', path)
        return False
    fig, ax = plt.subplots(figsize=(5, 3.5))
    dominated = frame[frame['dominant'] == 0]
    dominant = frame[frame['dominant'] == 1]
    ax.scatter(dominated['k'], dominated['test_acc'], marker='o', facecolors='none', edgecolors='grey',
               label='dominated')
    ax.scatter(dominant['k'], dominant['test_acc'], marker='o', color='black', label='Pareto-dominant')
    ax.set_xlabel('branching vertices k')
    ax.set_ylabel('test accuracy')
    ax.legend(loc='lower right')
    fig.tight_layout()
    fig.savefig(path, format='svg')
    plt.close(fig)
    return True


def pareto(args):
    """Sweeps every configured dataset, height, formulation and replicate; returns the frontier."""
    cfg, config_hash = load_config(args.config, args)
    output_dir = cfg['output_dir']
    if not os.path.isdir(output_dir):
        os.makedirs(output_dir)
    write_manifest(output_dir, 'pareto', cfg, config_hash)
    k_max = args.k_max if args.k_max is not None else cfg['pareto']['k_max']

    frames = []
    for name in cfg['datasets']:
        data = load_named(cfg, name)
        for h in cfg['heights']:
            topology = TreeTopology(h)
            limit = None if k_max is None else min(k_max, topology.first_leaf - 1)
            for kind in cfg['pareto']['formulations']:
                for r in range(cfg['replicates']):
                    train_data, test_data = split_for(cfg, data, r)
                    frame = sweep(topology, train_data, test_data, kind, limit, solve_config(cfg),
                                  cfg['pareto']['strategy'], frac_epsilon=float(cfg['frac_epsilon']), name=name)
                    frame.insert(4, 'replicate', r)
                    frames.append(frame)
                    if args.svg:
                        plot_frontier(frame, os.path.join(output_dir, 'pareto_{0}_h{1}_{2}_r{3}.svg'.format(
                            name, h, kind, r)))
    frontier = pd.concat(frames, ignore_index=True)
    frontier.to_csv(os.path.join(output_dir, 'pareto.csv'), index=False, lineterminator='\n')
    return frontier


def check_frontier(frontier):
    """Sweeps whose training objective decreases with k or whose warm start was refused."""
    problems = []
    for key, group in frontier.groupby(['dataset', 'formulation', 'h', 'replicate']):
        group = group.sort_values('k')
        solved = group[group['status'] == 'optimal']
        if (np.diff(solved['train_obj'].values) < -1e-6).any():
            problems.append(key)
            logger.error('training objective decreases with k on %s', key)
        refused = group[group['warm_start_accepted'] == False]  # noqa: E712
        if len(refused):
            problems.append(key)
            logger.error('warm start refused on %s at k=%s', key, refused['k'].tolist())
    return problems


if __name__ == '__main__':

    parser = create_parser()
    args = parser.parse_args()
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(levelname)s: %(message)s')
    try:
        frontier = pareto(args)
    except MiloTreesError as e:
        sys.stderr.write('Error: {0}\n'.format(e))
        sys.exit(1)
    sys.exit(2 if check_frontier(frontier) else 0)
