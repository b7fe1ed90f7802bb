#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Train one classification tree of height h on a CSV table.

The table is binarized as by prepare-data. The tree is learned by one of the
mixed-integer formulations (FlowOCT, MCF1, MCF2, CUT1, CUT2) or by the greedy
baselines CART and CART_str, and written as JSON.
"""

from __future__ import division

import io
import sys
import logging
import argparse
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import dataset
from .tree_topology import TreeTopology
from .formulations import FormulationKind, ExtraConstraints, TreeModel, build
from .separation import CutStrategy, DEFAULT_FRAC_EPSILON, run_strategy
from .milp_core import SolveConfig, SolveReport, solve
from .tree_extraction import TrainedTree, decode, correct_count
from .cart import CartConfig, fit_cart
from .errors import MiloTreesError

logger = logging.getLogger(__name__)

BASELINES = ('CART', 'CART_str')
METHODS = tuple(k.value for k in FormulationKind) + BASELINES


def create_parser(subparsers=None):

    if subparsers:
        parser = subparsers.add_parser('learn-tree',
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description="learn an optimal classification tree")
    else:
        parser = argparse.ArgumentParser(
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description="learn an optimal classification tree")

    parser.add_argument(
        '--input', '-i', required=True, metavar='PATH',
        help="Training CSV with a header row.")
    parser.add_argument(
        '--output', '-o', type=argparse.FileType('w'), default=sys.stdout,
        metavar='PATH',
        help="Output file for the tree as JSON (default: standard output).")
    parser.add_argument(
        '--manifest', '-m', metavar='PATH',
        help="JSON dataset manifest (label column, column types, dropped columns).")
    parser.add_argument(
        '--label-column', '-l', metavar='NAME',
        help="Name of the label column (default: manifest value or last column).")
    parser.add_argument(
        '--max-thresholds', type=int, default=None, metavar='N',
        help="Thresholds per numeric column, 0 for every midpoint (default: manifest value or 1).")
    parser.add_argument(
        '--height', type=int, default=2, metavar='H',
        help="Tree height (default: %(default)s).")
    parser.add_argument(
        '--formulation', '-f', choices=METHODS, default='CUT2',
        help="Formulation or baseline (default: %(default)s).")
    parser.add_argument(
        '--strategy', choices=[s.value for s in CutStrategy], default='ALL',
        help="Cut strategy for CUT1/CUT2 (default: %(default)s).")
    parser.add_argument(
        '--frac-epsilon', type=float, default=DEFAULT_FRAC_EPSILON, metavar='EPS',
        help="Violation threshold for fractional cuts (default: %(default)s).")
    parser.add_argument(
        '--budget', type=int, default=None, metavar='K',
        help="Allow at most K branching vertices.")
    parser.add_argument(
        '--feature-cap', type=int, default=None, metavar='N',
        help="Use each feature at most N times.")
    parser.add_argument(
        '--min-leaf-support', type=int, default=None, metavar='N',
        help="Every classification vertex must classify at least N training rows correctly.")
    parser.add_argument(
        '--time-limit', type=float, default=3600.0, metavar='SECONDS',
        help="Solver time limit (default: %(default)s).")
    parser.add_argument(
        '--backend', default='highs', choices=['highs', 'scipy'],
        help="MILP backend (default: %(default)s).")
    parser.add_argument(
        '--threads', type=int, default=1,
        help="Solver threads (default: %(default)s).")
    parser.add_argument(
        '--seed', type=int, default=0,
        help="Solver random seed (default: %(default)s).")
    parser.add_argument(
        '--lp', metavar='PATH',
        help="Also write the model in LP format to PATH.")
    parser.add_argument(
        '--cut-log', metavar='PATH',
        help="Write the cuts added by separation to PATH as CSV.")
    parser.add_argument(
        '--verbose', '-v', action="store_true",
        help="verbose mode.")

    return parser


@dataclass
class TrainingResult:
    method: str
    tree: Optional[TrainedTree]
    report: Optional[SolveReport] = None
    model: Optional[TreeModel] = None
    values: Optional[np.ndarray] = None
    train_correct: Optional[int] = None
    label: Optional[str] = None


def train(data, height, method, cfg=None, strategy='ALL', extra=None,
          frac_epsilon=DEFAULT_FRAC_EPSILON, cut_log=None, lp_path=None):
    """Learn a tree of the given height with a formulation or a baseline."""
    cfg = cfg or SolveConfig()
    if method in BASELINES:
        cart_cfg = CartConfig(height, restricted=(method == 'CART_str'), seed=cfg.seed)
        tree = fit_cart(data, cart_cfg)
        return TrainingResult(method, tree, train_correct=correct_count(tree, data), label=cart_cfg.label)

    kind = FormulationKind.parse(method)
    strategy = CutStrategy.parse(strategy) if kind.is_cut else CutStrategy.ALL
    model = build(kind, TreeTopology(height), data, strategy, extra)
    if lp_path:
        with io.open(lp_path, 'w', encoding='utf-8') as fobj:
            model.write_lp(fobj)
    if kind.is_cut:
        report, values = run_strategy(model, strategy, cfg, frac_epsilon, cut_log)
    else:
        report, values = solve(model, cfg)

    if values is None:
        logger.warning('%s h=%d: no tree (%s)', kind, height, report.status)
        return TrainingResult(method, None, report, model)
    tree = decode(values, model)
    correct = correct_count(tree, data)
    if correct != int(round(report.objective)):
        logger.warning('%s h=%d: objective %g but the tree classifies %d rows correctly',
                       kind, height, report.objective, correct)
    return TrainingResult(method, tree, report, model, values, correct)


def learn_tree(args):
    data = dataset.load_dataset(args.input, args.manifest, args.label_column, args.max_thresholds)
    extra = ExtraConstraints(args.budget, args.feature_cap, args.min_leaf_support)
    cfg = SolveConfig(time_limit=args.time_limit, backend=args.backend, threads=args.threads,
                      seed=args.seed, verbose=args.verbose)
    result = train(data, args.height, args.formulation, cfg, args.strategy, extra,
                   args.frac_epsilon, args.cut_log, args.lp)
    if result.tree is None:
        raise MiloTreesError('no tree found: {0}'.format(result.report.status))
    result.tree.save(args.output)
    if result.report is not None:
        logger.info('status %s, objective %g, bound %g, %.2f s', result.report.status,
                    result.report.objective, result.report.best_bound, result.report.wall_seconds)
    logger.info('training accuracy %.4f (%d/%d)', result.train_correct / data.n_samples,
                result.train_correct, data.n_samples)
    return result


if __name__ == '__main__':

    parser = create_parser()
    args = parser.parse_args()
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(levelname)s: %(message)s')
    try:
        learn_tree(args)
    except MiloTreesError as e:
        sys.stderr.write('Error: {0}\n'.format(e))
        sys.exit(1)
