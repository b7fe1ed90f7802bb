#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Exhaustive search for the best tree on tiny instances, and a checker that
compares every formulation's optimum against it on random instances.

Each vertex either classifies (with the majority class of the datapoints that
reach it) or branches on one of the features; the search tries every such
structure within the branching budget.
"""

from __future__ import division

import sys
import logging
import argparse
from functools import lru_cache

import numpy as np
import pandas as pd

from .dataset import BinaryDataset
from .tree_topology import TreeTopology
from .formulations import FormulationKind, ExtraConstraints, ALL_KINDS
from .milp_core import SolveConfig, OPTIMAL
from .tree_extraction import TrainedTree
from .learn_tree import train
from .errors import InstanceTooLargeError, MiloTreesError

logger = logging.getLogger(__name__)

MAX_FEATURES = 5
MAX_HEIGHT = 2


def create_parser(subparsers=None):

    if subparsers:
        parser = subparsers.add_parser('oracle-check',
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description="compare formulation optima with exhaustive search on random tiny instances")
    else:
        parser = argparse.ArgumentParser(
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description="compare formulation optima with exhaustive search on random tiny instances")

    parser.add_argument(
        '--instances', '-n', type=int, default=50,
        help="Number of random instances (default: %(default)s).")
    parser.add_argument(
        '--seed', type=int, default=0,
        help="Seed of the instance generator (default: %(default)s).")
    parser.add_argument(
        '--formulations', nargs='+', choices=[k.value for k in ALL_KINDS],
        default=[k.value for k in ALL_KINDS],
        help="Formulations to check (default: all).")
    parser.add_argument(
        '--budget', action='store_true',
        help="Also draw a random branching budget per instance.")
    parser.add_argument(
        '--backend', default='highs', choices=['highs', 'scipy'],
        help="MILP backend (default: %(default)s).")
    parser.add_argument(
        '--time-limit', type=float, default=60.0, metavar='SECONDS',
        help="Time limit per solve (default: %(default)s).")
    parser.add_argument(
        '--output', '-o', metavar='PATH',
        help="Write one CSV row per (instance, formulation) to PATH.")
    parser.add_argument(
        '--verbose', '-v', action="store_true",
        help="verbose mode.")

    return parser


def enumerate_optimal(data, height, budget=None):
    """Best number of correctly classified datapoints and one tree attaining it."""
    if data.n_features > MAX_FEATURES or height > MAX_HEIGHT:
        raise InstanceTooLargeError('exhaustive search is limited to |F| <= {0} and h <= {1}, got |F|={2}, h={3}'.format(
            MAX_FEATURES, MAX_HEIGHT, data.n_features, height))
    topology = TreeTopology(height)
    n_branch = topology.first_leaf - 1
    budget = n_branch if budget is None else min(int(budget), n_branch)
    if budget < 0:
        raise ValueError('budget must be non-negative')

    x, y = data.features, data.labels
    n_classes = data.n_classes

    @lru_cache(maxsize=None)
    def best(v, rows, budget):
        """(correct, branch, classes) of the best subtree rooted at v over datapoints `rows`."""
        counts = np.bincount(y[list(rows)], minlength=n_classes) if rows else np.zeros(n_classes, dtype=int)
        k = int(np.argmax(counts))
        result = (int(counts[k]), (), ((v, k),))
        if budget == 0 or topology.is_leaf(v):
            return result
        for f in range(data.n_features):
            left = tuple(r for r in rows if x[r, f] == 0)
            right = tuple(r for r in rows if x[r, f] == 1)
            for left_budget in range(budget):
                lc, lb, lk = best(2 * v, left, left_budget)
                rc, rb, rk = best(2 * v + 1, right, budget - 1 - left_budget)
                if lc + rc > result[0]:
                    result = (lc + rc, ((v, f),) + lb + rb, lk + rk)
        return result

    correct, branch, classes = best(1, tuple(range(data.n_samples)), budget)
    tree = TrainedTree(height, dict(branch), dict(classes), data.feature_names, data.class_names)
    return correct, tree


def random_instance(rng, max_samples=10, max_features=4, max_classes=3):
    """Random BinaryDataset with 1..max_samples rows, 1..max_features features, 1..max_classes classes."""
    n = int(rng.integers(1, max_samples + 1))
    n_features = int(rng.integers(1, max_features + 1))
    n_classes = int(rng.integers(1, max_classes + 1))
    features = rng.integers(0, 2, size=(n, n_features))
    labels = rng.integers(0, n_classes, size=n)
    return BinaryDataset(features, labels, class_names=[str(k) for k in range(n_classes)],
                         name='random', require_all_classes=False)


def oracle_check(args):
    """Returns the result table and the number of disagreements."""
    rng = np.random.default_rng(args.seed)
    cfg = SolveConfig(time_limit=args.time_limit, backend=args.backend, verbose=args.verbose)
    rows = []
    failures = 0
    for instance in range(args.instances):
        data = random_instance(rng)
        height = int(rng.integers(1, MAX_HEIGHT + 1))
        budget = int(rng.integers(0, 2 ** height)) if args.budget else None
        expected, _ = enumerate_optimal(data, height, budget)
        for name in args.formulations:
            kind = FormulationKind.parse(name)
            result = train(data, height, kind.value, cfg, extra=ExtraConstraints(branching_budget=budget))
            report = result.report
            found = result.train_correct
            ok = (report.status == OPTIMAL and found == expected
                  and int(round(report.objective)) == expected)
            if result.tree is not None and budget is not None:
                ok = ok and result.tree.n_branch <= budget
            if not ok:
                failures += 1
                logger.error('instance %d (|I|=%d |F|=%d |K|=%d h=%d budget=%s) %s: %s objective %s, expected %d',
                             instance, data.n_samples, data.n_features, data.n_classes, height, budget,
                             kind, report.status, report.objective, expected)
            rows.append({'instance': instance, 'n_samples': data.n_samples, 'n_features': data.n_features,
                         'n_classes': data.n_classes, 'height': height, 'budget': budget,
                         'formulation': kind.value, 'status': report.status, 'objective': report.objective,
                         'tree_correct': found, 'oracle': expected, 'ok': int(ok)})
    table = pd.DataFrame(rows)
    if args.output:
        table.to_csv(args.output, index=False, lineterminator='\n')
    logger.info('%d instances, %d solves, %d disagreements', args.instances, len(rows), failures)
    return table, failures


if __name__ == '__main__':

    parser = create_parser()
    args = parser.parse_args()
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(levelname)s: %(message)s')
    try:
        _, failures = oracle_check(args)
    except MiloTreesError as e:
        sys.stderr.write('Error: {0}\n'.format(e))
        sys.exit(1)
    sys.exit(2 if failures else 0)
