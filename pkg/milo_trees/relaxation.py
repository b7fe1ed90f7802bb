#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Compare the LP relaxations of the five formulations.

For every instance the LP optimum of each formulation is computed, and
  CUT2 = MCF2 = MCF1 = FlowOCT <= CUT1
is checked within a relative tolerance of 1e-6. At every LP optimum the
identities below must also hold within 1e-6:
  all models  p[v] = sum of w[v,k]
  FlowOCT     sum over v of s[i,v] <= 1
  MCF1        sum over v of s[i,v] = q[i,t]
  MCF2        commodity v carries no flow out of v
"""

from __future__ import division

import sys
import logging
import argparse

import numpy as np
import pandas as pd

from . import dataset
from .tree_topology import TreeTopology
from .formulations import FormulationKind, ALL_KINDS, build
from .milp_core import SolveConfig, OPTIMAL, solve
from .oracle import random_instance
from .errors import MiloTreesError

logger = logging.getLogger(__name__)

TOLERANCE = 1e-6

# formulations whose LP values coincide
EQUAL_CHAIN = (FormulationKind.CUT2, FormulationKind.MCF2, FormulationKind.MCF1, FormulationKind.FLOWOCT)


def create_parser(subparsers=None):

    if subparsers:
        parser = subparsers.add_parser('relax-check',
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description="compare LP relaxation values of the formulations")
    else:
        parser = argparse.ArgumentParser(
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description="compare LP relaxation values of the formulations")

    parser.add_argument(
        '--instances', '-n', type=int, default=50,
        help="Number of random tiny instances (default: %(default)s).")
    parser.add_argument(
        '--seed', type=int, default=0,
        help="Seed of the instance generator (default: %(default)s).")
    parser.add_argument(
        '--input', '-i', nargs='+', default=[], metavar='PATH',
        help="Additional CSV tables to check.")
    parser.add_argument(
        '--height', type=int, default=2, metavar='H',
        help="Tree height used for the CSV tables (default: %(default)s).")
    parser.add_argument(
        '--backend', default='highs', choices=['highs', 'scipy'],
        help="LP backend (default: %(default)s).")
    parser.add_argument(
        '--time-limit', type=float, default=600.0, metavar='SECONDS',
        help="Time limit per LP (default: %(default)s).")
    parser.add_argument(
        '--output', '-o', metavar='PATH',
        help="Write one CSV row per instance to PATH.")
    parser.add_argument(
        '--verbose', '-v', action="store_true",
        help="verbose mode.")

    return parser


def identity_residuals(model, values):
    """Largest violation of each LP identity of `model` at `values`."""
    idx = model.index
    s = idx.values(values, 's')
    p = idx.values(values, 'p')
    w = idx.values(values, 'w')
    residuals = {'p_equals_w': float(np.max(np.abs(p - w.sum(axis=1))))}
    if model.kind == FormulationKind.FLOWOCT:
        residuals['single_terminal'] = float(max(np.max(s.sum(axis=1)) - 1.0, 0.0))
    elif model.kind == FormulationKind.MCF1:
        q = idx.values(values, 'q')
        residuals['sink_balance'] = float(np.max(np.abs(s.sum(axis=1) - q[:, 0])))
    elif model.kind == FormulationKind.MCF2:
        z = idx.values(values, 'z')
        t = model.topology
        inner = [v for v in t.branch_set if v > 1]
        if inner:
            out = np.array([z[:, v, 2 * v] + z[:, v, 2 * v + 1] for v in inner])
            residuals['no_outflow_at_destination'] = float(np.max(np.abs(out)))
        else:
            residuals['no_outflow_at_destination'] = 0.0
    return residuals


def lp_value(kind, topology, data, cfg):
    """(SolveReport, values, model) of the LP relaxation with every cut in place."""
    model = build(kind, topology, data)
    report, values = solve(model, cfg.derive(relax=True))
    return report, values, model


def _close(a, b):
    return abs(a - b) <= TOLERANCE * max(1.0, abs(a), abs(b))


def check_instance(data, height, cfg):
    """LP values, chain checks and identity residuals of one instance as a row dict."""
    topology = TreeTopology(height)
    row = {'name': data.name, 'n_samples': data.n_samples, 'n_features': data.n_features,
           'n_classes': data.n_classes, 'height': height}
    problems = []
    lp = {}
    for kind in ALL_KINDS:
        report, values, model = lp_value(kind, topology, data, cfg)
        if report.status != OPTIMAL:
            problems.append('{0} LP ended {1}'.format(kind, report.status))
            continue
        lp[kind] = report.objective
        row['lp_' + kind.value] = report.objective
        for name, residual in identity_residuals(model, values).items():
            row['{0}_{1}'.format(kind.value, name)] = residual
            if residual > TOLERANCE:
                problems.append('{0}: {1} off by {2:g}'.format(kind, name, residual))

    chain = [k for k in EQUAL_CHAIN if k in lp]
    for a, b in zip(chain, chain[1:]):
        if not _close(lp[a], lp[b]):
            problems.append('LP values differ: {0}={1:.9g}, {2}={3:.9g}'.format(a, lp[a], b, lp[b]))
    if FormulationKind.CUT1 in lp and FormulationKind.CUT2 in lp:
        if lp[FormulationKind.CUT2] > lp[FormulationKind.CUT1] + TOLERANCE * max(1.0, abs(lp[FormulationKind.CUT1])):
            problems.append('CUT2 LP value exceeds CUT1')
    if FormulationKind.CUT1 in lp and FormulationKind.MCF1 in lp:
        row['cut1_excess'] = lp[FormulationKind.CUT1] - lp[FormulationKind.MCF1]
    row['problems'] = '; '.join(problems)
    return row, problems


def relax_check(args):
    """Returns the result table and the number of instances with problems."""
    cfg = SolveConfig(time_limit=args.time_limit, backend=args.backend, verbose=args.verbose)
    rng = np.random.default_rng(args.seed)
    instances = [(random_instance(rng), int(rng.integers(1, 3))) for _ in range(args.instances)]
    for path in args.input:
        instances.append((dataset.load_dataset(path), args.height))

    rows = []
    failures = 0
    for j, (data, height) in enumerate(instances):
        row, problems = check_instance(data, height, cfg)
        row['instance'] = j
        rows.append(row)
        if problems:
            failures += 1
            for problem in problems:
                logger.error('instance %d (%s, h=%d): %s', j, data.name, height, problem)
    table = pd.DataFrame(rows)
    if args.output:
        table.to_csv(args.output, index=False, lineterminator='\n')
    logger.info('%d instances, %d with problems', len(rows), failures)
    return table, failures


if __name__ == '__main__':

    parser = create_parser()
    args = parser.parse_args()
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(levelname)s: %(message)s')
    try:
        _, failures = relax_check(args)
    except MiloTreesError as e:
        sys.stderr.write('Error: {0}\n'.format(e))
        sys.exit(1)
    sys.exit(2 if failures else 0)
