#!/usr/bin/env python
# -*- coding: utf-8 -*-

import sys
import logging
import argparse

from .dataset import prepare_data
from .learn_tree import learn_tree
from .apply_tree import apply_tree
from .experiments import bench, cuts
from .pareto import pareto, check_frontier
from .oracle import oracle_check
from .relaxation import relax_check
from .errors import MiloTreesError

from .dataset import create_parser as create_prepare_data_parser
from .learn_tree import create_parser as create_learn_tree_parser
from .apply_tree import create_parser as create_apply_tree_parser
from .experiments import create_parser as create_experiments_parser
from .pareto import create_parser as create_pareto_parser
from .oracle import create_parser as create_oracle_check_parser
from .relaxation import create_parser as create_relax_check_parser

# exit status when a run finishes but one of its checks fails
CHECK_FAILED = 2


def main(argv=None):
    parser = argparse.ArgumentParser(
        formatter_class=argparse.RawTextHelpFormatter,
        description="milo-trees: optimal binary classification trees by mixed-integer programming")
    subparsers = parser.add_subparsers(dest='command',
                                       help="""command to run. Run one of the commands with '-h' for more info.

prepare-data: binarize a CSV table into the canonical 0/1 CSV.
learn-tree: train one tree with a formulation or a CART baseline.
apply-tree: classify a CSV table with a learned tree.
bench: train all configured methods on all datasets and heights.
cuts: compare the cut strategies of CUT1 and CUT2.
pareto: sweep the branching budget and mark Pareto-dominant trees.
oracle-check: compare optima with exhaustive search on tiny instances.
relax-check: compare LP relaxation values of the formulations.""")

    create_prepare_data_parser(subparsers)
    create_learn_tree_parser(subparsers)
    create_apply_tree_parser(subparsers)
    create_experiments_parser(subparsers, 'bench')
    create_experiments_parser(subparsers, 'cuts')
    create_pareto_parser(subparsers)
    create_oracle_check_parser(subparsers)
    create_relax_check_parser(subparsers)

    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 1
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    failures = 0
    try:
        if args.command == 'prepare-data':
            prepare_data(args)
        elif args.command == 'learn-tree':
            learn_tree(args)
        elif args.command == 'apply-tree':
            apply_tree(args)
        elif args.command == 'bench':
            failures = bench(args)
        elif args.command == 'cuts':
            failures = cuts(args)
        elif args.command == 'pareto':
            failures = len(check_frontier(pareto(args)))
        elif args.command == 'oracle-check':
            _, failures = oracle_check(args)
        elif args.command == 'relax-check':
            _, failures = relax_check(args)
        else:
            raise Exception('Invalid command provided')
    except MiloTreesError as e:
        sys.stderr.write('Error: {0}\n'.format(e))
        return 1
    return CHECK_FAILED if failures else 0


if __name__ == '__main__':
    sys.exit(main())
