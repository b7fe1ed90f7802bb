#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Classify the rows of a CSV table with a tree written by learn-tree.

Features are rebuilt from the tree's feature names, so the table needs the
original (unbinarized) columns. One predicted class is written per row; with
--label-column the accuracy is reported as well.
"""

from __future__ import division

import sys
import logging
import argparse

import numpy as np

from . import dataset
from .tree_extraction import TrainedTree, predict_all
from .errors import MiloTreesError

logger = logging.getLogger(__name__)


def create_parser(subparsers=None):

    if subparsers:
        parser = subparsers.add_parser('apply-tree',
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description="classify a CSV table with a learned tree")
    else:
        parser = argparse.ArgumentParser(
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description="classify a CSV table with a learned tree")

    parser.add_argument(
        '--tree', '-t', type=argparse.FileType('r'), required=True,
        metavar='PATH',
        help="Tree file written by learn-tree.")
    parser.add_argument(
        '--input', '-i', required=True, metavar='PATH',
        help="CSV table with a header row.")
    parser.add_argument(
        '--output', '-o', type=argparse.FileType('w'), default=sys.stdout,
        metavar='PATH',
        help="Output file for predicted classes, one per line (default: standard output).")
    parser.add_argument(
        '--label-column', '-l', metavar='NAME',
        help="Column holding true classes; enables the accuracy report.")
    parser.add_argument(
        '--verbose', '-v', action="store_true",
        help="verbose mode.")

    return parser


def apply_tree(args):
    tree = TrainedTree.load(args.tree)
    raw = dataset.load_csv(args.input, args.label_column)
    names = tree.feature_names
    if names is None:
        n_features = max(tree.branch_feature.values()) + 1 if tree.branch_feature else 0
        names = ['f_{0}'.format(f) for f in range(n_features)]
    # only the features the tree branches on have to be present
    used = sorted(set(tree.branch_feature.values()))
    features = np.zeros((len(raw), len(names)), dtype=np.int8)
    features[:, used] = dataset.features_from_names(raw, [names[f] for f in used])
    predictions = predict_all(tree, features)

    class_names = tree.class_names or [str(k) for k in range(max(tree.class_label.values()) + 1)]
    for k in predictions:
        args.output.write('{0}\n'.format(class_names[k]))

    accuracy = None
    if args.label_column:
        labels = dataset.labels_from_names(raw, class_names)
        accuracy = float(np.mean(predictions == labels))
        logger.info('accuracy %.4f (%d/%d)', accuracy, int(np.sum(predictions == labels)), len(labels))
    return predictions, accuracy


if __name__ == '__main__':

    parser = create_parser()
    args = parser.parse_args()
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(levelname)s: %(message)s')
    try:
        apply_tree(args)
    except MiloTreesError as e:
        sys.stderr.write('Error: {0}\n'.format(e))
        sys.exit(1)
