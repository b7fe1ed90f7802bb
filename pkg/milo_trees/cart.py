# -*- coding: utf-8 -*-
"""Greedy Gini trees on binary features, used as baselines.

CART grows depth-first: a vertex becomes a classification vertex when it is
pure, at depth h, or no feature sends datapoints both ways; otherwise it
branches on the feature with the lowest weighted Gini impurity of the two
sides (lowest feature index on ties).

CART_str (restricted=True) grows best-first over all open vertices: each step
splits the open vertex with the largest impurity reduction, on one feature,
until 2^h classification vertices exist or no split remains. Features may
repeat across vertices.
"""

from __future__ import division

import logging
from dataclasses import dataclass

import numpy as np

from .tree_extraction import TrainedTree

logger = logging.getLogger(__name__)


@dataclass
class CartConfig:
    max_depth: int
    restricted: bool = False
    # ties are resolved by index; the seed only labels the run
    seed: int = 0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError('max_depth must be at least 1, got {0}'.format(self.max_depth))

    @property
    def name(self):
        return 'CART_str' if self.restricted else 'CART'

    @property
    def label(self):
        return '{0}_h{1}_s{2}'.format(self.name, self.max_depth, self.seed)


def gini(labels, n_classes):
    if not len(labels):
        return 0.0
    p = np.bincount(labels, minlength=n_classes) / len(labels)
    return float(1.0 - np.dot(p, p))


def majority(labels, n_classes):
    return int(np.argmax(np.bincount(labels, minlength=n_classes)))


def split_scores(features, labels, n_classes):
    """Weighted Gini impurity of splitting on each feature; inf where one side is empty."""
    n = len(labels)
    scores = np.full(features.shape[1], np.inf)
    for f in range(features.shape[1]):
        right = features[:, f] == 1
        n_right = int(right.sum())
        if n_right == 0 or n_right == n:
            continue
        scores[f] = (n_right * gini(labels[right], n_classes)
                     + (n - n_right) * gini(labels[~right], n_classes)) / n
    return scores


def _fit_unrestricted(data, cfg):
    branch, classes = {}, {}
    stack = [(1, np.arange(data.n_samples))]
    while stack:
        v, rows = stack.pop()
        x, y = data.features[rows], data.labels[rows]
        depth = v.bit_length() - 1
        if depth < cfg.max_depth and gini(y, data.n_classes) > 0:
            scores = split_scores(x, y, data.n_classes)
            f = int(np.argmin(scores))
            if np.isfinite(scores[f]):
                branch[v] = f
                stack.append((2 * v + 1, rows[x[:, f] == 1]))
                stack.append((2 * v, rows[x[:, f] == 0]))
                continue
        classes[v] = majority(y, data.n_classes)
    return branch, classes


def _fit_restricted(data, cfg):
    branch = {}
    open_vertices = {1: np.arange(data.n_samples)}
    max_leaves = 2 ** cfg.max_depth
    while len(open_vertices) < max_leaves:
        best = None
        for v in sorted(open_vertices):
            rows = open_vertices[v]
            y = data.labels[rows]
            parent = gini(y, data.n_classes)
            if v.bit_length() - 1 >= cfg.max_depth or parent == 0:
                continue
            scores = split_scores(data.features[rows], y, data.n_classes)
            f = int(np.argmin(scores))
            if not np.isfinite(scores[f]):
                continue
            gain = len(rows) * (parent - scores[f])
            if best is None or gain > best[0] + 1e-12:
                best = (gain, v, f)
        if best is None:
            break
        _, v, f = best
        rows = open_vertices.pop(v)
        right = data.features[rows, f] == 1
        branch[v] = f
        open_vertices[2 * v] = rows[~right]
        open_vertices[2 * v + 1] = rows[right]
    classes = dict((v, majority(data.labels[rows], data.n_classes)) for v, rows in open_vertices.items())
    return branch, classes


def fit_cart(data, cfg):
    if data.n_samples < 1:
        raise ValueError('cannot fit a tree on an empty dataset')
    if cfg.restricted:
        branch, classes = _fit_restricted(data, cfg)
    else:
        branch, classes = _fit_unrestricted(data, cfg)
    tree = TrainedTree(cfg.max_depth, branch, classes, data.feature_names, data.class_names)
    logger.debug('%s: %d branch vertices', cfg.label, tree.n_branch)
    return tree
