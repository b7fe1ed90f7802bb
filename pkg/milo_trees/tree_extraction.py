# -*- coding: utf-8 -*-
"""Trained trees: decoding from solver assignments, encoding back, prediction.

A TrainedTree assigns every vertex of the complete tree of height h exactly one
role: branch (on a feature), classification (with a class) or pruned. On a
valid tree each root-to-leaf path holds branch vertices down to exactly one
classification vertex, and everything below it is pruned.
"""

from __future__ import division

import json
import collections

import numpy as np

from .tree_topology import TreeTopology
from .formulations import FormulationKind
from .errors import InvalidAssignmentError, CorruptTreeError, DimensionMismatchError

INTEGRALITY_TOLERANCE = 1e-6

Mismatch = collections.namedtuple('Mismatch', 'i expected found')


class TrainedTree(object):

    def __init__(self, height, branch_feature, class_label, feature_names=None, class_names=None):
        self.topology = TreeTopology(height)
        self.height = self.topology.height
        self.branch_feature = dict((int(v), int(f)) for v, f in branch_feature.items())
        self.class_label = dict((int(v), int(k)) for v, k in class_label.items())
        self.feature_names = list(feature_names) if feature_names is not None else None
        self.class_names = list(class_names) if class_names is not None else None
        self._check()

    def _check(self):
        t = self.topology
        both = set(self.branch_feature) & set(self.class_label)
        if both:
            raise CorruptTreeError('vertex {0} both branches and classifies'.format(min(both)))
        for v in list(self.branch_feature) + list(self.class_label):
            t._check(v)
        for v in self.branch_feature:
            if t.is_leaf(v):
                raise CorruptTreeError('leaf {0} cannot branch'.format(v))
        for v in t.vertices:
            covered = (v in self.branch_feature) + sum(u in self.class_label for u in t.path_vertices(v))
            if covered != 1:
                raise CorruptTreeError('vertex {0} has an inconsistent role'.format(v))
        if self.feature_names is not None:
            for v, f in self.branch_feature.items():
                if not 0 <= f < len(self.feature_names):
                    raise CorruptTreeError('vertex {0} branches on unknown feature {1}'.format(v, f))
        if self.class_names is not None:
            for v, k in self.class_label.items():
                if not 0 <= k < len(self.class_names):
                    raise CorruptTreeError('vertex {0} predicts unknown class {1}'.format(v, k))

    def __eq__(self, other):
        return (isinstance(other, TrainedTree) and self.height == other.height
                and self.branch_feature == other.branch_feature and self.class_label == other.class_label)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'TrainedTree(height={0}, branch={1}, classes={2})'.format(
            self.height, self.branch_feature, self.class_label)

    @property
    def pruned(self):
        return frozenset(v for v in self.topology.vertices
                         if v not in self.branch_feature and v not in self.class_label)

    @property
    def n_branch(self):
        return len(self.branch_feature)

    @property
    def n_features(self):
        return len(self.feature_names) if self.feature_names is not None else None

    def role(self, v):
        if v in self.branch_feature:
            return 'branch'
        if v in self.class_label:
            return 'leaf'
        return 'pruned'

    def terminal(self, x):
        """Classification vertex reached by feature vector x."""
        v = 1
        while True:
            if v in self.class_label:
                return v
            if v not in self.branch_feature:
                raise CorruptTreeError('walk reached pruned vertex {0}'.format(v))
            v = 2 * v + int(x[self.branch_feature[v]])

    def to_dict(self):
        vertices = []
        for v in self.topology.vertices:
            entry = {'id': v, 'role': self.role(v)}
            if v in self.branch_feature:
                f = self.branch_feature[v]
                entry.update(feature=f, children=[2 * v, 2 * v + 1])
                if self.feature_names is not None:
                    entry['feature_name'] = self.feature_names[f]
            elif v in self.class_label:
                k = self.class_label[v]
                entry['class'] = k
                if self.class_names is not None:
                    entry['class_name'] = self.class_names[k]
            vertices.append(entry)
        return {'height': self.height, 'features': self.feature_names, 'classes': self.class_names,
                'vertices': vertices}

    @classmethod
    def from_dict(cls, obj):
        try:
            branch = dict((e['id'], e['feature']) for e in obj['vertices'] if e['role'] == 'branch')
            classes = dict((e['id'], e['class']) for e in obj['vertices'] if e['role'] == 'leaf')
            return cls(obj['height'], branch, classes, obj.get('features'), obj.get('classes'))
        except (KeyError, TypeError) as e:
            raise CorruptTreeError('malformed tree description: missing {0}'.format(e))

    def save(self, fobj):
        json.dump(self.to_dict(), fobj, indent=2, sort_keys=True)
        fobj.write('\n')

    @classmethod
    def load(cls, fobj):
        try:
            return cls.from_dict(json.load(fobj))
        except ValueError as e:
            raise CorruptTreeError('tree file is not valid JSON: {0}'.format(e))

    def describe(self):
        """Indented text rendering, one vertex per line."""
        lines = []
        for v in self.topology.vertices:
            if v in self.pruned:
                continue
            indent = '  ' * self.topology.depth(v)
            if v in self.branch_feature:
                f = self.branch_feature[v]
                name = self.feature_names[f] if self.feature_names else 'f_{0}'.format(f)
                lines.append('{0}[{1}] {2} ? left=0 right=1'.format(indent, v, name))
            else:
                k = self.class_label[v]
                name = self.class_names[k] if self.class_names else str(k)
                lines.append('{0}[{1}] -> {2}'.format(indent, v, name))
        return '\n'.join(lines)


def _read_binary(values, ids, role, tol):
    present = ids >= 0
    off = present & (np.abs(values - np.round(values)) > tol)
    if off.any():
        where = np.argwhere(off)[0]
        raise InvalidAssignmentError('{0} takes fractional value {1:g}'.format(role, values[tuple(where)]),
                                     vertex=int(where[0]))
    return np.round(values).astype(np.int64)


def decode(values, model, tol=INTEGRALITY_TOLERANCE):
    """TrainedTree encoded by an integer assignment of `model`'s b, w and p variables."""
    idx = model.index
    t = model.topology
    b = _read_binary(idx.values(values, 'b'), idx.b, 'b', tol)
    w = _read_binary(idx.values(values, 'w'), idx.w, 'w', tol)
    p = _read_binary(idx.values(values, 'p'), idx.p, 'p', tol)

    branch_feature = {}
    class_label = {}
    for v in t.vertices:
        if p[v] != w[v].sum():
            raise InvalidAssignmentError('p and w disagree', vertex=v)
        if b[v].sum() + sum(p[u] for u in t.path_vertices(v)) != 1:
            raise InvalidAssignmentError('vertex is neither branched nor under one classification vertex',
                                         vertex=v)
        if b[v].sum() == 1:
            branch_feature[v] = int(np.argmax(b[v]))
        if p[v] == 1:
            class_label[v] = int(np.argmax(w[v]))
    return TrainedTree(t.height, branch_feature, class_label, model.data.feature_names, model.data.class_names)


def encode(tree, model):
    """Integer assignment of `model` that represents `tree`.

    Every datapoint selects the vertices on its walk; correctly classified
    datapoints send one unit of flow to their classification vertex.
    """
    idx = model.index
    data = model.data
    t = model.topology
    if tree.height != t.height:
        raise DimensionMismatchError('tree of height {0} for a model of height {1}'.format(tree.height, t.height))
    values = np.zeros(model.n_vars)
    for v, f in tree.branch_feature.items():
        values[idx.b[v, f]] = 1.0
    for v, k in tree.class_label.items():
        values[idx.w[v, k]] = 1.0
        values[idx.p[v]] = 1.0

    kind = model.kind
    for i in range(data.n_samples):
        term = tree.terminal(data.features[i])
        path = t.path_vertices(term)
        correct = tree.class_label[term] == data.labels[i]
        if idx.q is not None:
            values[idx.q[i, path]] = 1.0
            if kind == FormulationKind.MCF1:
                values[idx.q[i, 0]] = float(correct)
        if not correct:
            continue
        values[idx.s[i, term]] = 1.0
        if term == 1 or idx.z is None:
            continue
        if kind == FormulationKind.MCF2:
            values[idx.z[i, term, path[1:]]] = 1.0
        else:
            values[idx.z[i, path[1:]]] = 1.0
    return values


def predict(tree, x):
    if tree.n_features is not None and len(x) != tree.n_features:
        raise DimensionMismatchError('expected {0} features, got {1}'.format(tree.n_features, len(x)))
    return tree.class_label[tree.terminal(x)]


def predict_all(tree, features):
    return np.array([predict(tree, x) for x in features], dtype=np.int64)


def accuracy(tree, data):
    if tree.n_features is not None and tree.n_features != data.n_features:
        raise DimensionMismatchError('tree uses {0} features, dataset has {1}'.format(tree.n_features, data.n_features))
    if tree.branch_feature and max(tree.branch_feature.values()) >= data.n_features:
        raise DimensionMismatchError('tree branches on a feature the dataset lacks')
    return float(np.mean(predict_all(tree, data.features) == data.labels))


def correct_count(tree, data):
    return int(np.sum(predict_all(tree, data.features) == data.labels))


def validate_against_assignment(tree, values, model, tol=INTEGRALITY_TOLERANCE):
    """Datapoints whose s variables disagree with where the tree classifies them correctly."""
    s = model.index.values(values, 's')
    data = model.data
    mismatches = []
    for i in range(data.n_samples):
        term = tree.terminal(data.features[i])
        expected = [term] if tree.class_label[term] == data.labels[i] else []
        found = np.flatnonzero(s[i] > 1 - tol).tolist()
        if found != expected:
            mismatches.append(Mismatch(i, expected, found))
    return mismatches
