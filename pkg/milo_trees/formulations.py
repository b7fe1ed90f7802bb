# -*- coding: utf-8 -*-
"""Mixed-integer models of an optimal classification tree.

All five formulations share a base model over variables
  b[v,f]  vertex v (branch vertices only) branches on feature f
  w[v,k]  vertex v predicts class k
  p[v]    vertex v is a classification vertex
  s[i,v]  datapoint i is correctly classified at vertex v
and differ in how they tie s to the routing of each datapoint:

  FlowOCT  one unit of flow per datapoint on the tree edges
  MCF1     edge flows plus vertex selection variables q[i,v] and a sink q[i,t]
  MCF2     one flow commodity per destination vertex
  CUT1     q[i,v] plus separator cuts s[i,v] <= q[i,c] for c on the path to v
  CUT2     as CUT1 with s summed over v and all its descendants

Constraint tags name the family and indices, e.g. ``cut1_i3_v9_c4``.
"""

import enum
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .milp_core import ModelInstance, LinearConstraint, CONTINUOUS
from .errors import ConfigError

logger = logging.getLogger(__name__)


class FormulationKind(enum.Enum):
    FLOWOCT = 'FlowOCT'
    MCF1 = 'MCF1'
    MCF2 = 'MCF2'
    CUT1 = 'CUT1'
    CUT2 = 'CUT2'

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        for kind in cls:
            if kind.value.lower() == str(name).lower():
                return kind
        raise ValueError('unknown formulation {0!r} (choose from {1})'.format(
            name, ', '.join(k.value for k in cls)))

    @property
    def is_cut(self):
        return self in (FormulationKind.CUT1, FormulationKind.CUT2)


ALL_KINDS = tuple(FormulationKind)


@dataclass
class ExtraConstraints:
    branching_budget: Optional[int] = None
    feature_cap: Optional[int] = None
    min_leaf_support: Optional[int] = None

    def __post_init__(self):
        for name in ('branching_budget', 'feature_cap', 'min_leaf_support'):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ConfigError('{0} must be non-negative, got {1}'.format(name, value))

    def is_empty(self):
        return self.branching_budget is None and self.feature_cap is None and self.min_leaf_support is None


class VariableIndex(object):
    """Variable ids by role; -1 marks index combinations without a variable.

    b: (n+1, |F|), rows of branch vertices only
    w: (n+1, |K|)
    p: (n+1,)
    s: (|I|, n+1)
    q: (|I|, n+1), column 0 holds the sink q[i,t] of MCF1
    z: (|I|, n+1) flow on edge (a(v), v) stored at column v (FlowOCT, MCF1)
       (|I|, n+1, n+1) flow of commodity d on edge (a(v), v) at [i, d, v] (MCF2)
    """

    def __init__(self, topology, data):
        n = topology.n_vertices
        self.b = np.full((n + 1, data.n_features), -1, dtype=np.int64)
        self.w = np.full((n + 1, data.n_classes), -1, dtype=np.int64)
        self.p = np.full(n + 1, -1, dtype=np.int64)
        self.s = np.full((data.n_samples, n + 1), -1, dtype=np.int64)
        self.q = None
        self.z = None

    def roles(self):
        return dict((name, ids) for name, ids in
                    (('b', self.b), ('w', self.w), ('p', self.p), ('s', self.s), ('q', self.q), ('z', self.z))
                    if ids is not None)

    def values(self, point, role):
        """Values of one role arranged like its id array, 0 where no variable exists."""
        ids = self.roles()[role]
        point = np.asarray(point, dtype=np.float64)
        out = np.zeros(ids.shape)
        present = ids >= 0
        out[present] = point[ids[present]]
        return out


class TreeModel(ModelInstance):
    """ModelInstance that remembers which tree and dataset it encodes."""

    def __init__(self, kind, topology, data, name=None):
        super(TreeModel, self).__init__(name or '{0}_h{1}'.format(kind, topology.height))
        self.kind = kind
        self.topology = topology
        self.data = data
        self.index = VariableIndex(topology, data)
        self.extra = ExtraConstraints()


def feature_partitions(data):
    """Per datapoint, the features equal to 0 and the features equal to 1."""
    zeros = [np.flatnonzero(row == 0) for row in data.features]
    ones = [np.flatnonzero(row == 1) for row in data.features]
    return zeros, ones


def build_base(topology, data, kind=None, name=None):
    """Variables b, w, p, s with the vertex-role and correct-classification constraints."""
    model = TreeModel(kind, topology, data, name)
    idx = model.index
    n = topology.n_vertices
    first_leaf = topology.first_leaf
    n_features, n_classes, n_samples = data.n_features, data.n_classes, data.n_samples

    ids = model.add_vars(['b_{0}_{1}'.format(v, f) for v in range(1, first_leaf) for f in range(n_features)])
    idx.b[1:first_leaf] = ids.reshape(first_leaf - 1, n_features)
    ids = model.add_vars(['w_{0}_{1}'.format(v, k) for v in range(1, n + 1) for k in range(n_classes)])
    idx.w[1:] = ids.reshape(n, n_classes)
    idx.p[1:] = model.add_vars(['p_{0}'.format(v) for v in range(1, n + 1)], CONTINUOUS, 0.0, 1.0)
    ids = model.add_vars(['s_{0}_{1}'.format(i, v) for i in range(n_samples) for v in range(1, n + 1)])
    idx.s[:, 1:] = ids.reshape(n_samples, n)

    for v in range(1, n + 1):
        model.add_constraint(np.concatenate([[idx.p[v]], idx.w[v]]),
                             np.concatenate([[1.0], -np.ones(n_classes)]),
                             '=', 0.0, 'class_choice_v{0}'.format(v))
    for v in range(1, n + 1):
        path = [idx.p[u] for u in topology.path_vertices(v)]
        branch = idx.b[v][idx.b[v] >= 0]
        terms = np.concatenate([branch, path]).astype(np.int64)
        model.add_constraint(terms, np.ones(len(terms)), '=', 1.0, 'one_role_v{0}'.format(v))
    for i in range(n_samples):
        y = data.labels[i]
        for v in range(1, n + 1):
            model.add_constraint([idx.s[i, v], idx.w[v, y]], [1.0, -1.0], '<=', 0.0,
                                 'correct_i{0}_v{1}'.format(i, v))

    model.set_objective(idx.s[:, 1:].ravel(), np.ones(n_samples * n))
    return model


def _add_branch_caps(model, target, family):
    """target[i, 2v] <= sum of b[v,f] over x_f=0, target[i, 2v+1] <= sum over x_f=1."""
    idx = model.index
    zeros, ones = feature_partitions(model.data)
    for i in range(model.data.n_samples):
        for v in model.topology.branch_set:
            for child, features, side in ((2 * v, zeros[i], 'left'), (2 * v + 1, ones[i], 'right')):
                terms = np.concatenate([[target[i, child]], idx.b[v, features]])
                coefs = np.concatenate([[1.0], -np.ones(len(features))])
                model.add_constraint(terms, coefs, '<=', 0.0, '{0}_{1}_i{2}_v{3}'.format(family, side, i, v))


def _add_edge_flows(model):
    idx = model.index
    n = model.topology.n_vertices
    n_samples = model.data.n_samples
    idx.z = np.full((n_samples, n + 1), -1, dtype=np.int64)
    ids = model.add_vars(['z_{0}_{1}_{2}'.format(i, v // 2, v) for i in range(n_samples) for v in range(2, n + 1)],
                         CONTINUOUS, 0.0, np.inf)
    idx.z[:, 2:] = ids.reshape(n_samples, n - 1)


def _add_conservation(model, family):
    """Flow into v equals flow to its children plus s[i,v], for every non-root v."""
    idx = model.index
    t = model.topology
    for i in range(model.data.n_samples):
        for v in range(2, t.n_vertices + 1):
            if t.is_leaf(v):
                terms, coefs = [idx.z[i, v], idx.s[i, v]], [1.0, -1.0]
            else:
                terms = [idx.z[i, v], idx.z[i, 2 * v], idx.z[i, 2 * v + 1], idx.s[i, v]]
                coefs = [1.0, -1.0, -1.0, -1.0]
            model.add_constraint(terms, coefs, '=', 0.0, '{0}_i{1}_v{2}'.format(family, i, v))


def _add_selection_vars(model, with_sink=False):
    idx = model.index
    n = model.topology.n_vertices
    n_samples = model.data.n_samples
    idx.q = np.full((n_samples, n + 1), -1, dtype=np.int64)
    ids = model.add_vars(['q_{0}_{1}'.format(i, v) for i in range(n_samples) for v in range(1, n + 1)])
    idx.q[:, 1:] = ids.reshape(n_samples, n)
    if with_sink:
        idx.q[:, 0] = model.add_vars(['q_{0}_t'.format(i) for i in range(n_samples)])


def _add_single_terminal(model, family):
    idx = model.index
    for i in range(model.data.n_samples):
        terms = idx.s[i, 1:]
        model.add_constraint(terms, np.ones(len(terms)), '<=', 1.0, '{0}_i{1}'.format(family, i))


def build_flowoct(topology, data):
    model = build_base(topology, data, FormulationKind.FLOWOCT)
    idx = model.index
    _add_edge_flows(model)
    for i in range(data.n_samples):
        model.add_constraint([idx.z[i, 2], idx.z[i, 3], idx.s[i, 1]], [1.0, 1.0, 1.0], '<=', 1.0,
                             'root_flow_i{0}'.format(i))
    _add_conservation(model, 'flow')
    _add_branch_caps(model, idx.z, 'branch')
    return model


def build_mcf1(topology, data):
    model = build_base(topology, data, FormulationKind.MCF1)
    idx = model.index
    _add_selection_vars(model, with_sink=True)
    _add_edge_flows(model)
    for i in range(data.n_samples):
        for v in range(2, topology.n_vertices + 1):
            model.add_constraint([idx.z[i, v], idx.q[i, v]], [1.0, -1.0], '<=', 0.0,
                                 'select_i{0}_v{1}'.format(i, v))
    _add_conservation(model, 'flow')
    for i in range(data.n_samples):
        model.add_constraint([idx.z[i, 2], idx.z[i, 3], idx.s[i, 1], idx.q[i, 0]], [1.0, 1.0, 1.0, -1.0],
                             '=', 0.0, 'sink_i{0}'.format(i))
    _add_branch_caps(model, idx.q, 'branch')
    return model


def build_mcf2(topology, data):
    model = build_base(topology, data, FormulationKind.MCF2)
    idx = model.index
    n = topology.n_vertices
    n_samples = data.n_samples
    _add_selection_vars(model)

    idx.z = np.full((n_samples, n + 1, n + 1), -1, dtype=np.int64)
    ids = model.add_vars(['z_{0}_{1}_{2}_{3}'.format(i, d, v // 2, v)
                          for i in range(n_samples) for d in range(2, n + 1) for v in range(2, n + 1)],
                         CONTINUOUS, 0.0, np.inf)
    idx.z[:, 2:, 2:] = ids.reshape(n_samples, n - 1, n - 1)

    for i in range(n_samples):
        z = idx.z[i]
        for d in range(2, n + 1):
            model.add_constraint([z[d, 2], z[d, 3], idx.s[i, d]], [1.0, 1.0, -1.0], '=', 0.0,
                                 'source_i{0}_d{1}'.format(i, d))
            for u in range(2, n + 1):
                if u == d:
                    continue
                if topology.is_leaf(u):
                    terms, coefs = [z[d, u]], [-1.0]
                else:
                    terms, coefs = [z[d, 2 * u], z[d, 2 * u + 1], z[d, u]], [1.0, 1.0, -1.0]
                model.add_constraint(terms, coefs, '=', 0.0, 'transit_i{0}_d{1}_u{2}'.format(i, d, u))
        for v in range(2, n + 1):
            terms = np.concatenate([z[2:, v], [idx.q[i, v]]])
            coefs = np.concatenate([np.ones(n - 1), [-1.0]])
            model.add_constraint(terms, coefs, '<=', 0.0, 'select_i{0}_v{1}'.format(i, v))
        for d in range(2, n + 1):
            model.add_constraint([z[d, d], idx.s[i, d]], [1.0, -1.0], '=', 0.0,
                                 'arrive_i{0}_d{1}'.format(i, d))
    _add_branch_caps(model, idx.q, 'branch')
    _add_single_terminal(model, 'terminal')
    return model


class CutConstraintPool(object):
    """Separator cuts of CUT1/CUT2, built on request.

    cut1: s[i,v] <= q[i,c]
    cut2: s[i,v] + sum of s[i,u] over descendants u of v <= q[i,c]
    for every non-root v and every c on the path from vertex 2 or 3 down to v.
    """

    def __init__(self, model):
        self.model = model
        self.kind = model.kind
        self.cut_kind = 'cut1' if model.kind == FormulationKind.CUT1 else 'cut2'
        self._subtrees = {}

    def _lhs_vars(self, v):
        if self.cut_kind == 'cut1':
            return [v]
        if v not in self._subtrees:
            self._subtrees[v] = [v] + self.model.topology.child_set(v)
        return self._subtrees[v]

    def tag(self, i, v, c):
        return '{0}_i{1}_v{2}_c{3}'.format(self.cut_kind, i, v, c)

    def constraint(self, i, v, c):
        idx = self.model.index
        lhs = idx.s[i, self._lhs_vars(v)]
        terms = np.concatenate([lhs, [idx.q[i, c]]])
        coefs = np.concatenate([np.ones(len(lhs)), [-1.0]])
        return LinearConstraint(terms, coefs, '<=', 0.0, self.tag(i, v, c))

    def keys(self):
        t = self.model.topology
        for i in range(self.model.data.n_samples):
            for v in range(2, t.n_vertices + 1):
                for c in t.non_root_path(v):
                    yield i, v, c

    def all_constraints(self):
        return [self.constraint(i, v, c) for i, v, c in self.keys()]

    def __len__(self):
        t = self.model.topology
        per_point = sum(t.depth(v) for v in range(2, t.n_vertices + 1))
        return per_point * self.model.data.n_samples


def _build_cut(kind, topology, data, strategy):
    model = build_base(topology, data, kind)
    _add_selection_vars(model)
    _add_branch_caps(model, model.index.q, 'branch')
    _add_single_terminal(model, 'terminal')
    pool = CutConstraintPool(model)
    if str(strategy).upper() == 'ALL':
        for con in pool.all_constraints():
            model.append(con)
    else:
        model.lazy_pool = pool
    return model


def build_cut1(topology, data, strategy='ALL'):
    return _build_cut(FormulationKind.CUT1, topology, data, strategy)


def build_cut2(topology, data, strategy='ALL'):
    return _build_cut(FormulationKind.CUT2, topology, data, strategy)


def apply_extra(model, extra):
    """Branching budget, per-feature usage cap and minimum support per classification vertex."""
    if extra is None or extra.is_empty():
        return model
    idx = model.index
    branch_ids = idx.b[idx.b >= 0]
    if extra.branching_budget is not None:
        model.add_constraint(branch_ids, np.ones(len(branch_ids)), '<=', extra.branching_budget, 'budget')
    if extra.feature_cap is not None:
        for f in range(model.data.n_features):
            column = idx.b[:, f][idx.b[:, f] >= 0]
            model.add_constraint(column, np.ones(len(column)), '<=', extra.feature_cap,
                                 'feature_cap_f{0}'.format(f))
    if extra.min_leaf_support is not None:
        n_samples = model.data.n_samples
        for v in model.topology.vertices:
            terms = np.concatenate([idx.s[:, v], [idx.p[v]]])
            coefs = np.concatenate([np.ones(n_samples), [-float(extra.min_leaf_support)]])
            model.add_constraint(terms, coefs, '>=', 0.0, 'min_support_v{0}'.format(v))
    model.extra = extra
    return model


BUILDERS = {
    FormulationKind.FLOWOCT: build_flowoct,
    FormulationKind.MCF1: build_mcf1,
    FormulationKind.MCF2: build_mcf2,
}


def build(kind, topology, data, strategy='ALL', extra=None):
    kind = FormulationKind.parse(kind)
    if kind == FormulationKind.CUT1:
        model = build_cut1(topology, data, strategy)
    elif kind == FormulationKind.CUT2:
        model = build_cut2(topology, data, strategy)
    else:
        model = BUILDERS[kind](topology, data)
    apply_extra(model, extra)
    logger.debug('built %s: %d variables, %d constraints', model.name, model.n_vars, model.n_constraints)
    return model
