# -*- coding: utf-8 -*-
"""Separation of the path cuts of CUT1 and CUT2.

For datapoint i, non-root vertex v and separator c on the path from the root's
child down to v, the cut reads lhs(i, v) <= q[i, c] with
  cut1: lhs(i, v) = s[i, v]
  cut2: lhs(i, v) = s[i, v] + sum of s[i, u] over the descendants u of v

Strategies:
  ALL    every cut is part of the model from the start
  LAZY   cuts are added when an integer candidate violates them
  FRAC1  as LAZY, plus at the root LP every violated separator per (i, v)
  FRAC2  as LAZY, plus at the root LP the separator closest to the root
  FRAC3  as LAZY, plus at the root LP the most violated separator
"""

from __future__ import division

import enum
import logging
import collections

import numpy as np
import pandas as pd

from .milp_core import solve, solve_with_separation
from .formulations import FormulationKind
from .tree_extraction import decode, encode
from .errors import InvalidAssignmentError, CorruptTreeError

logger = logging.getLogger(__name__)

DEFAULT_FRAC_EPSILON = 1e-4


class CutStrategy(enum.Enum):
    ALL = 'ALL'
    LAZY = 'LAZY'
    FRAC1 = 'FRAC1'
    FRAC2 = 'FRAC2'
    FRAC3 = 'FRAC3'

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise ValueError('unknown cut strategy {0!r} (choose from {1})'.format(
                name, ', '.join(s.value for s in cls)))

    @property
    def is_fractional(self):
        return self in (CutStrategy.FRAC1, CutStrategy.FRAC2, CutStrategy.FRAC3)


class ViolatedCut(collections.namedtuple('ViolatedCut', 'i v c lhs_value rhs_value kind')):
    __slots__ = ()

    @property
    def violation(self):
        return self.lhs_value - self.rhs_value

    @property
    def key(self):
        return self.i, self.v, self.c, self.kind


def cut_kind(model):
    if model.kind == FormulationKind.CUT1:
        return 'cut1'
    if model.kind == FormulationKind.CUT2:
        return 'cut2'
    raise ValueError('{0} has no separable cuts'.format(model.kind))


def cut_lhs(point, model):
    """lhs(i, v) for every datapoint and vertex, shape (|I|, n+1)."""
    s = model.index.values(point, 's')
    if cut_kind(model) == 'cut1':
        return s
    lhs = s.copy()
    t = model.topology
    for v in range(t.first_leaf - 1, 0, -1):
        lhs[:, v] += lhs[:, 2 * v] + lhs[:, 2 * v + 1]
    return lhs


def _violations(point, model, candidates):
    """Violation of every separator of each candidate (i, v), arranged by depth.

    Column k - 1 holds the separator at depth k; columns beyond depth(v) are -inf.
    """
    lhs = cut_lhs(point, model)
    q = model.index.values(point, 'q')
    rows, verts = candidates[:, 0], candidates[:, 1]
    depth = np.frexp(verts)[1].astype(np.int64) - 1
    height = model.topology.height
    separators = np.zeros((len(rows), height), dtype=np.int64)
    viol = np.full((len(rows), height), -np.inf)
    for k in range(1, height + 1):
        ok = depth >= k
        anc = verts[ok] >> (depth[ok] - k)
        separators[ok, k - 1] = anc
        viol[ok, k - 1] = lhs[rows[ok], verts[ok]] - q[rows[ok], anc]
    return lhs, q, separators, viol


def _collect(model, point, candidates, pick, eps):
    kind = cut_kind(model)
    if not len(candidates):
        return []
    lhs, q, separators, viol = _violations(point, model, candidates)
    cuts = []
    for j, k in pick(viol > eps, viol):
        i, v = int(candidates[j, 0]), int(candidates[j, 1])
        c = int(separators[j, k])
        cuts.append(ViolatedCut(i, v, c, float(lhs[i, v]), float(q[i, c]), kind))
    cuts.sort(key=lambda cut: (cut.i, cut.v, cut.c))
    return cuts


def _pick_all(violated, viol):
    return np.argwhere(violated)


def _pick_first(violated, viol):
    rows = np.flatnonzero(violated.any(axis=1))
    return zip(rows, np.argmax(violated[rows], axis=1))


def _pick_max(violated, viol):
    rows = np.flatnonzero(violated.any(axis=1))
    # argmax returns the first maximum, which is the separator closest to the root
    return zip(rows, np.argmax(viol[rows], axis=1))


PICKERS = {
    CutStrategy.FRAC1: _pick_all,
    CutStrategy.FRAC2: _pick_first,
    CutStrategy.FRAC3: _pick_max,
}


def _candidates(point, model, threshold):
    lhs = cut_lhs(point, model)
    candidates = np.argwhere(lhs[:, 2:] > threshold)
    candidates[:, 1] += 2
    return candidates


def separate_integral(point, model, eps=DEFAULT_FRAC_EPSILON):
    """Every cut violated at an integer point, found from the datapoints' terminals."""
    return _collect(model, point, _candidates(point, model, 0.5), _pick_all, eps)


def separate_fractional(point, model, variant, eps=DEFAULT_FRAC_EPSILON):
    """Violated cuts at a fractional point under one of the FRAC selection rules."""
    variant = CutStrategy.parse(variant)
    if not variant.is_fractional:
        raise ValueError('{0} is not a fractional separation variant'.format(variant))
    return _collect(model, point, _candidates(point, model, 0.0), PICKERS[variant], eps)


class Separator(object):
    """Callable handed to milp_core.solve_with_separation.

    Keeps the set of cuts already added so that no cut enters the model twice,
    and a log of every added cut.
    """

    def __init__(self, model, strategy, frac_epsilon=DEFAULT_FRAC_EPSILON):
        if model.lazy_pool is None:
            raise ValueError('{0} was built with every cut in place; nothing to separate'.format(model.name))
        if frac_epsilon <= 0:
            raise ValueError('frac_epsilon must be positive')
        self.model = model
        self.pool = model.lazy_pool
        self.strategy = CutStrategy.parse(strategy)
        self.frac_epsilon = frac_epsilon
        self.seen = set()
        self.iteration = 0
        self.log = []

    def __call__(self, values, phase):
        if phase == 'check':
            cuts = separate_integral(values, self.model, self.frac_epsilon)
            return [self.pool.constraint(cut.i, cut.v, cut.c) for cut in cuts]
        if phase == 'frac':
            variant = self.strategy if self.strategy.is_fractional else CutStrategy.FRAC1
            cuts = separate_fractional(values, self.model, variant, self.frac_epsilon)
        else:
            cuts = separate_integral(values, self.model, self.frac_epsilon)

        self.iteration += 1
        new = [cut for cut in cuts if cut.key not in self.seen]
        for cut in new:
            self.seen.add(cut.key)
            self.log.append((self.iteration, cut.i, cut.v, cut.c, cut.violation, phase))
        logger.debug('separation %d (%s): %d violated, %d new', self.iteration, phase, len(cuts), len(new))
        return [self.pool.constraint(cut.i, cut.v, cut.c) for cut in new]

    def log_frame(self):
        return pd.DataFrame(self.log, columns=['iter', 'i', 'v', 'c', 'violation', 'phase'])

    def write_log(self, fobj):
        self.log_frame().to_csv(fobj, index=False, lineterminator='\n')


def _repair(model):
    def repair(values):
        try:
            return encode(decode(values, model), model)
        except (InvalidAssignmentError, CorruptTreeError) as e:
            logger.debug('cannot repair candidate: %s', e)
            return None
    return repair


def run_strategy(model, strategy, cfg, frac_epsilon=DEFAULT_FRAC_EPSILON, cut_log=None):
    """Solve a CUT1/CUT2 model under a cut strategy; returns (SolveReport, values).

    cut_log, if given, is a path the added cuts are written to as CSV.
    """
    strategy = CutStrategy.parse(strategy)
    cut_kind(model)
    if strategy is CutStrategy.ALL:
        if model.lazy_pool is not None:
            raise ValueError('{0} was built for lazy separation, not ALL'.format(model.name))
        return solve(model, cfg)

    separator = Separator(model, strategy, frac_epsilon)
    report, values = solve_with_separation(model, cfg, separator, fractional=strategy.is_fractional,
                                           repair=_repair(model))
    logger.info('%s with %s: %s, objective %g, %d cuts in %d rounds', model.name, strategy, report.status,
                report.objective, report.cuts_added, report.rounds)
    if cut_log is not None:
        with open(cut_log, 'w') as fobj:
            separator.write_log(fobj)
    return report, values
