# -*- coding: utf-8 -*-
"""Solver-independent model store and the solve / solve-separate-resolve drivers.

A ModelInstance owns variables (column bounds and kinds), linear constraints
and a maximisation objective. Backends (see backends.py) only ever see the
numbers; names and tags stay here for diagnostics and LP export.
"""

from __future__ import division

import time
import math
import logging
import collections
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import backends
from .backends import stack_constraints
from .errors import SeparationContractError

logger = logging.getLogger(__name__)

BINARY = 'binary'
CONTINUOUS = 'continuous'

OPTIMAL = 'optimal'
FEASIBLE_LIMIT = 'feasible-limit'
INFEASIBLE = 'infeasible'
ERROR = 'error'

SENSES = ('<=', '=', '>=')

VarRef = collections.namedtuple('VarRef', 'id kind lo hi name')


class LinearConstraint(object):
    """sum(coefs * x[vars]) <sense> rhs, coefficients merged per variable."""

    __slots__ = ('vars', 'coefs', 'sense', 'rhs', 'tag')

    def __init__(self, variables, coefs, sense, rhs, tag):
        if sense not in SENSES:
            raise ValueError('unknown constraint sense {0!r}'.format(sense))
        variables = np.asarray(variables, dtype=np.int64)
        coefs = np.asarray(coefs, dtype=np.float64)
        if len(variables) != len(np.unique(variables)):
            merged = collections.OrderedDict()
            for var, coef in zip(variables.tolist(), coefs.tolist()):
                merged[var] = merged.get(var, 0.0) + coef
            variables = np.fromiter(merged.keys(), dtype=np.int64, count=len(merged))
            coefs = np.fromiter(merged.values(), dtype=np.float64, count=len(merged))
        keep = coefs != 0
        self.vars = variables[keep]
        self.coefs = coefs[keep]
        self.sense = sense
        self.rhs = float(rhs)
        self.tag = tag

    @property
    def terms(self):
        return list(zip(self.coefs.tolist(), self.vars.tolist()))

    def lhs(self, values):
        return float(np.dot(self.coefs, np.asarray(values)[self.vars]))

    def violation(self, values):
        """Amount by which `values` violates the constraint (<= 0 when satisfied)."""
        lhs = self.lhs(values)
        if self.sense == '<=':
            return lhs - self.rhs
        if self.sense == '>=':
            return self.rhs - lhs
        return abs(lhs - self.rhs)

    def bounds(self):
        if self.sense == '<=':
            return -np.inf, self.rhs
        if self.sense == '>=':
            return self.rhs, np.inf
        return self.rhs, self.rhs

    def __repr__(self):
        return 'LinearConstraint({0}: {1} terms {2} {3})'.format(self.tag, len(self.vars), self.sense, self.rhs)


class ModelInstance(object):

    def __init__(self, name='model'):
        self.name = name
        self._lo = []
        self._hi = []
        self._binary = []
        self._names = []
        self.constraints = []
        self.objective_vars = np.zeros(0, dtype=np.int64)
        self.objective_coefs = np.zeros(0)
        self.sense = 'max'
        self.lazy_pool = None
        self._matrix = None

    def __repr__(self):
        return 'ModelInstance({0!r}, vars={1}, constraints={2})'.format(self.name, self.n_vars, self.n_constraints)

    @property
    def n_vars(self):
        return len(self._lo)

    @property
    def n_constraints(self):
        return len(self.constraints)

    @property
    def lower(self):
        return np.array(self._lo, dtype=np.float64)

    @property
    def upper(self):
        return np.array(self._hi, dtype=np.float64)

    @property
    def binary_mask(self):
        return np.array(self._binary, dtype=bool)

    def var(self, var_id):
        kind = BINARY if self._binary[var_id] else CONTINUOUS
        return VarRef(var_id, kind, self._lo[var_id], self._hi[var_id], self._names[var_id])

    def count_by_kind(self):
        n_binary = sum(self._binary)
        return {BINARY: n_binary, CONTINUOUS: self.n_vars - n_binary}

    def add_var(self, name, kind=BINARY, lo=0.0, hi=1.0):
        return self.var(int(self.add_vars([name], kind, lo, hi)[0]))

    def add_vars(self, names, kind=BINARY, lo=0.0, hi=1.0):
        """Register one variable per name; returns their ids as an int array."""
        if kind == BINARY and (lo < 0 or hi > 1):
            raise ValueError('binary variables must have bounds inside [0, 1]')
        if kind not in (BINARY, CONTINUOUS):
            raise ValueError('unknown variable kind {0!r}'.format(kind))
        first = self.n_vars
        for name in names:
            self._names.append(name)
            self._lo.append(float(lo))
            self._hi.append(float(hi))
            self._binary.append(kind == BINARY)
        return np.arange(first, self.n_vars, dtype=np.int64)

    def add_constraint(self, variables, coefs, sense, rhs, tag):
        con = LinearConstraint(variables, coefs, sense, rhs, tag)
        self.append(con)
        return con

    def append(self, con):
        if len(con.vars) and con.vars.max() >= self.n_vars:
            raise ValueError('constraint {0} references an unknown variable'.format(con.tag))
        self.constraints.append(con)
        self._matrix = None

    def set_objective(self, variables, coefs):
        variables = np.asarray(variables, dtype=np.int64)
        if len(variables) and (variables.min() < 0 or variables.max() >= self.n_vars):
            raise ValueError('objective references an unknown variable')
        merged = LinearConstraint(variables, coefs, '<=', 0.0, 'objective')
        self.objective_vars = merged.vars
        self.objective_coefs = merged.coefs

    def objective_value(self, values):
        return float(np.dot(self.objective_coefs, np.asarray(values)[self.objective_vars]))

    def matrix(self):
        if self._matrix is None:
            self._matrix = stack_constraints(self.constraints, self.n_vars)
        return self._matrix

    def violations(self, values, tol=1e-6, integral=True):
        """Tags of every bound, integrality requirement and constraint `values` breaks."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (self.n_vars,):
            return ['shape: expected {0} values, got {1}'.format(self.n_vars, values.shape[0])]
        found = []
        lo, hi = self.lower, self.upper
        for j in np.flatnonzero((values < lo - tol) | (values > hi + tol)):
            found.append('bound:{0}'.format(self._names[j]))
        if integral:
            binary = self.binary_mask
            off = binary & (np.abs(values - np.round(values)) > tol)
            for j in np.flatnonzero(off):
                found.append('integrality:{0}'.format(self._names[j]))
        if self.constraints:
            matrix, row_lo, row_hi = self.matrix()
            activity = matrix.dot(values)
            for r in np.flatnonzero((activity < row_lo - tol) | (activity > row_hi + tol)):
                found.append(self.constraints[r].tag)
        return found

    def write_lp(self, fobj):
        """Dump the model in LP format: variables by id, constraints in insertion order."""
        fobj.write('\\ {0}\n'.format(self.name))
        fobj.write('Maximize\n')
        fobj.write(' obj:{0}\n'.format(_lp_terms(self.objective_coefs, self.objective_vars, self._names)))
        fobj.write('Subject To\n')
        for con in self.constraints:
            sense = '=' if con.sense == '=' else con.sense
            fobj.write(' {0}:{1} {2} {3!r}\n'.format(
                con.tag, _lp_terms(con.coefs, con.vars, self._names), sense, con.rhs))
        fobj.write('Bounds\n')
        for j in range(self.n_vars):
            if self._binary[j] and self._lo[j] == 0 and self._hi[j] == 1:
                continue
            hi = '+inf' if math.isinf(self._hi[j]) else repr(self._hi[j])
            fobj.write(' {0!r} <= {1} <= {2}\n'.format(self._lo[j], self._names[j], hi))
        binaries = [self._names[j] for j in range(self.n_vars) if self._binary[j]]
        if binaries:
            fobj.write('Binaries\n')
            for start in range(0, len(binaries), 8):
                fobj.write(' {0}\n'.format(' '.join(binaries[start:start + 8])))
        fobj.write('End\n')


def _lp_terms(coefs, variables, names):
    if not len(variables):
        return ' 0'
    parts = []
    for k, (coef, var) in enumerate(zip(coefs.tolist(), variables.tolist())):
        sign = '-' if coef < 0 else '+'
        parts.append(' {0} {1!r} {2}'.format(sign, abs(coef), names[var]))
        if k % 8 == 7 and k + 1 < len(variables):
            parts.append('\n  ')
    return ''.join(parts)


@dataclass
class SolveConfig:
    time_limit: float = 3600.0
    gap_tolerance: float = 1e-4
    feasibility_tolerance: float = 1e-6
    warm_start: Optional[np.ndarray] = None
    relax: bool = False
    backend: str = 'highs'
    threads: int = 1
    seed: int = 0
    verbose: bool = False
    frac_max_rounds: int = 50
    frac_all_rounds: bool = False

    def derive(self, **changes):
        return replace(self, **changes)


@dataclass
class SolveReport:
    status: str
    objective: float = float('nan')
    best_bound: float = float('nan')
    gap: float = float('nan')
    wall_seconds: float = 0.0
    cuts_added: int = 0
    nodes: int = 0
    warm_start_accepted: Optional[bool] = None
    message: str = ''
    rounds: int = 1

    @property
    def has_solution(self):
        return self.status in (OPTIMAL, FEASIBLE_LIMIT)

    def as_row(self):
        return {
            'status': self.status,
            'objective': self.objective,
            'best_bound': self.best_bound,
            'gap': self.gap,
            'seconds': round(self.wall_seconds, 3),
            'cuts_added': self.cuts_added,
            'nodes': self.nodes,
        }


def compute_gap(objective, bound):
    if objective is None or bound is None or math.isnan(objective) or math.isnan(bound):
        return float('nan')
    return (bound - objective) / max(abs(objective), 1e-10)


def _snap_integers(model, values, tol):
    values = np.array(values, dtype=np.float64)
    binary = model.binary_mask
    rounded = np.round(values)
    close = binary & (np.abs(values - rounded) <= tol)
    values[close] = rounded[close]
    return values


def _open_backend(model, cfg, relax):
    backend = backends.get_backend(cfg.backend, threads=cfg.threads, seed=cfg.seed, verbose=cfg.verbose)
    backend.load(model, relax=relax)
    return backend


def _check_warm_start(model, cfg, extra_check=None):
    if cfg.warm_start is None:
        return None, None
    warm = np.asarray(cfg.warm_start, dtype=np.float64)
    problems = model.violations(warm, cfg.feasibility_tolerance, integral=not cfg.relax)
    if not problems and extra_check is not None:
        problems = extra_check(warm)
    if problems:
        logger.warning('rejecting infeasible warm start for %s: %d violations, first %s',
                       model.name, len(problems), problems[0])
        return False, None
    return True, warm


def _finish(model, cfg, status, values, objective, bound, start, **extra):
    if values is None:
        if status != INFEASIBLE:
            status = ERROR
        return SolveReport(status, wall_seconds=time.time() - start, **extra), None
    if not math.isnan(bound) and bound - objective <= cfg.feasibility_tolerance:
        bound = objective
    if math.isnan(bound):
        bound = float('inf')
    gap = compute_gap(objective, bound)
    if status == OPTIMAL and gap > cfg.gap_tolerance:
        status = FEASIBLE_LIMIT
    report = SolveReport(status, objective, bound, gap, time.time() - start, **extra)
    return report, values


def _from_backend(model, cfg, result):
    """Solver status, snapped values, objective and bound of one backend run."""
    if result.values is None:
        status = INFEASIBLE if result.status == 'infeasible' else ERROR
        return status, None, float('nan'), float('nan')
    values = result.values if cfg.relax else _snap_integers(model, result.values, cfg.feasibility_tolerance)
    objective = model.objective_value(values)
    bound = result.bound if result.bound is not None else float('nan')
    if cfg.relax and result.status == 'optimal':
        bound = objective
    status = OPTIMAL if result.status == 'optimal' else FEASIBLE_LIMIT
    return status, values, objective, bound


def solve(model, cfg=None):
    """Solve `model` once; returns (SolveReport, values or None)."""
    cfg = cfg or SolveConfig()
    start = time.time()
    accepted, warm = _check_warm_start(model, cfg)
    backend = backends.get_backend(cfg.backend, threads=cfg.threads, seed=cfg.seed, verbose=cfg.verbose)
    try:
        backend.load(model, relax=cfg.relax)
        if warm is not None:
            backend.set_warm_start(warm)
        result = backend.optimize(cfg.time_limit, cfg.gap_tolerance, cfg.feasibility_tolerance)
    except Exception as e:
        logger.error('%s backend failed on %s: %s', cfg.backend, model.name, e)
        result = backends.BackendResult('error', message=str(e))

    status, values, objective, bound = _from_backend(model, cfg, result)
    if warm is not None:
        warm_objective = model.objective_value(warm)
        if values is None or objective < warm_objective - cfg.feasibility_tolerance:
            logger.debug('keeping warm start as incumbent (objective %g)', warm_objective)
            if values is None:
                status, bound = FEASIBLE_LIMIT, float('nan')
            values, objective = warm, warm_objective
            bound = max(bound, objective) if not math.isnan(bound) else bound
    if status == ERROR and values is None:
        logger.warning('solve of %s ended without a solution: %s', model.name, result.message or result.status)
    return _finish(model, cfg, status, values, objective, bound, start,
                   nodes=result.nodes, warm_start_accepted=accepted, message=result.message)


def _check_contract(cuts, values, tol):
    for con in cuts:
        if con.violation(values) <= tol:
            raise SeparationContractError(con.tag)


def _fractional_rounds(model, cfg, sep, deadline):
    """Cut off LP relaxation optima until sep has nothing left; returns the new constraints."""
    lp = _open_backend(model, cfg, relax=True)
    added = []
    for round_ in range(cfg.frac_max_rounds):
        remaining = deadline - time.time()
        if remaining <= 0:
            break
        result = lp.optimize(remaining, cfg.gap_tolerance, cfg.feasibility_tolerance)
        if result.values is None:
            break
        cuts = sep(result.values, 'frac')
        if not cuts:
            break
        _check_contract(cuts, result.values, cfg.feasibility_tolerance)
        for con in cuts:
            model.append(con)
        lp.add_constraints(cuts)
        added.extend(cuts)
        logger.debug('fractional round %d: %d cuts (LP bound %g)', round_ + 1, len(cuts), result.objective)
    return added


def solve_with_separation(model, cfg, sep, fractional=False, repair=None):
    """Outer solve-separate-resolve loop.

    `sep(values, phase)` returns violated LinearConstraints for phase 'frac'
    (LP optimum of the relaxation) or 'integral' (integer candidate).
    `repair(values)`, if given, turns an integer candidate that still violates
    separated constraints into a point satisfying all of them; it is used as
    warm start for the next round and as incumbent when limits stop the loop.
    """
    start = time.time()
    deadline = start + cfg.time_limit
    cuts_added = 0
    if fractional:
        cuts_added += len(_fractional_rounds(model, cfg, sep, deadline))

    def lazy_feasible(point):
        return [con.tag for con in sep(point, 'check')]

    accepted, warm = _check_warm_start(model, cfg, extra_check=lazy_feasible)
    incumbent, incumbent_objective = warm, (model.objective_value(warm) if warm is not None else -np.inf)

    backend = _open_backend(model, cfg, relax=False)
    best_bound = float('inf')
    nodes = 0
    rounds = 0
    status, values = ERROR, None
    message = ''
    while True:
        rounds += 1
        if incumbent is not None:
            backend.set_warm_start(incumbent)
        remaining = deadline - time.time()
        try:
            result = backend.optimize(max(remaining, 1e-2), cfg.gap_tolerance, cfg.feasibility_tolerance)
        except Exception as e:
            logger.error('%s backend failed on %s: %s', cfg.backend, model.name, e)
            result = backends.BackendResult('error', message=str(e))
        nodes += result.nodes
        message = result.message
        status, values, objective, bound = _from_backend(model, cfg, result)
        if values is None:
            break
        if not math.isnan(bound):
            best_bound = min(best_bound, bound)

        cuts = sep(values, 'integral')
        if not cuts:
            if objective >= incumbent_objective - cfg.feasibility_tolerance:
                incumbent, incumbent_objective = values, objective
            else:
                status = FEASIBLE_LIMIT
            break
        _check_contract(cuts, values, cfg.feasibility_tolerance)
        for con in cuts:
            model.append(con)
        backend.add_constraints(cuts)
        cuts_added += len(cuts)
        logger.debug('round %d: %d integral cuts, relaxed objective %g', rounds, len(cuts), objective)

        if repair is not None:
            candidate = repair(values)
            if candidate is not None and not model.violations(candidate, cfg.feasibility_tolerance):
                candidate_objective = model.objective_value(candidate)
                if candidate_objective > incumbent_objective:
                    incumbent, incumbent_objective = candidate, candidate_objective

        if status != OPTIMAL or time.time() >= deadline:
            status = FEASIBLE_LIMIT
            break

        if cfg.frac_all_rounds:
            extra = _fractional_rounds(model, cfg, sep, deadline)
            if extra:
                backend.add_constraints(extra)
                cuts_added += len(extra)

    extra = dict(cuts_added=cuts_added, nodes=nodes, warm_start_accepted=accepted,
                 message=message, rounds=rounds)
    if incumbent is None:
        if status != INFEASIBLE:
            status = ERROR
            extra['message'] = message or 'no incumbent satisfies the separated constraints'
        return _finish(model, cfg, status, None, float('nan'), float('nan'), start, **extra)
    if values is None and status != INFEASIBLE:
        status = FEASIBLE_LIMIT
    if status == INFEASIBLE:
        return _finish(model, cfg, INFEASIBLE, None, float('nan'), float('nan'), start, **extra)
    bound = max(best_bound, incumbent_objective)
    return _finish(model, cfg, status, incumbent, incumbent_objective, bound, start, **extra)
