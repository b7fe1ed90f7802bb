# -*- coding: utf-8 -*-
"""MILP/LP solver bindings.

A backend registers columns, appends rows, takes a maximisation objective and
an optional warm start, and reports status, values, objective, dual bound and
node count. Two bindings are provided:

  highs   highspy (HiGHS through its own Python API); warm starts supported
  scipy   scipy.optimize.milp (HiGHS bundled with scipy); no warm starts
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BackendUnavailableError

try:
    import highspy
except ImportError:
    highspy = None

try:
    import scipy.optimize
    import scipy.sparse
except ImportError:
    scipy = None

logger = logging.getLogger(__name__)


@dataclass
class BackendResult:
    status: str
    objective: Optional[float] = None
    bound: Optional[float] = None
    values: Optional[np.ndarray] = None
    nodes: int = 0
    message: str = ''


class Backend(object):

    name = None
    supports_warm_start = False

    def __init__(self, threads=1, seed=0, verbose=False):
        self.threads = threads
        self.seed = seed
        self.verbose = verbose
        self.n_cols = 0
        self.is_mip = False

    def load(self, model, relax=False):
        """Register every column, row and the objective of a ModelInstance."""
        integer = np.zeros(model.n_vars, dtype=bool) if relax else model.binary_mask
        self.add_columns(model.lower, model.upper, integer)
        self.add_constraints(model.constraints)
        self.set_objective(model.objective_vars, model.objective_coefs)

    def add_columns(self, lower, upper, integer):
        raise NotImplementedError

    def add_constraints(self, constraints):
        raise NotImplementedError

    def set_objective(self, variables, coefs):
        raise NotImplementedError

    def set_warm_start(self, values):
        logger.debug('%s backend ignores warm starts', self.name)

    def optimize(self, time_limit, gap_tolerance, feasibility_tolerance):
        raise NotImplementedError


def stack_constraints(constraints, n_cols):
    """CSR matrix and row bounds for a list of LinearConstraints."""
    indptr = np.zeros(len(constraints) + 1, dtype=np.int64)
    for r, con in enumerate(constraints):
        indptr[r + 1] = indptr[r] + len(con.vars)
    if constraints:
        indices = np.concatenate([con.vars for con in constraints])
        data = np.concatenate([con.coefs for con in constraints])
    else:
        indices = np.zeros(0, dtype=np.int64)
        data = np.zeros(0)
    matrix = scipy.sparse.csr_matrix((data, indices, indptr), shape=(len(constraints), n_cols))
    row_bounds = np.array([con.bounds() for con in constraints], dtype=np.float64).reshape(-1, 2)
    return matrix, row_bounds[:, 0], row_bounds[:, 1]


class HighsBackend(Backend):

    name = 'highs'
    supports_warm_start = True

    def __init__(self, threads=1, seed=0, verbose=False):
        super(HighsBackend, self).__init__(threads, seed, verbose)
        self._highs = highspy.Highs()
        self._highs.setOptionValue('output_flag', bool(verbose))
        self._highs.setOptionValue('threads', int(threads))
        self._highs.setOptionValue('random_seed', int(seed))

    @staticmethod
    def version():
        try:
            return '{0}.{1}.{2}'.format(highspy.HIGHS_VERSION_MAJOR, highspy.HIGHS_VERSION_MINOR,
                                        highspy.HIGHS_VERSION_PATCH)
        except AttributeError:
            tmp = highspy.Highs()
            return '{0}.{1}.{2}'.format(tmp.versionMajor(), tmp.versionMinor(), tmp.versionPatch())

    def add_columns(self, lower, upper, integer):
        n = len(lower)
        if not n:
            return
        lower = np.where(np.isinf(lower), -highspy.kHighsInf, lower).astype(np.double)
        upper = np.where(np.isinf(upper), highspy.kHighsInf, upper).astype(np.double)
        self._highs.addVars(n, lower, upper)
        idx = np.arange(self.n_cols, self.n_cols + n, dtype=np.int32)[np.asarray(integer, dtype=bool)]
        if len(idx):
            self._highs.changeColsIntegrality(len(idx), idx, np.full(len(idx), highspy.HighsVarType.kInteger, dtype=np.uint8))
            self.is_mip = True
        self.n_cols += n

    def add_constraints(self, constraints):
        if not constraints:
            return
        matrix, row_lo, row_hi = stack_constraints(constraints, self.n_cols)
        row_lo = np.where(np.isinf(row_lo), -highspy.kHighsInf, row_lo)
        row_hi = np.where(np.isinf(row_hi), highspy.kHighsInf, row_hi)
        self._highs.addRows(
            len(constraints),
            row_lo.astype(np.double),
            row_hi.astype(np.double),
            matrix.nnz,
            matrix.indptr[:-1].astype(np.int32),
            matrix.indices.astype(np.int32),
            matrix.data.astype(np.double),
        )

    def set_objective(self, variables, coefs):
        if len(variables):
            self._highs.changeColsCost(len(variables), np.asarray(variables, dtype=np.int32),
                                       np.asarray(coefs, dtype=np.double))
        self._highs.changeObjectiveSense(highspy.ObjSense.kMaximize)

    def set_warm_start(self, values):
        solution = highspy.HighsSolution()
        solution.col_value = [float(v) for v in values]
        solution.value_valid = True
        self._highs.setSolution(solution)

    def optimize(self, time_limit, gap_tolerance, feasibility_tolerance):
        highs = self._highs
        highs.setOptionValue('time_limit', float(max(time_limit, 1e-2)))
        highs.setOptionValue('mip_rel_gap', float(gap_tolerance))
        highs.setOptionValue('mip_feasibility_tolerance', float(feasibility_tolerance))
        highs.setOptionValue('primal_feasibility_tolerance', float(feasibility_tolerance))
        highs.run()

        status = highs.getModelStatus()
        solution = highs.getSolution()
        info = highs.getInfo()
        has_solution = bool(solution.value_valid)
        nodes = max(int(info.mip_node_count), 0) if self.is_mip else 0

        if status == highspy.HighsModelStatus.kOptimal:
            code = 'optimal'
        elif status in (highspy.HighsModelStatus.kInfeasible, highspy.HighsModelStatus.kUnboundedOrInfeasible):
            code = 'infeasible'
        elif has_solution or status in (highspy.HighsModelStatus.kTimeLimit,
                                        highspy.HighsModelStatus.kIterationLimit):
            code = 'limit'
        else:
            code = 'error'
        if not has_solution:
            return BackendResult(code, nodes=nodes, message=highs.modelStatusToString(status))

        objective = info.objective_function_value
        bound = info.mip_dual_bound if self.is_mip else objective
        return BackendResult(code, objective, bound, np.array(solution.col_value, dtype=np.float64),
                             nodes, highs.modelStatusToString(status))


class ScipyBackend(Backend):

    name = 'scipy'

    def __init__(self, threads=1, seed=0, verbose=False):
        super(ScipyBackend, self).__init__(threads, seed, verbose)
        self._lower = np.zeros(0)
        self._upper = np.zeros(0)
        self._integer = np.zeros(0, dtype=bool)
        self._rows = []
        self._cost = np.zeros(0)

    @staticmethod
    def version():
        return scipy.__version__

    def add_columns(self, lower, upper, integer):
        self._lower = np.concatenate([self._lower, lower])
        self._upper = np.concatenate([self._upper, upper])
        self._integer = np.concatenate([self._integer, np.asarray(integer, dtype=bool)])
        self._cost = np.concatenate([self._cost, np.zeros(len(lower))])
        self.is_mip = bool(self._integer.any())
        self.n_cols += len(lower)

    def add_constraints(self, constraints):
        self._rows.extend(constraints)

    def set_objective(self, variables, coefs):
        self._cost = np.zeros(self.n_cols)
        np.add.at(self._cost, np.asarray(variables, dtype=np.int64), coefs)

    def optimize(self, time_limit, gap_tolerance, feasibility_tolerance):
        constraints = []
        if self._rows:
            matrix, row_lo, row_hi = stack_constraints(self._rows, self.n_cols)
            constraints.append(scipy.optimize.LinearConstraint(matrix, row_lo, row_hi))
        options = {
            'disp': bool(self.verbose),
            'time_limit': float(max(time_limit, 1e-2)),
            'mip_rel_gap': float(gap_tolerance),
        }
        res = scipy.optimize.milp(-self._cost, integrality=self._integer.astype(np.uint8),
                                  bounds=scipy.optimize.Bounds(self._lower, self._upper),
                                  constraints=constraints, options=options)

        code = {0: 'optimal', 1: 'limit', 2: 'infeasible'}.get(res.status, 'error')
        nodes = int(getattr(res, 'mip_node_count', 0) or 0)
        if res.x is None:
            return BackendResult(code, nodes=nodes, message=res.message)
        objective = -res.fun
        bound = objective
        dual_bound = getattr(res, 'mip_dual_bound', None)
        if self.is_mip and dual_bound is not None and np.isfinite(dual_bound):
            bound = -dual_bound
        return BackendResult(code, objective, bound, np.asarray(res.x, dtype=np.float64), nodes, res.message)


BACKENDS = {
    'highs': (HighsBackend, lambda: highspy is not None),
    'scipy': (ScipyBackend, lambda: scipy is not None and hasattr(scipy.optimize, 'milp')),
}


def available(name):
    return name in BACKENDS and BACKENDS[name][1]()


def get_backend(name, **kwargs):
    if name not in BACKENDS:
        raise BackendUnavailableError('unknown backend {0!r} (choose from {1})'.format(name, ', '.join(sorted(BACKENDS))))
    cls, check = BACKENDS[name]
    if not check():
        raise BackendUnavailableError('backend {0!r} is not installed'.format(name))
    return cls(**kwargs)


def identity(name):
    """Backend name and version, as recorded in run manifests."""
    if not available(name):
        return '{0} (unavailable)'.format(name)
    return '{0} {1}'.format(name, BACKENDS[name][0].version())
