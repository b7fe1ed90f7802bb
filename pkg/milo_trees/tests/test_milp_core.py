#!/usr/bin/env python
# -*- coding: utf-8 -*-

import io
import unittest
import mock

import numpy as np

import os,sys,inspect
currentdir = os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe())))
rootdir = os.path.dirname(os.path.dirname(currentdir))
sys.path.insert(0,rootdir)

from milo_trees import milp_core
from milo_trees.milp_core import (ModelInstance, LinearConstraint, SolveConfig, CONTINUOUS,
                                  OPTIMAL, FEASIBLE_LIMIT, INFEASIBLE, ERROR)
from milo_trees.backends import BackendResult
from milo_trees.errors import SeparationContractError, BackendUnavailableError
from milo_trees import backends


def _toy_model(with_constraint=True):
    """max x0 + 2 x1 over binaries, optionally with x0 + x1 <= 1."""
    model = ModelInstance('toy')
    model.add_vars(['x0', 'x1'])
    if with_constraint:
        model.add_constraint([0, 1], [1, 1], '<=', 1, 'c1')
    model.set_objective([0, 1], [1, 2])
    return model


def _fake_backend(*results):
    backend = mock.MagicMock()
    backend.optimize.side_effect = list(results)
    return backend


class TestLinearConstraint(unittest.TestCase):

    def test_merges_duplicate_variables(self):
        con = LinearConstraint([0, 1, 0], [1, 2, 3], '<=', 4, 'c')
        self.assertEqual(con.terms, [(4.0, 0), (2.0, 1)])

    def test_drops_zero_coefficients(self):
        con = LinearConstraint([0, 1, 1], [1, 2, -2], '=', 0, 'c')
        self.assertEqual(con.terms, [(1.0, 0)])

    def test_violation(self):
        values = np.array([1.0, 1.0])
        self.assertEqual(LinearConstraint([0, 1], [1, 1], '<=', 1, 'c').violation(values), 1.0)
        self.assertEqual(LinearConstraint([0, 1], [1, 1], '>=', 3, 'c').violation(values), 1.0)
        self.assertEqual(LinearConstraint([0, 1], [1, 1], '=', 2, 'c').violation(values), 0.0)

    def test_unknown_sense(self):
        with self.assertRaises(ValueError):
            LinearConstraint([0], [1], '<', 1, 'c')


class TestModelInstance(unittest.TestCase):

    def setUp(self):
        self.model = _toy_model()

    def test_counts(self):
        self.model.add_var('y', CONTINUOUS, 0.0, 5.0)
        self.assertEqual(self.model.n_vars, 3)
        self.assertEqual(self.model.n_constraints, 1)
        self.assertEqual(self.model.count_by_kind(), {'binary': 2, 'continuous': 1})
        self.assertEqual(self.model.var(2).hi, 5.0)

    def test_binary_bounds(self):
        with self.assertRaises(ValueError):
            self.model.add_vars(['bad'], lo=0.0, hi=2.0)

    def test_unknown_variable(self):
        with self.assertRaises(ValueError):
            self.model.add_constraint([0, 7], [1, 1], '<=', 1, 'c2')

    def test_violations(self):
        self.assertEqual(self.model.violations([1, 0]), [])
        self.assertEqual(self.model.violations([1, 1]), ['c1'])
        self.assertEqual(self.model.violations([0.5, 0]), ['integrality:x0'])
        self.assertEqual(self.model.violations([0.5, 0], integral=False), [])
        self.assertEqual(self.model.violations([2, 0]), ['bound:x0', 'c1'])
        self.assertEqual(len(self.model.violations([1, 0, 0])), 1)

    def test_violations_tolerance(self):
        self.assertEqual(self.model.violations([1, 1e-7]), [])
        self.assertEqual(self.model.violations([1, 1e-3]), ['integrality:x1', 'c1'])

    def test_objective_value(self):
        self.assertEqual(self.model.objective_value([1, 1]), 3.0)

    def test_write_lp(self):
        out = io.StringIO()
        self.model.write_lp(out)
        text = out.getvalue()
        self.assertIn('Maximize\n obj: + 1.0 x0 + 2.0 x1\n', text)
        self.assertIn(' c1: + 1.0 x0 + 1.0 x1 <= 1.0\n', text)
        self.assertIn('Binaries\n x0 x1\n', text)
        self.assertTrue(text.endswith('End\n'))


class TestSolve(unittest.TestCase):

    def setUp(self):
        self.model = _toy_model()
        self.cfg = SolveConfig()

    def _solve(self, *results, **changes):
        backend = _fake_backend(*results)
        with mock.patch('milo_trees.backends.get_backend', return_value=backend):
            report, values = milp_core.solve(self.model, self.cfg.derive(**changes))
        return report, values, backend

    def test_snaps_integers(self):
        result = BackendResult('optimal', 2.0, 2.0, np.array([1e-8, 0.9999999]))
        report, values, _ = self._solve(result)
        self.assertEqual(values.tolist(), [0.0, 1.0])
        self.assertEqual(report.status, OPTIMAL)
        self.assertEqual(report.objective, 2.0)
        self.assertEqual(report.gap, 0.0)

    def test_open_gap_downgrades_status(self):
        result = BackendResult('optimal', 1.0, 2.0, np.array([1.0, 0.0]))
        report, _, _ = self._solve(result)
        self.assertEqual(report.status, FEASIBLE_LIMIT)
        self.assertAlmostEqual(report.gap, 1.0)

    def test_infeasible(self):
        report, values, _ = self._solve(BackendResult('infeasible'))
        self.assertEqual(report.status, INFEASIBLE)
        self.assertIsNone(values)
        self.assertFalse(report.has_solution)

    def test_backend_failure(self):
        report, values, _ = self._solve(RuntimeError('solver crashed'))
        self.assertEqual(report.status, ERROR)
        self.assertIsNone(values)

    def test_rejects_infeasible_warm_start(self):
        result = BackendResult('optimal', 2.0, 2.0, np.array([0.0, 1.0]))
        with self.assertLogs('milo_trees.milp_core', level='WARNING'):
            report, _, backend = self._solve(result, warm_start=np.array([1.0, 1.0]))
        self.assertFalse(report.warm_start_accepted)
        backend.set_warm_start.assert_not_called()

    def test_warm_start_kept_without_solution(self):
        report, values, backend = self._solve(BackendResult('limit'), warm_start=np.array([0.0, 1.0]))
        self.assertTrue(report.warm_start_accepted)
        backend.set_warm_start.assert_called_once()
        self.assertEqual(report.status, FEASIBLE_LIMIT)
        self.assertEqual(report.objective, 2.0)
        self.assertEqual(values.tolist(), [0.0, 1.0])

    def test_relaxation_reports_lp_value(self):
        result = BackendResult('optimal', 2.5, None, np.array([0.5, 0.5]))
        report, values, _ = self._solve(result, relax=True)
        self.assertEqual(report.status, OPTIMAL)
        self.assertEqual(report.objective, 1.5)
        self.assertEqual(values.tolist(), [0.5, 0.5])

    def test_unknown_backend(self):
        with self.assertRaises(BackendUnavailableError):
            backends.get_backend('cplex')

    def test_report_row(self):
        report, _, _ = self._solve(BackendResult('optimal', 2.0, 2.0, np.array([0.0, 1.0]), nodes=3))
        row = report.as_row()
        self.assertEqual(row['status'], OPTIMAL)
        self.assertEqual(row['nodes'], 3)
        self.assertEqual(set(row), {'status', 'objective', 'best_bound', 'gap', 'seconds', 'cuts_added', 'nodes'})


class TestSolveWithSeparation(unittest.TestCase):

    def setUp(self):
        self.model = ModelInstance('lazy')
        self.model.add_vars(['x0', 'x1'])
        self.model.set_objective([0, 1], [1, 1])
        self.cut = LinearConstraint([0, 1], [1, 1], '<=', 1, 'lazy')

    def _separate(self, values, phase):
        return [self.cut] if self.cut.violation(values) > 1e-6 else []

    def test_adds_violated_cut_and_resolves(self):
        backend = _fake_backend(BackendResult('optimal', 2.0, 2.0, np.array([1.0, 1.0])),
                                BackendResult('optimal', 1.0, 1.0, np.array([1.0, 0.0])))
        with mock.patch('milo_trees.backends.get_backend', return_value=backend):
            report, values = milp_core.solve_with_separation(self.model, SolveConfig(), self._separate)
        self.assertEqual(report.status, OPTIMAL)
        self.assertEqual(report.objective, 1.0)
        self.assertEqual(report.cuts_added, 1)
        self.assertEqual(report.rounds, 2)
        self.assertEqual(values.tolist(), [1.0, 0.0])
        self.assertEqual([con.tag for con in self.model.constraints], ['lazy'])
        backend.add_constraints.assert_called_once_with([self.cut])

    def test_contract(self):
        satisfied = LinearConstraint([0], [1], '<=', 1, 'never-violated')
        backend = _fake_backend(BackendResult('optimal', 2.0, 2.0, np.array([1.0, 1.0])))
        with mock.patch('milo_trees.backends.get_backend', return_value=backend):
            with self.assertRaises(SeparationContractError):
                milp_core.solve_with_separation(self.model, SolveConfig(), lambda values, phase: [satisfied])

    def test_warm_start_checked_against_lazy_cuts(self):
        backend = _fake_backend(BackendResult('optimal', 1.0, 1.0, np.array([0.0, 1.0])))
        phases = []

        def separate(values, phase):
            phases.append(phase)
            return self._separate(values, phase)

        with mock.patch('milo_trees.backends.get_backend', return_value=backend):
            with self.assertLogs('milo_trees.milp_core', level='WARNING'):
                report, _ = milp_core.solve_with_separation(
                    self.model, SolveConfig(warm_start=np.array([1.0, 1.0])), separate)
        self.assertEqual(phases, ['check', 'integral'])
        self.assertFalse(report.warm_start_accepted)

    def test_fractional_rounds(self):
        lp = _fake_backend(BackendResult('optimal', 2.0, 2.0, np.array([1.0, 1.0])),
                           BackendResult('optimal', 1.0, 1.0, np.array([0.5, 0.5])))
        mip = _fake_backend(BackendResult('optimal', 1.0, 1.0, np.array([0.0, 1.0])))
        phases = []

        def separate(values, phase):
            phases.append(phase)
            return self._separate(values, phase)

        with mock.patch('milo_trees.backends.get_backend', side_effect=[lp, mip]):
            report, _ = milp_core.solve_with_separation(self.model, SolveConfig(), separate, fractional=True)
        self.assertEqual(phases, ['frac', 'frac', 'integral'])
        self.assertEqual(report.cuts_added, 1)
        self.assertEqual(report.status, OPTIMAL)
        lp.load.assert_called_once_with(self.model, relax=True)

    def test_infeasible(self):
        backend = _fake_backend(BackendResult('infeasible'))
        with mock.patch('milo_trees.backends.get_backend', return_value=backend):
            report, values = milp_core.solve_with_separation(self.model, SolveConfig(), self._separate)
        self.assertEqual(report.status, INFEASIBLE)
        self.assertIsNone(values)


if __name__ == '__main__':
    unittest.main()
