#!/usr/bin/env python
# -*- coding: utf-8 -*-

import io
import unittest

import numpy as np

import os,sys,inspect
currentdir = os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe())))
rootdir = os.path.dirname(os.path.dirname(currentdir))
sys.path.insert(0,rootdir)

from milo_trees.dataset import BinaryDataset
from milo_trees.tree_topology import TreeTopology
from milo_trees.formulations import FormulationKind, build
from milo_trees.milp_core import SolveConfig
from milo_trees.separation import (CutStrategy, Separator, separate_integral, separate_fractional,
                                   run_strategy, cut_lhs)


def _lazy_model(kind, height, n_samples=1):
    data = BinaryDataset(np.zeros((n_samples, 1), dtype=int), np.zeros(n_samples, dtype=int))
    return build(kind, TreeTopology(height), data, strategy='LAZY')


def _set(model, values, role, entries):
    ids = model.index.roles()[role]
    for (i, v), value in entries.items():
        values[ids[i, v]] = value
    return values


class TestCutStrategy(unittest.TestCase):

    def test_parse(self):
        self.assertIs(CutStrategy.parse('frac2'), CutStrategy.FRAC2)
        self.assertEqual(str(CutStrategy.LAZY), 'LAZY')
        with self.assertRaises(ValueError):
            CutStrategy.parse('FRAC4')

    def test_fractional(self):
        self.assertEqual([s.value for s in CutStrategy if s.is_fractional], ['FRAC1', 'FRAC2', 'FRAC3'])


class TestIntegralSeparation(unittest.TestCase):

    def test_single_missing_separator(self):
        model = _lazy_model(FormulationKind.CUT1, 2)
        values = np.zeros(model.n_vars)
        _set(model, values, 's', {(0, 4): 1.0})
        _set(model, values, 'q', {(0, 4): 1.0})
        cuts = separate_integral(values, model)
        self.assertEqual([(c.i, c.v, c.c) for c in cuts], [(0, 4, 2)])
        self.assertEqual(cuts[0].violation, 1.0)
        self.assertEqual(cuts[0].kind, 'cut1')

    def test_no_separator_selected(self):
        model = _lazy_model(FormulationKind.CUT1, 2)
        values = _set(model, np.zeros(model.n_vars), 's', {(0, 7): 1.0})
        self.assertEqual([(c.v, c.c) for c in separate_integral(values, model)], [(7, 3), (7, 7)])

    def test_cut2_reports_ancestors(self):
        model = _lazy_model(FormulationKind.CUT2, 2)
        values = _set(model, np.zeros(model.n_vars), 's', {(0, 5): 1.0})
        self.assertEqual([(c.v, c.c) for c in separate_integral(values, model)], [(2, 2), (5, 2), (5, 5)])
        self.assertEqual(cut_lhs(values, model)[0, 2], 1.0)

    def test_nothing_at_zero(self):
        for kind in (FormulationKind.CUT1, FormulationKind.CUT2):
            model = _lazy_model(kind, 3, n_samples=2)
            values = np.zeros(model.n_vars)
            self.assertEqual(separate_integral(values, model), [])
            for variant in ('FRAC1', 'FRAC2', 'FRAC3'):
                self.assertEqual(separate_fractional(values, model, variant), [])

    def test_not_a_cut_model(self):
        model = build(FormulationKind.FLOWOCT, TreeTopology(1), BinaryDataset([[0]], [0]))
        with self.assertRaises(ValueError):
            separate_integral(np.zeros(model.n_vars), model)


class TestFractionalSeparation(unittest.TestCase):

    def setUp(self):
        self.model = _lazy_model(FormulationKind.CUT1, 4)
        values = np.zeros(self.model.n_vars)
        _set(self.model, values, 'q', {(0, 2): 0.75, (0, 4): 0.25, (0, 8): 0.5, (0, 16): 0.25})
        self.values = _set(self.model, values, 's', {(0, 16): 0.75})

    def _run_test_case(self, test_case):
        variant, expected = test_case
        cuts = separate_fractional(self.values, self.model, variant)
        self.assertEqual(sorted(c.c for c in cuts), expected)
        self.assertTrue(all(c.v == 16 for c in cuts))

    def test_frac1(self):
        self._run_test_case(('FRAC1', [4, 8, 16]))

    def test_frac2(self):
        self._run_test_case(('FRAC2', [4]))

    def test_frac3(self):
        self._run_test_case(('FRAC3', [4]))

    def test_frac3_tie_goes_to_the_root(self):
        model = _lazy_model(FormulationKind.CUT1, 2)
        values = np.zeros(model.n_vars)
        _set(model, values, 's', {(0, 4): 0.8})
        _set(model, values, 'q', {(0, 2): 0.3, (0, 4): 0.3})
        cuts = separate_fractional(values, model, 'FRAC3')
        self.assertEqual([(c.v, c.c) for c in cuts], [(4, 2)])

    def test_epsilon(self):
        cuts = separate_fractional(self.values, self.model, 'FRAC1', eps=0.3)
        self.assertEqual(sorted(c.c for c in cuts), [4, 16])

    def test_subsets_of_frac1(self):
        rng = np.random.default_rng(11)
        for kind in (FormulationKind.CUT1, FormulationKind.CUT2):
            model = _lazy_model(kind, 3, n_samples=3)
            values = rng.uniform(size=model.n_vars)
            frac1 = set(c.key for c in separate_fractional(values, model, 'FRAC1'))
            for variant in ('FRAC2', 'FRAC3'):
                found = set(c.key for c in separate_fractional(values, model, variant))
                self.assertTrue(found <= frac1)
                per_vertex = set((i, v) for i, v, _, _ in found)
                self.assertEqual(len(per_vertex), len(found))

    def test_not_a_fractional_variant(self):
        with self.assertRaises(ValueError):
            separate_fractional(self.values, self.model, 'LAZY')


class TestSeparator(unittest.TestCase):

    def setUp(self):
        self.model = _lazy_model(FormulationKind.CUT2, 2)
        values = np.zeros(self.model.n_vars)
        _set(self.model, values, 's', {(0, 4): 1.0})
        self.values = _set(self.model, values, 'q', {(0, 4): 1.0})

    def test_cuts_are_added_once(self):
        separator = Separator(self.model, 'LAZY')
        first = separator(self.values, 'integral')
        self.assertEqual([con.tag for con in first], ['cut2_i0_v2_c2', 'cut2_i0_v4_c2'])
        self.assertEqual(separator(self.values, 'integral'), [])

    def test_check_does_not_record(self):
        separator = Separator(self.model, 'LAZY')
        self.assertEqual(len(separator(self.values, 'check')), 2)
        self.assertEqual(len(separator(self.values, 'check')), 2)
        self.assertEqual(separator.log, [])

    def test_log(self):
        separator = Separator(self.model, 'FRAC1')
        separator(self.values, 'frac')
        frame = separator.log_frame()
        self.assertEqual(list(frame.columns), ['iter', 'i', 'v', 'c', 'violation', 'phase'])
        self.assertEqual(frame['phase'].tolist(), ['frac', 'frac'])
        out = io.StringIO()
        separator.write_log(out)
        self.assertEqual(out.getvalue().splitlines()[0], 'iter,i,v,c,violation,phase')

    def test_needs_lazy_pool(self):
        model = build(FormulationKind.CUT2, TreeTopology(2), BinaryDataset([[0]], [0]))
        with self.assertRaises(ValueError):
            Separator(model, 'LAZY')

    def test_all_needs_every_cut(self):
        with self.assertRaises(ValueError):
            run_strategy(self.model, 'ALL', SolveConfig())


if __name__ == '__main__':
    unittest.main()
