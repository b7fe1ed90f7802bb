#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import unicode_literals
import io
import json
import shutil
import argparse
import tempfile
import unittest
import mock

import os,sys,inspect
currentdir = os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe())))
rootdir = os.path.dirname(os.path.dirname(currentdir))
sys.path.insert(0,rootdir)

from milo_trees import dataset
from milo_trees.milo_trees import main, CHECK_FAILED
from milo_trees.apply_tree import apply_tree
from milo_trees.cart import CartConfig, fit_cart
from milo_trees.tree_extraction import TrainedTree, accuracy
from milo_trees.errors import DatasetError

WEATHER = os.path.join(currentdir, 'data', 'weather.csv')
WEATHER_MANIFEST = os.path.join(currentdir, 'data', 'weather.json')


class TestApplyTree(unittest.TestCase):

    def setUp(self):
        self.data = dataset.load_dataset(WEATHER, WEATHER_MANIFEST)
        self.tree = fit_cart(self.data, CartConfig(2))
        text = io.StringIO()
        self.tree.save(text)
        self.tree_json = text.getvalue()

    def _apply(self, label_column='play'):
        out = io.StringIO()
        args = argparse.Namespace(tree=io.StringIO(self.tree_json), input=WEATHER, output=out,
                                  label_column=label_column, verbose=False)
        predictions, acc = apply_tree(args)
        return predictions, acc, out.getvalue().splitlines()

    def test_accuracy_matches_training(self):
        predictions, acc, lines = self._apply()
        self.assertAlmostEqual(acc, accuracy(self.tree, self.data))
        self.assertEqual(len(lines), 14)
        self.assertTrue(set(lines) <= {'yes', 'no'})

    def test_without_labels(self):
        _, acc, lines = self._apply(None)
        self.assertIsNone(acc)
        self.assertEqual(len(lines), 14)

    def test_missing_column(self):
        tree = TrainedTree(1, {1: 0}, {2: 0, 3: 1}, ['pressure>=1000.0'], ['no', 'yes'])
        text = io.StringIO()
        tree.save(text)
        self.tree_json = text.getvalue()
        with self.assertRaises(DatasetError):
            self._apply()


class TestDispatcher(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_learn_and_apply(self):
        with mock.patch('sys.stdout', new_callable=io.StringIO) as out:
            status = main(['learn-tree', '-i', WEATHER, '-m', WEATHER_MANIFEST, '-f', 'CART', '--height', '2'])
        self.assertEqual(status, 0)
        tree = json.loads(out.getvalue())
        self.assertEqual(tree['height'], 2)

        path = os.path.join(self.tmpdir, 'tree.json')
        with io.open(path, 'w', encoding='utf-8') as fobj:
            fobj.write(out.getvalue())
        with mock.patch('sys.stdout', new_callable=io.StringIO) as out:
            status = main(['apply-tree', '-t', path, '-i', WEATHER, '-l', 'play'])
        self.assertEqual(status, 0)
        self.assertEqual(len(out.getvalue().splitlines()), 14)

    def test_prepare_data(self):
        with mock.patch('sys.stdout', new_callable=io.StringIO) as out:
            status = main(['prepare-data', '-i', WEATHER, '-m', WEATHER_MANIFEST])
        self.assertEqual(status, 0)
        lines = out.getvalue().splitlines()
        self.assertEqual(lines[0], 'f_0,f_1,f_2,f_3,f_4,f_5,label')
        self.assertEqual(len(lines), 15)

    def test_input_error(self):
        with mock.patch('sys.stderr', new_callable=io.StringIO) as err:
            status = main(['learn-tree', '-i', os.path.join(self.tmpdir, 'missing.csv'), '-f', 'CART'])
        self.assertEqual(status, 1)
        self.assertTrue(err.getvalue().startswith('Error: missing file'))

    def test_no_command(self):
        with mock.patch('sys.stdout', new_callable=io.StringIO):
            self.assertEqual(main([]), 1)

    def test_failed_check(self):
        with mock.patch('milo_trees.milo_trees.oracle_check', return_value=(None, 3)):
            self.assertEqual(main(['oracle-check', '--instances', '1']), CHECK_FAILED)
        with mock.patch('milo_trees.milo_trees.relax_check', return_value=(None, 0)):
            self.assertEqual(main(['relax-check', '--instances', '1']), 0)

    def test_bench_passes_arguments(self):
        with mock.patch('milo_trees.milo_trees.bench', return_value=0) as bench:
            self.assertEqual(main(['bench', '-c', 'run.yaml', '--heights', '2', '3', '--workers', '4']), 0)
        args = bench.call_args[0][0]
        self.assertEqual(args.heights, [2, 3])
        self.assertEqual(args.workers, 4)
        self.assertIsNone(args.time_limit)


if __name__ == '__main__':
    unittest.main()
