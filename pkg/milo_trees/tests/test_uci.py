#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Checks on the benchmark tables; run when MILO_TREES_DATA names a directory
holding <name>.csv (and optional <name>.json manifests)."""

import unittest

import os,sys,inspect
currentdir = os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe())))
rootdir = os.path.dirname(os.path.dirname(currentdir))
sys.path.insert(0,rootdir)

from milo_trees import backends, dataset
from milo_trees.formulations import ALL_KINDS
from milo_trees.milp_core import SolveConfig, OPTIMAL
from milo_trees.learn_tree import train
from milo_trees.tree_extraction import accuracy

DATA_DIR = os.environ.get('MILO_TREES_DATA')


def _load(name):
    csv_path = os.path.join(DATA_DIR, name + '.csv')
    if not os.path.exists(csv_path):
        raise unittest.SkipTest('{0} not in {1}'.format(name, DATA_DIR))
    manifest = os.path.join(DATA_DIR, name + '.json')
    return dataset.load_dataset(csv_path, manifest if os.path.exists(manifest) else None, name=name)


@unittest.skipUnless(DATA_DIR and backends.available('highs'), 'MILO_TREES_DATA is unset or highspy is missing')
class TestBenchmarkTables(unittest.TestCase):

    def setUp(self):
        self.cfg = SolveConfig(time_limit=600)

    def test_soybean_small_separable(self):
        data = _load('soybean-small')
        train_data, _ = dataset.split(data, dataset.SplitSpec(seed=0))
        for kind in ALL_KINDS:
            result = train(train_data, 2, kind.value, self.cfg)
            self.assertEqual(result.report.status, OPTIMAL, kind)
            self.assertEqual(accuracy(result.tree, train_data), 1.0, kind)

    def test_monk1_formulations_agree(self):
        data = _load('monk1')
        train_data, _ = dataset.split(data, dataset.SplitSpec(seed=0))
        objectives = set()
        for kind in ALL_KINDS:
            result = train(train_data, 2, kind.value, self.cfg)
            if result.report.status == OPTIMAL:
                objectives.add(result.train_correct)
        self.assertLessEqual(len(objectives), 1)


if __name__ == '__main__':
    unittest.main()
