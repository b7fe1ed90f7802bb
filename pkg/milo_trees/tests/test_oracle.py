#!/usr/bin/env python
# -*- coding: utf-8 -*-

import unittest

import numpy as np

import os,sys,inspect
currentdir = os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe())))
rootdir = os.path.dirname(os.path.dirname(currentdir))
sys.path.insert(0,rootdir)

from milo_trees.dataset import BinaryDataset
from milo_trees.oracle import enumerate_optimal, random_instance, MAX_FEATURES
from milo_trees.tree_extraction import correct_count
from milo_trees.cart import CartConfig, fit_cart
from milo_trees.errors import InstanceTooLargeError


XOR = BinaryDataset([[0, 0], [0, 1], [1, 0], [1, 1]], [0, 1, 1, 0])


class TestEnumerateOptimal(unittest.TestCase):

    def _run_test_case(self, test_case):
        data, height, budget, expected = test_case
        correct, tree = enumerate_optimal(data, height, budget)
        self.assertEqual(correct, expected)
        self.assertEqual(correct_count(tree, data), expected)
        if budget is not None:
            self.assertLessEqual(tree.n_branch, budget)
        return tree

    def test_xor_height_two(self):
        self._run_test_case((XOR, 2, None, 4))

    def test_xor_height_one(self):
        self._run_test_case((XOR, 1, None, 2))

    def test_budget_zero_is_majority(self):
        data = BinaryDataset([[0, 1], [1, 1], [1, 0], [0, 0], [1, 1]], [2, 0, 2, 1, 2])
        tree = self._run_test_case((data, 2, 0, 3))
        self.assertEqual(tree.class_label, {1: 2})

    def test_budget_one(self):
        self._run_test_case((XOR, 2, 1, 2))

    def test_single_point(self):
        self._run_test_case((BinaryDataset([[1, 0, 1]], [0]), 2, None, 1))

    def test_at_least_cart(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            data = random_instance(rng)
            for height in (1, 2):
                correct, _ = enumerate_optimal(data, height)
                cart = fit_cart(data, CartConfig(height))
                self.assertGreaterEqual(correct, correct_count(cart, data))

    def test_guard(self):
        wide = BinaryDataset(np.eye(MAX_FEATURES + 1, dtype=int), np.arange(MAX_FEATURES + 1) % 2)
        with self.assertRaises(InstanceTooLargeError):
            enumerate_optimal(wide, 1)
        with self.assertRaises(InstanceTooLargeError):
            enumerate_optimal(XOR, 3)


class TestRandomInstance(unittest.TestCase):

    def test_deterministic(self):
        first = random_instance(np.random.default_rng(3))
        second = random_instance(np.random.default_rng(3))
        self.assertEqual(first.features.tolist(), second.features.tolist())
        self.assertEqual(first.labels.tolist(), second.labels.tolist())

    def test_limits(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            data = random_instance(rng)
            self.assertTrue(1 <= data.n_samples <= 10)
            self.assertTrue(1 <= data.n_features <= 4)
            self.assertTrue(1 <= data.n_classes <= 3)


if __name__ == '__main__':
    unittest.main()
