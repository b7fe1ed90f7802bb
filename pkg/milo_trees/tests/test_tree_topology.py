#!/usr/bin/env python
# -*- coding: utf-8 -*-

import unittest

import numpy as np

import os,sys,inspect
currentdir = os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe())))
rootdir = os.path.dirname(os.path.dirname(currentdir))
sys.path.insert(0,rootdir)

from milo_trees.tree_topology import TreeTopology, build
from milo_trees.errors import InvalidHeightError, InvalidVertexError


class TestTreeTopologyCounts(unittest.TestCase):

    def _run_test_case(self, test_case):
        height, n_vertices, branch, leaves = test_case
        t = build(height)
        self.assertEqual(t.n_vertices, n_vertices)
        self.assertEqual(list(t.branch_set), branch)
        self.assertEqual(list(t.leaf_set), leaves)
        self.assertEqual(t.n_edges, n_vertices - 1)
        self.assertEqual(len(t.edges()), n_vertices - 1)
        self.assertEqual([v for v in t.vertices if t.is_branch(v)], branch)

    def test_height_one(self):
        self._run_test_case((1, 3, [1], [2, 3]))

    def test_height_two(self):
        self._run_test_case((2, 7, [1, 2, 3], [4, 5, 6, 7]))

    def test_height_three(self):
        self._run_test_case((3, 15, list(range(1, 8)), list(range(8, 16))))


class TestTreeTopologyNavigation(unittest.TestCase):

    def setUp(self):
        self.t = TreeTopology(2)

    def test_children_and_parent(self):
        self.assertEqual(self.t.left(2), 4)
        self.assertEqual(self.t.right(2), 5)
        self.assertEqual(self.t.parent(5), 2)
        self.assertEqual(self.t.parent(3), 1)

    def test_path_vertices(self):
        self.assertEqual(self.t.path_vertices(5), [1, 2, 5])
        self.assertEqual(self.t.path_vertices(1), [1])
        self.assertEqual(self.t.non_root_path(5), [2, 5])
        self.assertEqual(self.t.non_root_path(1), [])

    def test_child_set(self):
        self.assertEqual(self.t.child_set(1), [2, 3, 4, 5, 6, 7])
        self.assertEqual(self.t.child_set(2), [4, 5])
        self.assertEqual(self.t.child_set(3), [6, 7])
        self.assertEqual(self.t.child_set(6), [])

    def test_child_set_deeper(self):
        t = TreeTopology(3)
        self.assertEqual(t.child_set(2), [4, 5, 8, 9, 10, 11])

    def test_depth(self):
        self.assertEqual([self.t.depth(v) for v in self.t.vertices], [0, 1, 1, 2, 2, 2, 2])

    def test_numpy_vertex(self):
        self.assertEqual(self.t.left(np.int64(3)), 6)

    def test_edges_by_child(self):
        self.assertEqual(self.t.edges(), [(1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7)])


class TestTreeTopologyErrors(unittest.TestCase):

    def test_invalid_heights(self):
        for height in (0, -1, 2.5, True, '2', None):
            with self.assertRaises(InvalidHeightError):
                TreeTopology(height)

    def test_height_too_large(self):
        with self.assertRaises(InvalidHeightError):
            TreeTopology(40)

    def test_vertex_out_of_range(self):
        t = TreeTopology(2)
        for v in (0, 8, -3):
            with self.assertRaises(InvalidVertexError):
                t.path_vertices(v)

    def test_leaf_has_no_children(self):
        with self.assertRaises(InvalidVertexError):
            TreeTopology(2).left(4)

    def test_root_has_no_parent(self):
        with self.assertRaises(InvalidVertexError):
            TreeTopology(2).parent(1)


if __name__ == '__main__':
    unittest.main()
