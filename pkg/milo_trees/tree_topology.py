# -*- coding: utf-8 -*-
"""Complete binary tree of height h with heap numbering.

Vertices are 1..n with n = 2^(h+1) - 1; the children of v are 2v and 2v+1 and
the parent of v is v // 2. Branch vertices are 1..2^h - 1, leaves 2^h..n. The
sink of the MCF1 flow network has no vertex of its own; models that need it
use index 0.
"""

import numbers

from .errors import InvalidHeightError, InvalidVertexError

# keeps n inside a signed 32-bit index, which is what solver backends use
MAX_HEIGHT = 29


class TreeTopology(object):

    def __init__(self, height):
        if not isinstance(height, numbers.Integral) or isinstance(height, bool) or height < 1:
            raise InvalidHeightError('tree height must be a positive integer, got {0!r}'.format(height))
        if height > MAX_HEIGHT:
            raise InvalidHeightError('tree height {0} exceeds the supported maximum {1}'.format(height, MAX_HEIGHT))
        self.height = int(height)
        self.n_vertices = 2 ** (self.height + 1) - 1
        self.first_leaf = 2 ** self.height

    def __repr__(self):
        return 'TreeTopology(height={0})'.format(self.height)

    def __eq__(self, other):
        return isinstance(other, TreeTopology) and other.height == self.height

    def __hash__(self):
        return hash(('TreeTopology', self.height))

    @property
    def vertices(self):
        return range(1, self.n_vertices + 1)

    @property
    def branch_set(self):
        return range(1, self.first_leaf)

    @property
    def leaf_set(self):
        return range(self.first_leaf, self.n_vertices + 1)

    @property
    def n_edges(self):
        return self.n_vertices - 1

    def edges(self):
        """Tree edges (a(v), v), listed by child vertex."""
        return [(v // 2, v) for v in range(2, self.n_vertices + 1)]

    def _check(self, v):
        if not isinstance(v, numbers.Integral) or isinstance(v, bool) or v < 1 or v > self.n_vertices:
            raise InvalidVertexError('vertex {0!r} is not in 1..{1}'.format(v, self.n_vertices))
        return int(v)

    def is_leaf(self, v):
        v = self._check(v)
        return v >= self.first_leaf

    def is_branch(self, v):
        return not self.is_leaf(v)

    def left(self, v):
        v = self._check(v)
        if v >= self.first_leaf:
            raise InvalidVertexError('leaf {0} has no children'.format(v))
        return 2 * v

    def right(self, v):
        return self.left(v) + 1

    def parent(self, v):
        v = self._check(v)
        if v == 1:
            raise InvalidVertexError('the root has no parent')
        return v // 2

    def depth(self, v):
        v = self._check(v)
        return v.bit_length() - 1

    def path_vertices(self, v):
        """Vertices of the root-to-v path, root first, both ends included."""
        v = self._check(v)
        path = []
        while v >= 1:
            path.append(v)
            v //= 2
        path.reverse()
        return path

    def non_root_path(self, v):
        return self.path_vertices(v)[1:]

    def child_set(self, v):
        """All proper descendants of v, in increasing order."""
        v = self._check(v)
        descendants = []
        lo = hi = v
        while 2 * lo <= self.n_vertices:
            lo, hi = 2 * lo, 2 * hi + 1
            descendants.extend(range(lo, hi + 1))
        return descendants


def build(height):
    return TreeTopology(height)
