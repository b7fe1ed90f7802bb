# -*- coding: utf-8 -*-
"""Exceptions raised by milo-trees.

Every error a command-line verb can report derives from MiloTreesError, so the
dispatcher only needs one ``except`` clause.
"""


class MiloTreesError(Exception):
    pass


class InvalidHeightError(MiloTreesError):
    pass


class InvalidVertexError(MiloTreesError):
    pass


class DatasetError(MiloTreesError):
    pass


class ParseError(DatasetError):

    def __init__(self, message, row=None):
        if row is not None:
            message = '{0} (row {1})'.format(message, row)
        super(ParseError, self).__init__(message)
        self.row = row


class DegenerateSplitError(DatasetError):
    pass


class DimensionMismatchError(DatasetError):
    pass


class BackendUnavailableError(MiloTreesError):
    pass


class SeparationContractError(MiloTreesError):

    def __init__(self, tag):
        super(SeparationContractError, self).__init__(
            'separation returned constraint {0} which is not violated at the queried point'.format(tag))
        self.tag = tag


class InvalidAssignmentError(MiloTreesError):

    def __init__(self, message, vertex=None):
        if vertex is not None:
            message = '{0} (vertex {1})'.format(message, vertex)
        super(InvalidAssignmentError, self).__init__(message)
        self.vertex = vertex


class CorruptTreeError(MiloTreesError):
    pass


class InstanceTooLargeError(MiloTreesError):
    pass


class ConfigError(MiloTreesError):
    pass
