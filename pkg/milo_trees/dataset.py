#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Load a CSV table, binarize its columns and split it into train and test sets.

Categorical columns are one-hot encoded (one feature per observed category),
two-valued columns become a single 0/1 feature, and numeric columns are
thresholded at midpoints between consecutive distinct values. By default only
the midpoint closest to the column median is used; --max-thresholds raises the
cap (0 keeps every midpoint). Constant columns are dropped.

The binarized table is written as canonical CSV with header f_0..f_{|F|-1},label
where label holds class ids.
"""

from __future__ import division

import io
import re
import sys
import json
import math
import logging
import argparse
from fractions import Fraction

import numpy as np
import pandas as pd

from .errors import DatasetError, ParseError, DegenerateSplitError

logger = logging.getLogger(__name__)

COLUMN_KINDS = ('categorical', 'numeric', 'binary')


def create_parser(subparsers=None):

    if subparsers:
        parser = subparsers.add_parser('prepare-data',
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description="binarize a CSV table into the canonical 0/1 CSV")
    else:
        parser = argparse.ArgumentParser(
            formatter_class=argparse.RawDescriptionHelpFormatter,
            description="binarize a CSV table into the canonical 0/1 CSV")

    parser.add_argument(
        '--input', '-i', required=True, metavar='PATH',
        help="Input CSV file with a header row.")
    parser.add_argument(
        '--output', '-o', type=argparse.FileType('w'), default=sys.stdout,
        metavar='PATH',
        help="Output file for the canonical CSV (default: standard output).")
    parser.add_argument(
        '--manifest', '-m', metavar='PATH',
        help="JSON manifest with label column, column types and dropped columns.")
    parser.add_argument(
        '--label-column', '-l', metavar='NAME',
        help="Name of the label column (overrides the manifest; default: last column).")
    parser.add_argument(
        '--max-thresholds', type=int, default=None, metavar='N',
        help="Thresholds per numeric column, 0 for every midpoint (default: manifest value or 1).")
    parser.add_argument(
        '--names', metavar='PATH',
        help="Also write the binarized table with readable feature and class names to PATH.")
    parser.add_argument(
        '--verbose', '-v', action="store_true",
        help="verbose mode.")

    return parser


class RawTable(object):
    """Unparsed string columns of a CSV file plus the label column name."""

    def __init__(self, frame, label_column, column_types=None, drop=(), source=None):
        self.frame = frame
        self.label_column = label_column
        self.column_types = dict(column_types or {})
        self.drop = tuple(drop)
        self.source = source

    def __len__(self):
        return len(self.frame)

    @property
    def feature_columns(self):
        return [c for c in self.frame.columns if c != self.label_column and c not in self.drop]


class BinaryDataset(object):
    """Binary feature matrix x (|I| x |F|) and class ids y in 0..|K|-1."""

    def __init__(self, features, labels, feature_names=None, class_names=None,
                 name=None, require_all_classes=True):
        features = np.asarray(features)
        labels = np.asarray(labels)
        if features.ndim != 2:
            raise DatasetError('feature matrix must be two-dimensional')
        if labels.shape != (features.shape[0],):
            raise DatasetError('expected {0} labels, got {1}'.format(features.shape[0], labels.shape[0]))
        if features.shape[0] < 1 or features.shape[1] < 1:
            raise DatasetError('dataset needs at least one row and one feature')
        if not np.isin(features, (0, 1)).all():
            raise DatasetError('feature matrix must only contain 0 and 1')
        if feature_names is None:
            feature_names = ['f_{0}'.format(f) for f in range(features.shape[1])]
        if class_names is None:
            class_names = [str(k) for k in range(int(labels.max()) + 1)]
        if len(feature_names) != features.shape[1]:
            raise DatasetError('expected {0} feature names'.format(features.shape[1]))
        if labels.min() < 0 or labels.max() >= len(class_names):
            raise DatasetError('class ids must lie in 0..{0}'.format(len(class_names) - 1))
        if require_all_classes:
            missing = sorted(set(range(len(class_names))) - set(labels.tolist()))
            if missing:
                raise DatasetError('classes without datapoints: {0}'.format(missing))

        self.features = features.astype(np.int8)
        self.labels = labels.astype(np.int64)
        self.feature_names = list(feature_names)
        self.class_names = list(class_names)
        self.name = name
        self.features.flags.writeable = False
        self.labels.flags.writeable = False

    def __len__(self):
        return self.features.shape[0]

    def __repr__(self):
        return 'BinaryDataset(name={0!r}, |I|={1}, |F|={2}, |K|={3})'.format(
            self.name, self.n_samples, self.n_features, self.n_classes)

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    @property
    def n_classes(self):
        return len(self.class_names)

    def class_counts(self):
        return np.bincount(self.labels, minlength=self.n_classes)

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return BinaryDataset(self.features[indices], self.labels[indices],
                             self.feature_names, self.class_names,
                             name=self.name, require_all_classes=False)

    def to_frame(self, label_column='label'):
        """Raw table with readable names; binarize() maps it back to this dataset."""
        frame = pd.DataFrame(self.features.astype(str), columns=self.feature_names)
        frame[label_column] = [self.class_names[k] for k in self.labels]
        return RawTable(frame, label_column, source=self.name)

    def write_csv(self, fobj):
        """Write the canonical CSV: f_0..f_{|F|-1},label with class ids."""
        frame = pd.DataFrame(self.features, columns=['f_{0}'.format(f) for f in range(self.n_features)])
        frame['label'] = self.labels
        frame.to_csv(fobj, index=False, lineterminator='\n')


class SplitSpec(object):

    def __init__(self, seed=0, train_fraction=Fraction(3, 4), replicate_index=0):
        self.seed = int(seed)
        self.train_fraction = _as_fraction(train_fraction)
        self.replicate_index = int(replicate_index)
        if not 0 < self.train_fraction < 1:
            raise DatasetError('train fraction must lie strictly between 0 and 1, got {0}'.format(train_fraction))
        if self.replicate_index < 0:
            raise DatasetError('replicate index must be non-negative')

    def __repr__(self):
        return 'SplitSpec(seed={0}, train_fraction={1}, replicate_index={2})'.format(
            self.seed, self.train_fraction, self.replicate_index)


def _as_fraction(value):
    if isinstance(value, Fraction):
        return value
    # str() keeps 0.7 from turning into 3152519739159347/4503599627370496
    return Fraction(str(value))


def read_manifest(path):
    try:
        with io.open(path, encoding='utf-8') as fobj:
            manifest = json.load(fobj)
    except (IOError, OSError):
        raise DatasetError('cannot read manifest {0}'.format(path))
    except ValueError as e:
        raise DatasetError('manifest {0} is not valid JSON: {1}'.format(path, e))
    for column, kind in manifest.get('columns', {}).items():
        if kind not in COLUMN_KINDS:
            raise DatasetError('column {0}: unknown type {1!r} in manifest'.format(column, kind))
    return manifest


def load_csv(path, label_column=None, manifest=None):
    """Read a UTF-8 CSV with a header row into a RawTable of string columns.

    The label column defaults to the manifest's, then to the last column.
    Rows with too many or too few fields raise ParseError with the file line.
    """
    manifest = manifest or {}
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8',
                            skipinitialspace=True)
    except (IOError, OSError):
        raise DatasetError('missing file {0}'.format(path))
    except pd.errors.EmptyDataError:
        raise ParseError('{0} is empty'.format(path), row=1)
    except pd.errors.ParserError as e:
        match = re.search(r'line (\d+)', str(e))
        raise ParseError('{0}: ragged row'.format(path), row=int(match.group(1)) if match else None)

    if frame.empty:
        raise ParseError('{0} has a header but no data rows'.format(path), row=2)
    short = frame.isnull().any(axis=1)
    if short.any():
        raise ParseError('{0}: ragged row'.format(path), row=int(np.flatnonzero(short.values)[0]) + 2)

    frame.columns = [str(c).strip() for c in frame.columns]
    label_column = label_column or manifest.get('label_column') or frame.columns[-1]
    if label_column not in frame.columns:
        raise DatasetError('{0} has no label column {1!r}'.format(path, label_column))
    for column in manifest.get('drop', []):
        if column not in frame.columns:
            raise DatasetError('{0} has no column {1!r} to drop'.format(path, column))
    return RawTable(frame, label_column, manifest.get('columns'), manifest.get('drop', ()), source=path)


def _numeric(values):
    try:
        return values.astype(float)
    except ValueError:
        return None


def _sorted_distinct(values):
    distinct = values.unique().tolist()
    numbers = _numeric(pd.Series(distinct, dtype=object).astype(str))
    if numbers is not None:
        return [v for _, v in sorted(zip(numbers.tolist(), distinct))]
    return sorted(distinct)


def _pick_thresholds(numbers, max_thresholds):
    distinct = np.unique(numbers)
    midpoints = (distinct[:-1] + distinct[1:]) / 2
    if max_thresholds == 0 or max_thresholds >= len(midpoints):
        return midpoints.tolist()
    targets = np.quantile(numbers, [(j + 1) / (max_thresholds + 1) for j in range(max_thresholds)])
    chosen = sorted(set(int(np.argmin(np.abs(midpoints - t))) for t in targets))
    return [midpoints[j] for j in chosen]


def binarize(raw, max_thresholds=1):
    """Encode every feature column of `raw` as 0/1 features."""
    frame = raw.frame
    blocks = []
    names = []
    for column in raw.feature_columns:
        values = frame[column].astype(str).str.strip()
        empty = (values == '').values
        if empty.any():
            raise ParseError('column {0!r} has a missing value'.format(column),
                             row=int(np.flatnonzero(empty)[0]) + 2)
        distinct = _sorted_distinct(values)
        numbers = _numeric(values)
        kind = raw.column_types.get(column) or ('numeric' if numbers is not None else 'categorical')

        if len(distinct) == 1:
            logger.warning('dropping constant column %r', column)
            continue
        if kind == 'binary' and len(distinct) > 2:
            raise DatasetError('column {0!r} is declared binary but has {1} values'.format(column, len(distinct)))

        if len(distinct) == 2:
            if numbers is not None and set(numbers.unique()) == {0.0, 1.0}:
                blocks.append(numbers.values.astype(np.int8))
                names.append(column)
            else:
                blocks.append((values == distinct[1]).values.astype(np.int8))
                names.append('{0}={1}'.format(column, distinct[1]))
        elif kind == 'numeric':
            if numbers is None:
                raise DatasetError('column {0!r} is declared numeric but holds text'.format(column))
            for threshold in _pick_thresholds(numbers.values, max_thresholds):
                blocks.append((numbers.values >= threshold).astype(np.int8))
                names.append('{0}>={1!r}'.format(column, float(threshold)))
        else:
            for category in distinct:
                blocks.append((values == category).values.astype(np.int8))
                names.append('{0}={1}'.format(column, category))

    if not blocks:
        raise DatasetError('no usable feature columns in {0}'.format(raw.source))

    labels = frame[raw.label_column].astype(str).str.strip()
    empty = (labels == '').values
    if empty.any():
        raise ParseError('label column has a missing value', row=int(np.flatnonzero(empty)[0]) + 2)
    class_names = _sorted_distinct(labels)
    class_ids = {name: k for k, name in enumerate(class_names)}
    y = np.array([class_ids[v] for v in labels], dtype=np.int64)

    return BinaryDataset(np.column_stack(blocks), y, names, class_names, name=raw.source)


def features_from_names(raw, feature_names):
    """Rebuild binary features named by binarize() ("col", "col=value", "col>=threshold") on new rows."""
    frame = raw.frame
    columns = []
    for name in feature_names:
        if name in frame.columns:
            values = _numeric(frame[name].astype(str).str.strip())
            if values is None or not values.isin((0.0, 1.0)).all():
                raise DatasetError('column {0!r} is not binary'.format(name))
            columns.append(values.values.astype(np.int8))
        elif '>=' in name and name.rpartition('>=')[0] in frame.columns:
            column, _, threshold = name.rpartition('>=')
            values = _numeric(frame[column].astype(str).str.strip())
            if values is None:
                raise DatasetError('column {0!r} holds text but the tree thresholds it'.format(column))
            columns.append((values.values >= float(threshold)).astype(np.int8))
        elif '=' in name and name.partition('=')[0] in frame.columns:
            column, _, category = name.partition('=')
            columns.append((frame[column].astype(str).str.strip() == category).values.astype(np.int8))
        else:
            raise DatasetError('no column provides feature {0!r}'.format(name))
    return np.column_stack(columns) if columns else np.zeros((len(frame), 0), dtype=np.int8)


def labels_from_names(raw, class_names):
    """Class ids of the label column; -1 for classes the names do not list."""
    class_ids = dict((name, k) for k, name in enumerate(class_names))
    labels = raw.frame[raw.label_column].astype(str).str.strip()
    return np.array([class_ids.get(v, -1) for v in labels], dtype=np.int64)


def load_dataset(path, manifest_path=None, label_column=None, max_thresholds=None, name=None):
    manifest = read_manifest(manifest_path) if manifest_path else {}
    raw = load_csv(path, label_column, manifest)
    if max_thresholds is None:
        max_thresholds = manifest.get('max_thresholds', 1)
    data = binarize(raw, max_thresholds)
    data.name = name or manifest.get('name') or data.name
    logger.info('loaded %s: |I|=%d |F|=%d |K|=%d', data.name, data.n_samples, data.n_features, data.n_classes)
    return data


def split(data, spec):
    """Shuffle with Philox (key=seed, jumped replicate_index times) and cut off the train share."""
    n = data.n_samples
    n_train = int(math.ceil(spec.train_fraction * n))
    if n_train >= n:
        raise DegenerateSplitError('train fraction {0} leaves no test rows out of {1}'.format(spec.train_fraction, n))
    rng = np.random.Generator(np.random.Philox(key=spec.seed % 2 ** 64).jumped(spec.replicate_index))
    order = rng.permutation(n)
    return data.subset(np.sort(order[:n_train])), data.subset(np.sort(order[n_train:]))


def prepare_data(args):
    data = load_dataset(args.input, args.manifest, args.label_column, args.max_thresholds)
    data.write_csv(args.output)
    if args.names:
        with io.open(args.names, 'w', encoding='utf-8') as fobj:
            raw = data.to_frame()
            raw.frame.to_csv(fobj, index=False, lineterminator='\n')
    return data


if __name__ == '__main__':

    parser = create_parser()
    args = parser.parse_args()
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(levelname)s: %(message)s')
    try:
        prepare_data(args)
    except DatasetError as e:
        sys.stderr.write('Error: {0}\n'.format(e))
        sys.exit(1)
