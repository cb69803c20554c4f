"""Dataset ingestion, normalization, resampling and train/validation splits."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.model_selection import RepeatedStratifiedKFold, StratifiedShuffleSplit

from ._errors import (
    ConfigError,
    EmptyInputError,
    FormatError,
    ParseError,
    ShapeError,
    StratificationError,
)

__all__ = [
    "TimeSeriesDataset",
    "SplitSpec",
    "load_dataset",
    "parse_rows",
    "znormalize",
    "stratified_resample",
    "make_splits",
]

NORM_EPS = 1e-8


@dataclass(frozen=True)
class TimeSeriesDataset:
    """Labeled, fixed-length univariate series.

    Parameters
    ----------
    series : ndarray of shape (n_instances, series_length)
    labels : ndarray of shape (n_instances,)
        Dense integer class ids indexing ``class_names``.
    class_names : tuple of str
    name : str
    """

    series: np.ndarray
    labels: np.ndarray
    class_names: tuple
    name: str = "dataset"

    def __post_init__(self):
        series = np.array(self.series, dtype=np.float64, order="C")
        labels = np.array(self.labels, dtype=np.int64)
        if series.ndim != 2:
            raise ShapeError(f"series must be 2-D, got shape {series.shape}")
        if series.shape[0] == 0:
            raise EmptyInputError("dataset has no instances")
        if series.shape[1] < 2:
            raise ShapeError(f"series length must be >= 2, got {series.shape[1]}")
        if labels.shape != (series.shape[0],):
            raise ShapeError(
                f"{labels.shape[0] if labels.ndim else 0} labels for {series.shape[0]} series"
            )
        if not np.all(np.isfinite(series)):
            raise ParseError("series contain non-finite values")
        names = tuple(str(c) for c in self.class_names)
        if labels.min() < 0 or labels.max() >= len(names):
            raise ShapeError("label id out of range of class_names")
        series.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_names", names)

    @property
    def n_instances(self):
        return self.series.shape[0]

    @property
    def length(self):
        return self.series.shape[1]

    @property
    def n_classes(self):
        return len(self.class_names)

    def class_counts(self):
        return np.bincount(self.labels, minlength=self.n_classes)

    def subset(self, indices, name=None):
        indices = np.asarray(indices, dtype=np.int64)
        return TimeSeriesDataset(
            self.series[indices],
            self.labels[indices],
            self.class_names,
            self.name if name is None else name,
        )


@dataclass(frozen=True)
class SplitSpec:
    """Parameters of the train/validation split generator.

    ``kind`` is only a hint: :func:`make_splits` picks repeated stratified
    k-fold when ``n <= mds`` and stratified shuffle splits otherwise.
    """

    k: int = 2
    nr: int = 10
    mds: int = 500
    seed: int = 0
    kind: str = field(default="auto")

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError(f"k must be >= 2, got {self.k}")
        if self.nr < 1:
            raise ConfigError(f"nr must be >= 1, got {self.nr}")
        if self.mds < 2 * self.k:
            raise ConfigError(f"mds must be >= 2*k = {2 * self.k}, got {self.mds}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.kind not in ("auto", "repeated_stratified_kfold", "stratified_shuffle"):
            raise ConfigError(f"unknown split kind {self.kind!r}")


def _detect_delimiter(line):
    if "\t" in line:
        return "\t"
    if "," in line:
        return ","
    return None  # whitespace


def parse_rows(lines, delimiter=None, source="<input>"):
    """Split delimited text rows into a list of string-field lists.

    Blank lines are skipped. Raises :class:`FormatError` on ragged rows.
    """
    rows = []
    width = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip("\r\n")
        if not line.strip():
            continue
        if delimiter is None and not rows and width is None:
            delimiter = _detect_delimiter(line)
        fields = line.split(delimiter) if delimiter else line.split()
        fields = [f.strip() for f in fields]
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise FormatError(
                f"{source}: row {lineno} has {len(fields)} fields, expected {width}"
            )
        rows.append((lineno, fields))
    if not rows:
        raise EmptyInputError(f"{source}: no data rows")
    return rows


def _to_matrix(rows, first_col, source):
    values = np.empty((len(rows), len(rows[0][1]) - first_col))
    for r, (lineno, fields) in enumerate(rows):
        try:
            values[r] = [float(v) for v in fields[first_col:]]
        except ValueError:
            for c, v in enumerate(fields[first_col:], start=first_col):
                try:
                    float(v)
                except ValueError:
                    raise ParseError(
                        f"{source}: row {lineno}, column {c}: cannot parse {v!r}"
                    ) from None
        bad = ~np.isfinite(values[r])
        if bad.any():
            c = int(np.flatnonzero(bad)[0]) + first_col
            raise ParseError(
                f"{source}: row {lineno}, column {c}: non-finite value {fields[c]!r}"
            )
    return values


def load_dataset(path, delimiter=None, label_position="first_column", name=None):
    """Read a UCR-style delimited file.

    Each row holds one instance; field 0 is the class label and the
    remaining fields are the series values. The delimiter is detected from
    the first line (tab, comma, else whitespace) unless given.

    Labels are mapped to dense ids in order of first appearance.
    """
    if label_position != "first_column":
        raise ValueError(f"unsupported label_position {label_position!r}")
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = parse_rows(fh, delimiter, source=str(path))
    if len(rows[0][1]) < 3:
        raise FormatError(f"{path}: rows need a label and at least 2 values")
    series = _to_matrix(rows, 1, str(path))
    class_names = []
    lookup = {}
    labels = np.empty(len(rows), dtype=np.int64)
    for i, (_, fields) in enumerate(rows):
        label = _canonical_label(fields[0])
        if label not in lookup:
            lookup[label] = len(class_names)
            class_names.append(label)
        labels[i] = lookup[label]
    if name is None:
        name = path.stem
        for suffix in ("_TRAIN", "_TEST"):
            if name.endswith(suffix):
                name = name[: -len(suffix)]
    return TimeSeriesDataset(series, labels, tuple(class_names), name)


def _canonical_label(text):
    # "1", "1.0" and "1e0" name the same class in UCR files
    try:
        value = float(text)
    except ValueError:
        return text
    if np.isfinite(value) and value == int(value):
        return str(int(value))
    return text


def znormalize(ds):
    """Z-normalize every series (population standard deviation).

    Constant series map to all zeros.
    """
    return TimeSeriesDataset(znormalize_rows(ds.series), ds.labels, ds.class_names, ds.name)


def znormalize_rows(x):
    x = np.asarray(x, dtype=np.float64)
    mu = x.mean(axis=1, keepdims=True)
    sigma = x.std(axis=1, keepdims=True)
    return (x - mu) / np.maximum(sigma, NORM_EPS)


def _stream_seed(seed, *keys):
    """Derive an independent seed sequence from a master seed and keys."""
    words = [int(seed)]
    for key in keys:
        if isinstance(key, str):
            words.append(zlib.crc32(key.encode("utf-8")))
        else:
            words.append(int(key))
    return np.random.SeedSequence(words)


def stratified_resample(ds_train, ds_test, resample_id, seed=0):
    """Re-split pooled train+test instances, keeping per-class train counts.

    ``resample_id == 0`` returns the original split unchanged.
    """
    if ds_train.class_names != ds_test.class_names:
        # align test labels to the train vocabulary where possible
        ds_test = _align_classes(ds_test, ds_train.class_names)
    if ds_train.length != ds_test.length:
        raise ShapeError(
            f"train length {ds_train.length} != test length {ds_test.length}"
        )
    if resample_id == 0:
        return ds_train, ds_test
    x = np.concatenate([ds_train.series, ds_test.series])
    y = np.concatenate([ds_train.labels, ds_test.labels])
    quota = ds_train.class_counts()
    rng = np.random.default_rng(_stream_seed(seed, ds_train.name, resample_id))
    train_idx = []
    for c in range(ds_train.n_classes):
        members = np.flatnonzero(y == c)
        if len(members) < quota[c]:
            raise StratificationError(
                f"class {ds_train.class_names[c]!r} has {len(members)} instances, "
                f"train quota is {quota[c]}"
            )
        train_idx.append(rng.permutation(members)[: quota[c]])
    train_idx = np.sort(np.concatenate(train_idx))
    test_mask = np.ones(len(y), dtype=bool)
    test_mask[train_idx] = False
    test_idx = np.flatnonzero(test_mask)
    return (
        TimeSeriesDataset(x[train_idx], y[train_idx], ds_train.class_names, ds_train.name),
        TimeSeriesDataset(x[test_idx], y[test_idx], ds_train.class_names, ds_test.name),
    )


def _align_classes(ds, class_names):
    lookup = {c: i for i, c in enumerate(class_names)}
    missing = [c for c in ds.class_names if c not in lookup]
    if missing:
        raise ShapeError(f"classes {missing} are absent from the training set")
    remap = np.array([lookup[c] for c in ds.class_names])
    return TimeSeriesDataset(ds.series, remap[ds.labels], tuple(class_names), ds.name)


def make_splits(labels: Sequence[int], spec: SplitSpec):
    """Stratified train/validation index splits for the selection module.

    Returns ``k * nr`` pairs ``(train_indices, validation_indices)``. With
    ``n <= mds`` they come from ``nr`` independently shuffled stratified
    k-folds; otherwise from stratified shuffle splits whose train and
    validation parts both hold ``mds // 2`` instances.
    """
    y = np.asarray(labels)
    n = len(y)
    classes, counts = np.unique(y, return_counts=True)
    kind = spec.kind
    if kind == "auto":
        kind = "repeated_stratified_kfold" if n <= spec.mds else "stratified_shuffle"
    random_state = int(_stream_seed(spec.seed, "splits").generate_state(1)[0])
    if kind == "repeated_stratified_kfold":
        small = classes[counts < spec.k]
        if len(small):
            raise StratificationError(
                f"class {small[0]!r} has {counts[counts < spec.k][0]} instances, "
                f"fewer than k={spec.k}"
            )
        splitter = RepeatedStratifiedKFold(
            n_splits=spec.k, n_repeats=spec.nr, random_state=random_state
        )
    else:
        small = classes[counts < 2]
        if len(small):
            raise StratificationError(
                f"class {small[0]!r} has a single instance; shuffle split needs 2"
            )
        half = spec.mds // 2
        if 2 * half > n:
            raise StratificationError(f"{n} instances cannot fill two halves of {half}")
        splitter = StratifiedShuffleSplit(
            n_splits=spec.k * spec.nr,
            train_size=half,
            test_size=half,
            random_state=random_state,
        )
    return [
        (np.sort(tr).astype(np.int64), np.sort(va).astype(np.int64))
        for tr, va in splitter.split(np.zeros((n, 1)), y)
    ]
