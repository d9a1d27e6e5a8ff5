"""Dataset loading, standardization, stratified splitting and correlations."""

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from .errors import (
    DegenerateSplitError,
    DimensionMismatchError,
    EmptyDatasetError,
    EmptyFileError,
    MissingTargetError,
    ParseError,
    ZeroVarianceError,
)

TARGET_COLUMN = "target"
REFERENCE_CSV = "wisconsin.csv"


@dataclass
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: list
    # original row positions, kept through splits
    index: np.ndarray = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 2:
            raise DimensionMismatchError(f"features must be 2-D, got shape {self.features.shape}")
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        self.feature_names = list(self.feature_names)
        if self.labels.shape[0] != self.features.shape[0]:
            raise DimensionMismatchError(
                f"{self.labels.shape[0]} labels for {self.features.shape[0]} rows"
            )
        if self.features.shape[1] != len(self.feature_names):
            raise DimensionMismatchError(
                f"{len(self.feature_names)} names for {self.features.shape[1]} columns"
            )
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("feature names must be unique")
        if not np.all((self.labels == 0) | (self.labels == 1)):
            raise ValueError("labels must be 0 or 1")
        if self.index is None:
            self.index = np.arange(self.features.shape[0])
        else:
            self.index = np.asarray(self.index, dtype=np.int64)

    def __len__(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def subset(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.features[rows], self.labels[rows], self.feature_names, self.index[rows])

    def with_features(self, features):
        return Dataset(features, self.labels.copy(), self.feature_names, self.index.copy())


def load_csv(path):
    """Read a header + numeric rows CSV whose last column is ``target`` (0/1)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFileError(f"{path} is empty") from None
        header = [h.strip() for h in header]
        if not header or header[-1] != TARGET_COLUMN:
            raise MissingTargetError(f"last column of {path} must be {TARGET_COLUMN!r}")
        names = header[:-1]
        feats, labels = [], []
        for row_no, cells in enumerate(reader, start=1):
            line = reader.line_num
            if not cells:
                continue
            if len(cells) != len(header):
                raise ParseError(f"expected {len(header)} cells, got {len(cells)}", row=row_no, line=line)
            values = []
            for name, cell in zip(names, cells):
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(f"non-numeric value {cell!r}", row=row_no, line=line, column=name) from None
                if not math.isfinite(v):
                    raise ParseError(f"non-finite value {cell!r}", row=row_no, line=line, column=name)
                values.append(v)
            t = cells[-1].strip()
            if t not in ("0", "1", "0.0", "1.0"):
                raise ParseError(f"target must be 0 or 1, got {t!r}", row=row_no, line=line, column=TARGET_COLUMN)
            feats.append(values)
            labels.append(int(float(t)))
    if not feats:
        raise EmptyFileError(f"{path} has a header but no data rows")
    return Dataset(np.array(feats), np.array(labels), names)


def write_csv(data, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(data.feature_names) + [TARGET_COLUMN])
        for row, t in zip(data.features, data.labels):
            w.writerow([repr(float(v)) for v in row] + [int(t)])


def reference_path():
    return resources.files("learngrad") / "data" / REFERENCE_CSV


def load_reference():
    """The bundled Wisconsin diagnostic breast-cancer table (569 x 30, 0 = malignant)."""
    with resources.as_file(reference_path()) as p:
        return load_csv(p)


@dataclass
class StandardizationParams:
    mean: np.ndarray
    std: np.ndarray
    feature_names: list = field(default_factory=list)


def fit_standardizer(train):
    """Per-feature mean and sample (n-1) standard deviation."""
    if len(train) == 0:
        raise EmptyDatasetError("cannot fit a standardizer on zero rows")
    mean = train.features.mean(axis=0)
    if len(train) < 2:
        raise ZeroVarianceError(train.feature_names[0])
    std = train.features.std(axis=0, ddof=1)
    for name, s in zip(train.feature_names, std):
        if not s > 0:
            raise ZeroVarianceError(name)
    return StandardizationParams(mean, std, list(train.feature_names))


def apply_standardizer(params, data):
    if data.n_features != params.mean.shape[0]:
        raise DimensionMismatchError(
            f"standardizer fitted on {params.mean.shape[0]} features, data has {data.n_features}"
        )
    return data.with_features((data.features - params.mean) / params.std)


def invert_standardizer(params, data):
    if data.n_features != params.mean.shape[0]:
        raise DimensionMismatchError(
            f"standardizer fitted on {params.mean.shape[0]} features, data has {data.n_features}"
        )
    return data.with_features(data.features * params.std + params.mean)


def _round_half_up(q):
    return math.floor(q + Fraction(1, 2))


def stratified_split(data, test_fraction=0.2, seed=0):
    """Per-class proportional train/test split.

    The test set gets round-half-up(n * test_fraction) rows, shared among
    classes by largest remainder (ties go to the larger class, then the lower
    label), so each class is within one row of its proportional share.
    """
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    frac = Fraction(test_fraction)
    n = len(data)
    total = _round_half_up(n * frac)
    classes = [0, 1]
    members = {c: np.flatnonzero(data.labels == c) for c in classes}
    quotas = {c: len(members[c]) * frac for c in classes}
    counts = {c: math.floor(quotas[c]) for c in classes}
    leftover = total - sum(counts.values())
    order = sorted(classes, key=lambda c: (-(quotas[c] - counts[c]), -len(members[c]), c))
    for c in order[:leftover]:
        counts[c] += 1
    for c in classes:
        if counts[c] < 1 or counts[c] >= len(members[c]):
            raise DegenerateSplitError(
                f"class {c} with {len(members[c])} rows would leave an empty train or test side"
            )
    rng = np.random.default_rng(seed)
    test_rows = []
    for c in classes:
        shuffled = rng.permutation(members[c])
        test_rows.extend(shuffled[: counts[c]].tolist())
    test_rows = np.sort(np.array(test_rows, dtype=np.int64))
    mask = np.ones(n, dtype=bool)
    mask[test_rows] = False
    return data.subset(np.flatnonzero(mask)), data.subset(test_rows)


def correlation_matrix(data):
    """Pearson correlation between every pair of feature columns."""
    x = data.features if isinstance(data, Dataset) else np.asarray(data, dtype=np.float64)
    names = data.feature_names if isinstance(data, Dataset) else [str(i) for i in range(x.shape[1])]
    if x.shape[0] < 2:
        raise EmptyDatasetError("correlation needs at least two rows")
    centered = x - x.mean(axis=0)
    norms = np.sqrt(np.sum(centered * centered, axis=0))
    for name, s in zip(names, norms):
        if not s > 0:
            raise ZeroVarianceError(name)
    unit = centered / norms
    r = unit.T @ unit
    r = (r + r.T) / 2.0
    np.fill_diagonal(r, 1.0)
    return np.clip(r, -1.0, 1.0)


def write_matrix_csv(matrix, names, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature"] + list(names))
        for name, row in zip(names, matrix):
            w.writerow([name] + [f"{v:.10g}" for v in row])


def read_matrix_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        names = next(reader)[1:]
        rows = [[float(v) for v in cells[1:]] for cells in reader if cells]
    return names, np.array(rows)


def prepare(data, test_fraction=0.2, seed=0):
    """Split, then standardize both sides with statistics fitted on the train side."""
    train, test = stratified_split(data, test_fraction, seed)
    params = fit_standardizer(train)
    return apply_standardizer(params, train), apply_standardizer(params, test), params
