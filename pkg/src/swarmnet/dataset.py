"""Tabular ingestion: CSV loading, imputation, min-max scaling, folds, synthetic data.

Missing cells are carried as NaN inside :class:`RawTable` until imputation;
a :class:`Dataset` is complete and scaled. Labels are 0 (failed) or 1 (healthy).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError

MISSING_MARKERS = {"", "NA"}


@dataclass
class RawTable:
    """Feature matrix with possible NaN holes, plus binary labels."""

    column_names: list[str]
    features: np.ndarray  # (n_rows, n_cols), NaN marks a missing cell
    labels: np.ndarray  # (n_rows,) ints in {0, 1}

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.features.ndim != 2 or self.features.shape[1] != len(self.column_names):
            raise DataError("feature matrix width does not match column names")
        if self.features.shape[0] != self.labels.shape[0]:
            raise DataError("row count does not match label count")
        if not np.all((self.labels == 0) | (self.labels == 1)):
            raise DataError("labels must be 0 or 1")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]


@dataclass
class Dataset:
    """Complete, scaled feature matrix with labels and the scaling parameters.

    ``normalization_params`` holds one (min, max) pair per column, taken from
    the data the scaling was fitted on, so held-out rows can be mapped with
    the same affine transform and scaled values can be inverted.
    """

    features: np.ndarray
    labels: np.ndarray
    column_names: list[str]
    normalization_params: list[tuple[float, float]]

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.features.ndim != 2:
            raise DataError("features must be a 2-d matrix")
        if self.features.shape[0] != self.labels.shape[0]:
            raise DataError("row count does not match label count")
        if self.features.shape[1] != len(self.column_names):
            raise DataError("feature matrix width does not match column names")
        if len(self.normalization_params) != len(self.column_names):
            raise DataError("normalization params width does not match columns")
        if np.isnan(self.features).any():
            raise DataError("dataset contains missing values")
        if not np.all((self.labels == 0) | (self.labels == 1)):
            raise DataError("labels must be 0 or 1")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass
class FoldPlan:
    """Assignment of every row index to one of k mutually exclusive folds."""

    k: int
    assignments: np.ndarray  # (n_rows,) fold ids in [0, k)

    def __post_init__(self):
        self.assignments = np.asarray(self.assignments, dtype=int)
        if self.k < 1:
            raise DataError("fold count must be >= 1")
        if self.assignments.min(initial=0) < 0 or self.assignments.max(initial=0) >= self.k:
            raise DataError("fold ids out of range")
        counts = np.bincount(self.assignments, minlength=self.k)
        if counts.max() - counts.min() > 1:
            raise DataError("fold sizes differ by more than 1")

    @property
    def n_rows(self) -> int:
        return self.assignments.shape[0]


def _parse_cell(text: str, path, line_no: int, column: str) -> float:
    value = text.strip()
    if value in MISSING_MARKERS:
        return float("nan")
    try:
        return float(value)
    except ValueError:
        raise DataError(f"{path}:{line_no}: cannot parse {column}={value!r} as a number") from None


def load_csv(path, label_column: str, feature_columns=None) -> RawTable:
    """Read a header-first CSV into a RawTable.

    Missing cells are the empty string or "NA". When ``feature_columns`` is
    None, every non-label header column is used, in header order.
    """
    try:
        handle = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not in header {header}")
        if feature_columns is None:
            feature_columns = [h for h in header if h != label_column]
        feature_columns = list(feature_columns)
        for name in feature_columns:
            if name not in header:
                raise DataError(f"{path}: unknown feature column {name!r}")
        label_idx = header.index(label_column)
        feature_idx = [header.index(name) for name in feature_columns]

        rows, labels = [], []
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise DataError(
                    f"{path}:{line_no}: row has {len(record)} fields, header has {len(header)}"
                )
            raw_label = record[label_idx].strip()
            if raw_label not in ("0", "1"):
                raise DataError(f"{path}:{line_no}: label {raw_label!r} is not 0 or 1")
            labels.append(int(raw_label))
            rows.append(
                [_parse_cell(record[i], path, line_no, header[i]) for i in feature_idx]
            )
    if not rows:
        raise DataError(f"{path}: no data rows")
    return RawTable(feature_columns, np.array(rows, dtype=float), np.array(labels, dtype=int))


def impute_mean(table: RawTable) -> RawTable:
    """Replace every missing cell with the mean of its column's present values."""
    features = table.features.copy()
    for j, name in enumerate(table.column_names):
        column = features[:, j]
        missing = np.isnan(column)
        if missing.all():
            raise DataError(f"column {name!r} has no observed values to impute from")
        if missing.any():
            column[missing] = column[~missing].mean()
    return RawTable(list(table.column_names), features, table.labels.copy())


def drop_missing_rows(table: RawTable) -> RawTable:
    """Remove every row that has at least one missing cell."""
    keep = ~np.isnan(table.features).any(axis=1)
    if not keep.any():
        raise DataError("every row has missing values; nothing left after dropping")
    return RawTable(list(table.column_names), table.features[keep], table.labels[keep])


def fit_minmax(features: np.ndarray) -> list[tuple[float, float]]:
    """Per-column (min, max) pairs for min-max scaling."""
    features = np.asarray(features, dtype=float)
    return [(float(col.min()), float(col.max())) for col in features.T]


def apply_minmax(features: np.ndarray, params) -> np.ndarray:
    """Map each column by x -> (x - min) / (max - min); constant columns go to 0."""
    features = np.asarray(features, dtype=float)
    out = np.empty_like(features)
    for j, (lo, hi) in enumerate(params):
        span = hi - lo
        if span == 0.0:
            out[:, j] = 0.0
        else:
            out[:, j] = (features[:, j] - lo) / span
    return out


def denormalize(features: np.ndarray, params) -> np.ndarray:
    """Invert :func:`apply_minmax` using the stored per-column (min, max) pairs."""
    features = np.asarray(features, dtype=float)
    out = np.empty_like(features)
    for j, (lo, hi) in enumerate(params):
        out[:, j] = features[:, j] * (hi - lo) + lo
    return out


def compose_minmax(outer, inner) -> list[tuple[float, float]]:
    """Collapse two chained min-max transforms into one raw-space (min, max) list.

    ``outer`` maps raw values to a first scaled space, ``inner`` rescales that
    space. The result maps raw values directly to the final space; a zero span
    at either stage yields a zero-span pair (the constant-column rule applies).
    """
    composed = []
    for (lo0, hi0), (lo1, hi1) in zip(outer, inner):
        span0, span1 = hi0 - lo0, hi1 - lo1
        if span0 == 0.0 or span1 == 0.0:
            composed.append((lo0, lo0))
        else:
            lo = lo0 + lo1 * span0
            composed.append((lo, lo + span0 * span1))
    return composed


def normalize_minmax(table: RawTable) -> Dataset:
    """Scale a complete table into [0, 1] per column and record the parameters."""
    if np.isnan(table.features).any():
        raise DataError("table still has missing values; impute or drop rows first")
    params = fit_minmax(table.features)
    return Dataset(
        apply_minmax(table.features, params),
        table.labels.copy(),
        list(table.column_names),
        params,
    )


def make_folds(n_rows: int, k: int, seed: int) -> FoldPlan:
    """Randomly assign rows to k folds whose sizes differ by at most one."""
    if n_rows < 1:
        raise DataError("need at least one row")
    if k < 1:
        raise DataError("fold count must be >= 1")
    if k > n_rows:
        raise DataError(f"cannot split {n_rows} rows into {k} folds")
    rng = np.random.default_rng(seed)
    assignments = np.empty(n_rows, dtype=int)
    assignments[rng.permutation(n_rows)] = np.arange(n_rows) % k
    return FoldPlan(k, assignments)


def split(dataset: Dataset, plan: FoldPlan, test_fold: int):
    """Partition a dataset into (train, test) for one fold rotation.

    Row order inside each part follows the original dataset. The scaling
    parameters are inherited; re-fit them on the train part before training
    to keep the held-out fold out of the scaling statistics.
    """
    if plan.n_rows != dataset.n_rows:
        raise DataError("fold plan does not match the dataset row count")
    if plan.k == 1:
        raise ValueError("k=1 leaves an empty training set")
    if not 0 <= test_fold < plan.k:
        raise ValueError(f"test fold {test_fold} out of range [0, {plan.k})")
    test_mask = plan.assignments == test_fold
    parts = []
    for mask in (~test_mask, test_mask):
        parts.append(
            Dataset(
                dataset.features[mask],
                dataset.labels[mask],
                list(dataset.column_names),
                list(dataset.normalization_params),
            )
        )
    return parts[0], parts[1]


def generate_synthetic(
    n_per_class: int, n_features: int, separation: float, seed: int
) -> Dataset:
    """Two unit-variance Gaussian clusters, min-max scaled.

    Class 0 is centered at the origin, class 1 at (separation, ..., separation).
    Rows are the class-0 block followed by the class-1 block; fold assignment
    shuffles later, so the block order carries no information leak.
    """
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    if n_features < 1:
        raise ValueError("n_features must be >= 1")
    if separation < 0:
        raise ValueError("separation must be >= 0")
    rng = np.random.default_rng(seed)
    class0 = rng.normal(0.0, 1.0, size=(n_per_class, n_features))
    class1 = rng.normal(separation, 1.0, size=(n_per_class, n_features))
    raw = np.vstack([class0, class1])
    labels = np.concatenate([np.zeros(n_per_class, int), np.ones(n_per_class, int)])
    params = fit_minmax(raw)
    names = [f"f{j}" for j in range(n_features)]
    return Dataset(apply_minmax(raw, params), labels, names, params)
