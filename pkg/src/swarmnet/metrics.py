"""Confusion counts, derived rates, and fold-rotated evaluation.

The positive class is label 1 (healthy); label 0 (failed) is negative. A 0/0
rate is reported as 0.0 and the metric's name lands in the report's
``degenerate`` tuple instead of raising, so a degenerate fold cannot abort a
whole experiment.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as dc_replace

import numpy as np

from . import trainer as trainer_mod
from .dataset import Dataset, FoldPlan, apply_minmax, compose_minmax, fit_minmax, split
from .errors import DataError
from .mlp import classify_batch


@dataclass(frozen=True)
class ConfusionMatrix:
    """TP/TN/FP/FN counts with label 1 as the positive class."""

    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn
        )


@dataclass
class MetricReport:
    """Headline rates in [0, 1]; ``degenerate`` names any 0/0 ratios."""

    accuracy: float
    precision: float
    recall: float
    specificity: float
    f_measure: float
    degenerate: tuple[str, ...] = ()
    cm: ConfusionMatrix | None = None


def confusion(predictions, labels) -> ConfusionMatrix:
    """Count agreement between binary predictions and binary labels."""
    predictions = np.asarray(predictions, dtype=int)
    labels = np.asarray(labels, dtype=int)
    if predictions.shape != labels.shape or predictions.ndim != 1:
        raise ValueError("predictions and labels must be equal-length 1-d sequences")
    if predictions.size == 0:
        raise ValueError("cannot build a confusion matrix from no rows")
    for name, values in (("predictions", predictions), ("labels", labels)):
        if not np.all((values == 0) | (values == 1)):
            raise ValueError(f"{name} must be 0 or 1")
    return ConfusionMatrix(
        tp=int(np.sum((predictions == 1) & (labels == 1))),
        tn=int(np.sum((predictions == 0) & (labels == 0))),
        fp=int(np.sum((predictions == 1) & (labels == 0))),
        fn=int(np.sum((predictions == 0) & (labels == 1))),
    )


def _rate(numerator: int, denominator: int, name: str, degenerate: list[str]) -> float:
    if denominator == 0:
        degenerate.append(name)
        return 0.0
    return numerator / denominator


def f_measure(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def compute_metrics(cm: ConfusionMatrix) -> MetricReport:
    """Accuracy, precision, recall, specificity and F-measure for one matrix."""
    if cm.total == 0:
        raise ValueError("cannot score an empty confusion matrix")
    degenerate: list[str] = []
    precision = _rate(cm.tp, cm.tp + cm.fp, "precision", degenerate)
    recall = _rate(cm.tp, cm.tp + cm.fn, "recall", degenerate)
    specificity = _rate(cm.tn, cm.tn + cm.fp, "specificity", degenerate)
    if precision + recall == 0:
        degenerate.append("f_measure")
    return MetricReport(
        accuracy=(cm.tp + cm.tn) / cm.total,
        precision=precision,
        recall=recall,
        specificity=specificity,
        f_measure=f_measure(precision, recall),
        degenerate=tuple(degenerate),
        cm=cm,
    )


def mean_report(reports) -> MetricReport:
    """Field-wise arithmetic mean of several reports; pools their matrices."""
    reports = list(reports)
    if not reports:
        raise ValueError("need at least one report to average")
    pooled = None
    for report in reports:
        if report.cm is not None:
            pooled = report.cm if pooled is None else pooled + report.cm
    degenerate = sorted({name for report in reports for name in report.degenerate})
    n = len(reports)
    return MetricReport(
        accuracy=sum(r.accuracy for r in reports) / n,
        precision=sum(r.precision for r in reports) / n,
        recall=sum(r.recall for r in reports) / n,
        specificity=sum(r.specificity for r in reports) / n,
        f_measure=sum(r.f_measure for r in reports) / n,
        degenerate=tuple(degenerate),
        cm=pooled,
    )


def cross_validate(dataset: Dataset, plan: FoldPlan, config, seed: int):
    """Rotate every fold through the test slot; train on the rest.

    Scaling statistics are re-fitted on each rotation's training rows only,
    and the held-out rows are mapped with those statistics, so the test fold
    never leaks into preprocessing. Per-fold training seeds derive from
    ``seed`` and the fold id.

    Returns (per_fold, overall) where per_fold is a list of
    (TrainedModel, MetricReport) pairs and overall averages the fold metrics
    (its ``cm`` is the pooled confusion matrix, a separate aggregation).
    """
    if plan.n_rows != dataset.n_rows:
        raise DataError("fold plan does not match the dataset row count")
    per_fold = []
    for fold in range(plan.k):
        train_part, test_part = split(dataset, plan, fold)
        params = fit_minmax(train_part.features)
        train_fold = Dataset(
            apply_minmax(train_part.features, params),
            train_part.labels,
            list(dataset.column_names),
            compose_minmax(train_part.normalization_params, params),
        )
        model = trainer_mod.train(train_fold, config, trainer_mod.derive_seed(seed, fold))
        test_features = apply_minmax(test_part.features, params)
        predictions = classify_batch(model.topology, model.weights, test_features)
        report = compute_metrics(confusion(predictions, test_part.labels))
        per_fold.append((model, report))
    overall = mean_report(report for _, report in per_fold)
    return per_fold, overall
