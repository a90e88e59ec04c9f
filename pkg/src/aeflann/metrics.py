"""Multi-label evaluation metrics plus single-label accuracy.

Conventions, applied consistently so every value is deterministic:

* Ranks are 1-based by descending score; tied scores rank the lower
  label index first.
* In ranking loss a tied (relevant, irrelevant) pair counts as reversed.
* Rows without a relevant label are skipped by one-error, ranking loss,
  and average precision (ranking loss also skips rows without an
  irrelevant label); such rows contribute 0 to coverage.
* 0/0 is defined as 0 in the F1 scores; macro F1 averages over all C
  labels.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import DataError, ShapeError


@dataclass
class MetricsReport:
    """The eight multi-label metric values for one evaluation."""

    avg_precision: float
    hamming_loss: float
    one_error: float
    coverage: float
    ranking_loss: float
    micro_f1: float
    macro_f1: float
    subset_accuracy: float

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


METRIC_NAMES = [f.name for f in fields(MetricsReport)]


def mean_report(reports: list[MetricsReport]) -> MetricsReport:
    """Arithmetic field-wise mean of several reports."""
    if not reports:
        raise DataError("cannot average zero reports")
    return MetricsReport(
        **{name: float(np.mean([getattr(r, name) for r in reports])) for name in METRIC_NAMES}
    )


def _check_pair(y: np.ndarray, other: np.ndarray, other_binary: bool):
    y = np.asarray(y, dtype=np.float64)
    other = np.asarray(other, dtype=np.float64)
    if y.ndim != 2 or other.ndim != 2 or y.shape != other.shape:
        raise ShapeError(f"matrices must share one 2-D shape, got {y.shape} and {other.shape}")
    if np.any((y != 0.0) & (y != 1.0)):
        raise DataError("true labels must be binary")
    if other_binary and np.any((other != 0.0) & (other != 1.0)):
        raise DataError("predicted labels must be binary")
    return y, other


def rank_matrix(scores: np.ndarray) -> np.ndarray:
    """1-based rank of every label per row, descending score, ties by index."""
    scores = np.asarray(scores, dtype=np.float64)
    order = np.argsort(-scores, axis=1, kind="stable")
    ranks = np.empty_like(order)
    cols = np.arange(1, scores.shape[1] + 1)
    for i in range(scores.shape[0]):
        ranks[i, order[i]] = cols
    return ranks


def hamming_loss(y: np.ndarray, p: np.ndarray) -> float:
    y, p = _check_pair(y, p, other_binary=True)
    return float(np.mean(np.abs(y - p)))


def subset_accuracy(y: np.ndarray, p: np.ndarray) -> float:
    y, p = _check_pair(y, p, other_binary=True)
    return float(np.mean(np.all(y == p, axis=1)))


def one_error(y: np.ndarray, s: np.ndarray) -> float:
    """Fraction of rows whose top-scored label is irrelevant.

    Rows without any relevant label are skipped; 0.0 if none remain.
    """
    y, s = _check_pair(y, s, other_binary=False)
    eligible = y.sum(axis=1) > 0
    if not eligible.any():
        return 0.0
    top = np.argmax(s[eligible], axis=1)
    hits = y[eligible, top]
    return float(np.mean(hits == 0.0))


def coverage(y: np.ndarray, s: np.ndarray) -> float:
    """Mean over all rows of (max rank among relevant labels) - 1."""
    y, s = _check_pair(y, s, other_binary=False)
    ranks = rank_matrix(s)
    per_row = np.zeros(y.shape[0])
    for i in range(y.shape[0]):
        rel = y[i] == 1.0
        if rel.any():
            per_row[i] = ranks[i, rel].max() - 1
    return float(np.mean(per_row)) if y.shape[0] else 0.0


def ranking_loss(y: np.ndarray, s: np.ndarray) -> float:
    """Mean fraction of (relevant, irrelevant) pairs ranked in the wrong order.

    A tied pair counts as reversed.  Rows lacking relevant or irrelevant
    labels are skipped; 0.0 if none remain.
    """
    y, s = _check_pair(y, s, other_binary=False)
    fractions = []
    for i in range(y.shape[0]):
        rel = y[i] == 1.0
        irr = ~rel
        if not rel.any() or not irr.any():
            continue
        reversed_pairs = np.sum(s[i, rel][:, None] <= s[i, irr][None, :])
        fractions.append(reversed_pairs / (rel.sum() * irr.sum()))
    return float(np.mean(fractions)) if fractions else 0.0


def average_precision(y: np.ndarray, s: np.ndarray) -> float:
    """Label-ranking average precision.

    Per row with at least one relevant label: the mean over relevant
    labels of (relevant labels ranked at or above it) / (its rank).
    """
    y, s = _check_pair(y, s, other_binary=False)
    ranks = rank_matrix(s)
    per_row = []
    for i in range(y.shape[0]):
        rel = y[i] == 1.0
        if not rel.any():
            continue
        rel_ranks = np.sort(ranks[i, rel])
        per_row.append(np.mean(np.arange(1, len(rel_ranks) + 1) / rel_ranks))
    return float(np.mean(per_row)) if per_row else 0.0


def _f1(tp: float, fp: float, fn: float) -> float:
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom > 0 else 0.0


def micro_f1(y: np.ndarray, p: np.ndarray) -> float:
    y, p = _check_pair(y, p, other_binary=True)
    tp = float(np.sum((y == 1.0) & (p == 1.0)))
    fp = float(np.sum((y == 0.0) & (p == 1.0)))
    fn = float(np.sum((y == 1.0) & (p == 0.0)))
    return _f1(tp, fp, fn)


def macro_f1(y: np.ndarray, p: np.ndarray) -> float:
    y, p = _check_pair(y, p, other_binary=True)
    scores = []
    for j in range(y.shape[1]):
        tp = float(np.sum((y[:, j] == 1.0) & (p[:, j] == 1.0)))
        fp = float(np.sum((y[:, j] == 0.0) & (p[:, j] == 1.0)))
        fn = float(np.sum((y[:, j] == 1.0) & (p[:, j] == 0.0)))
        scores.append(_f1(tp, fp, fn))
    return float(np.mean(scores))


def accuracy(truth, predicted) -> float:
    """Fraction of exact matches between two class-index sequences."""
    truth = np.asarray(truth)
    predicted = np.asarray(predicted)
    if truth.shape != predicted.shape or truth.ndim != 1:
        raise ShapeError(f"class sequences must share one 1-D shape, got {truth.shape} and {predicted.shape}")
    return float(np.mean(truth == predicted))


def compute_report(y: np.ndarray, scores: np.ndarray, predictions: np.ndarray) -> MetricsReport:
    """All eight metrics for one (labels, scores, predictions) triple."""
    return MetricsReport(
        avg_precision=average_precision(y, scores),
        hamming_loss=hamming_loss(y, predictions),
        one_error=one_error(y, scores),
        coverage=coverage(y, scores),
        ranking_loss=ranking_loss(y, scores),
        micro_f1=micro_f1(y, predictions),
        macro_f1=macro_f1(y, predictions),
        subset_accuracy=subset_accuracy(y, predictions),
    )
