"""Score thresholding, ROC sweeps, and equal error rate.

Anomaly scores are squared residual norms; larger means more anomalous. A
threshold turns scores into detections with a strict greater-than test, the
ROC curve sweeps every distinct score value, and the equal error rate is the
false-alarm rate at the sweep point where missing and false-alarming are
closest to balanced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTruthError


def _as_scores(scores, name: str = "scores") -> np.ndarray:
    arr = np.asarray(scores, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got ndim={arr.ndim}")
    if arr.size < 1:
        raise ValueError(f"{name} must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


@dataclass(frozen=True)
class GroundTruth:
    """Binary anomaly labels derived from a score ranking."""

    labels: np.ndarray  # bool (m,)
    positive_indices: np.ndarray  # int (n_pos,), most anomalous first
    percentile: float

    @property
    def n_positive(self) -> int:
        return int(self.positive_indices.size)


def make_ground_truth(scores, percentile: float) -> GroundTruth:
    """Label the top fraction of scores as anomalous.

    The positive count is ceil(percentile * m), computed with a tiny slack so
    that products like 0.01 * 300 that land a float ulp above an integer do
    not round an extra sample in. Ties in score go to the lower index.
    """
    s = _as_scores(scores)
    if s.size < 2:
        raise ValueError("need at least 2 scores to split into two classes")
    if not 0.0 < percentile < 1.0:
        raise ValueError(f"percentile must be in (0, 1), got {percentile}")
    m = s.size
    n_pos = max(1, math.ceil(percentile * m - 1e-9))
    order = np.argsort(-s, kind="stable")
    positive = order[:n_pos]
    labels = np.zeros(m, dtype=bool)
    labels[positive] = True
    return GroundTruth(labels=labels, positive_indices=positive, percentile=float(percentile))


def detect(scores, threshold: float) -> np.ndarray:
    """Boolean detections: score strictly above the threshold."""
    s = _as_scores(scores)
    t = float(threshold)
    if math.isnan(t):
        raise ValueError("threshold must not be NaN")
    return s > t


@dataclass(frozen=True)
class RocCurve:
    """ROC sweep: one (false-alarm rate, true-positive rate) point per
    distinct operating threshold, duplicates collapsed."""

    points: np.ndarray  # (q, 2) columns far, tpr; starts (0,0), ends (1,1)
    thresholds: np.ndarray  # (q,) threshold producing each point

    @property
    def far(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def tpr(self) -> np.ndarray:
        return self.points[:, 1]


def _as_labels(truth, m: int) -> np.ndarray:
    if isinstance(truth, GroundTruth):
        labels = truth.labels
    else:
        labels = np.asarray(truth)
        if labels.dtype != np.bool_:
            raise ValueError("truth labels must be boolean")
    if labels.shape != (m,):
        raise ValueError(f"truth labels shape {labels.shape} does not match {m} scores")
    return labels


def roc_curve(scores, truth) -> RocCurve:
    """Sweep thresholds from +inf down through every distinct score to -inf.

    Detection is strict greater-than, so the +inf end detects nothing (0, 0)
    and the -inf end detects everything (1, 1). Consecutive sweep points with
    identical rates keep only the first (largest) threshold.
    """
    s = _as_scores(scores)
    labels = _as_labels(truth, s.size)
    n_pos = int(labels.sum())
    n_neg = s.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateTruthError(
            f"ROC needs both classes, got {n_pos} positive / {n_neg} negative"
        )

    distinct = np.unique(s)[::-1]
    thresholds = np.concatenate([[np.inf], distinct, [-np.inf]])

    all_sorted = np.sort(s)
    pos_sorted = np.sort(s[labels])
    # count of scores strictly above each threshold
    predicted = s.size - np.searchsorted(all_sorted, thresholds, side="right")
    tp = n_pos - np.searchsorted(pos_sorted, thresholds, side="right")
    fp = predicted - tp
    points = np.column_stack([fp / n_neg, tp / n_pos])

    keep = np.ones(points.shape[0], dtype=bool)
    keep[1:] = np.any(points[1:] != points[:-1], axis=1)
    return RocCurve(points=points[keep], thresholds=thresholds[keep])


def equal_error_rate(curve: RocCurve) -> float:
    """False-alarm rate at the sweep point where it best matches the miss rate.

    The sweep is discrete, so exact equality of the two rates may not occur;
    the point minimizing their absolute difference is used, ties resolved
    toward the smaller false-alarm rate.
    """
    far = curve.far
    gap = np.abs(far - (1.0 - curve.tpr))
    best = np.lexsort((far, gap))[0]
    return float(far[best])
