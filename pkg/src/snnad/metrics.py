"""Threshold-based evaluation metrics for anomaly detection signals.

Zero-division conventions are pessimistic: rates with an empty denominator
are 0, and F1 is 0 whenever there are no true positives or no positive
predictions. The ROC and its area use every distinct score value as a
threshold (exact curve); the 10-point uniform grid applies only to the
G-Mean/F1 threshold sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detector import apply_threshold, maybe_smooth, threshold_grid
from .errors import LengthMismatch, SingleClass

DEFAULT_SMOOTHING_WINDOWS = (None, 100, 200, 300)
DEFAULT_THRESHOLD_COUNT = 10


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def tpr(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def fpr(self) -> float:
        return self.fp / (self.tn + self.fp) if self.tn + self.fp else 0.0

    @property
    def tnr(self) -> float:
        return self.tn / (self.tn + self.fp) if self.tn + self.fp else 0.0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0


def confusion(alerts, labels) -> ConfusionCounts:
    alerts = np.asarray(alerts, dtype=bool)
    labels = np.asarray(labels, dtype=bool)
    if alerts.shape != labels.shape:
        raise LengthMismatch(f"{alerts.shape} vs {labels.shape}")
    tp = int(np.sum(alerts & labels))
    fp = int(np.sum(alerts & ~labels))
    fn = int(np.sum(~alerts & labels))
    tn = int(np.sum(~alerts & ~labels))
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def g_mean(c: ConfusionCounts) -> float:
    return math.sqrt(c.tpr * c.tnr)


def f1(c: ConfusionCounts) -> float:
    if c.tp == 0:
        return 0.0
    p, r = c.precision, c.tpr
    return 2 * p * r / (p + r)


def _roc_points(scores: np.ndarray, labels: np.ndarray):
    """Exact ROC: one operating point per distinct score threshold (strict
    ``score > t`` alerts), plus the all-alert endpoint.

    Returns (fpr, tpr, thresholds) sorted from no-alerts to all-alerts.
    """
    pos = labels
    neg = ~labels
    n_pos = int(pos.sum())
    n_neg = int(neg.sum())
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("ROC needs both classes present")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    tp = np.cumsum(pos[order])
    fp = np.cumsum(neg[order])
    # Last index of each run of equal scores = counts for threshold just
    # below that score value.
    distinct = np.flatnonzero(np.diff(sorted_scores) != 0)
    last = np.concatenate([distinct, [len(scores) - 1]])
    tpr = np.concatenate([[0.0], tp[last] / n_pos])
    fpr = np.concatenate([[0.0], fp[last] / n_neg])
    thresholds = np.concatenate([[sorted_scores[0]], sorted_scores[last]])
    return fpr, tpr, thresholds


def auc(scores, labels) -> float:
    """Area under the exact ROC curve by trapezoidal integration."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape:
        raise LengthMismatch(f"{scores.shape} vs {labels.shape}")
    fpr, tpr, _ = _roc_points(scores, labels)
    trapezoid = getattr(np, "trapezoid", np.trapz)
    return float(trapezoid(tpr, fpr))


def youden_threshold(scores, labels) -> float:
    """Threshold maximizing TPR - FPR over the ROC sweep; ties resolve to
    the larger threshold (fewer alerts)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    fpr, tpr, thresholds = _roc_points(scores, labels)
    # Candidate thresholds are the distinct score values. With strict
    # ``score > theta`` alerts, theta equal to the k-th distinct score
    # (descending) realizes the ROC point just before that score is included.
    j = (tpr - fpr)[:-1]
    candidates = thresholds[1:]
    best_j = j.max()
    qualifying = candidates[j >= best_j - 1e-12]
    return float(qualifying.max())


@dataclass
class MetricChoice:
    value: float
    smoothing: int | None = None
    threshold: float | None = None


@dataclass
class MetricsReport:
    g_mean: MetricChoice
    f1: MetricChoice
    auc: MetricChoice | None
    youden_threshold: float | None

    def to_json(self) -> dict:
        def choice(c):
            if c is None:
                return None
            return {"value": c.value, "smoothing": c.smoothing,
                    "threshold": c.threshold}

        return {"g_mean": choice(self.g_mean), "f1": choice(self.f1),
                "auc": choice(self.auc),
                "youden_threshold": self.youden_threshold}


def evaluate_run(counts, labels,
                 smoothing_options=DEFAULT_SMOOTHING_WINDOWS,
                 threshold_count: int = DEFAULT_THRESHOLD_COUNT) -> MetricsReport:
    """Sweep smoothing windows and the uniform threshold grid, keeping the
    best smoothing/threshold pair per metric independently. AUC is computed
    directly on each smoothed signal (no grid) and the best window kept;
    it is omitted (None) when only one class is present.
    """
    counts = np.asarray(counts, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if counts.shape != labels.shape:
        raise LengthMismatch(f"{counts.shape} vs {labels.shape}")
    best_g = MetricChoice(-1.0)
    best_f = MetricChoice(-1.0)
    best_a: MetricChoice | None = None
    youden = None
    single_class = bool(labels.all() or not labels.any())
    for window in smoothing_options:
        sig = maybe_smooth(counts, window)
        for theta in threshold_grid(sig, threshold_count):
            c = confusion(apply_threshold(sig, theta), labels)
            g = g_mean(c)
            f = f1(c)
            if g > best_g.value:
                best_g = MetricChoice(g, window, float(theta))
            if f > best_f.value:
                best_f = MetricChoice(f, window, float(theta))
        if not single_class:
            a = auc(sig, labels)
            if best_a is None or a > best_a.value:
                best_a = MetricChoice(a, window)
                youden = youden_threshold(sig, labels)
    return MetricsReport(g_mean=best_g, f1=best_f, auc=best_a,
                         youden_threshold=youden)
