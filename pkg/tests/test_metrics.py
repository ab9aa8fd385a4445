import numpy as np
import pytest

from snnad.errors import LengthMismatch, SingleClass
from snnad.metrics import (
    ConfusionCounts,
    auc,
    confusion,
    evaluate_run,
    f1,
    g_mean,
    youden_threshold,
)


def auc_pairwise(scores, labels):
    """Oracle: Mann-Whitney ranking statistic, ties counted one half."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    pos = scores[labels]
    neg = scores[~labels]
    wins = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                wins += 1.0
            elif p == n:
                wins += 0.5
    return wins / (len(pos) * len(neg))


class TestConfusion:
    def test_all_correct(self):
        c = confusion([True, False], [True, False])
        assert (c.tpr, c.tnr) == (1.0, 1.0)

    def test_no_alerts(self):
        c = confusion([False, False], [True, False])
        assert c.tp == 0 and c.tpr == 0.0

    def test_direct_count(self):
        c = confusion([True, False, True, False], [True, True, False, False])
        assert (c.tp, c.fn, c.fp, c.tn) == (1, 1, 1, 1)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            confusion([True], [True, False])

    def test_zero_division_conventions(self):
        no_pos = confusion([False, True], [False, False])
        assert no_pos.tpr == 0.0
        no_neg = confusion([False, True], [True, True])
        assert no_neg.tnr == 0.0


class TestGMeanF1:
    def test_perfect(self):
        c = ConfusionCounts(tp=5, fp=0, tn=5, fn=0)
        assert g_mean(c) == 1.0
        assert f1(c) == 1.0

    def test_zero_tpr_zeroes_gmean(self):
        assert g_mean(ConfusionCounts(tp=0, fp=1, tn=3, fn=2)) == 0.0

    def test_half_half(self):
        c = ConfusionCounts(tp=1, fp=1, tn=1, fn=1)
        assert g_mean(c) == pytest.approx(0.5)
        assert f1(c) == pytest.approx(0.5)

    def test_f1_zero_when_no_tp(self):
        assert f1(ConfusionCounts(tp=0, fp=0, tn=5, fn=5)) == 0.0
        assert f1(ConfusionCounts(tp=0, fp=3, tn=2, fn=5)) == 0.0


class TestAuc:
    def test_known_value(self):
        assert auc([0.1, 0.4, 0.35, 0.8], [False, False, True, True]) == \
            pytest.approx(0.75)

    def test_perfect_separation(self):
        assert auc([0.1, 0.2, 0.8, 0.9], [False, False, True, True]) == 1.0

    def test_single_class_rejected(self):
        with pytest.raises(SingleClass):
            auc([0.1, 0.2], [True, True])

    def test_constant_scores_half(self):
        assert auc([1.0, 1.0, 1.0, 1.0], [True, False, True, False]) == \
            pytest.approx(0.5)

    def test_matches_pairwise_oracle(self):
        rng = np.random.default_rng(99)
        for _ in range(100):
            n = rng.integers(5, 200)
            scores = rng.choice([0.0, 0.25, 0.5, 1.0, 2.0], size=n) \
                if rng.random() < 0.5 else rng.normal(size=n)
            labels = rng.random(n) < 0.4
            if labels.all() or not labels.any():
                labels[0] = ~labels[0]
            assert auc(scores, labels) == pytest.approx(
                auc_pairwise(scores, labels), abs=1e-9)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(5)
        scores = rng.normal(size=80)
        labels = rng.random(80) < 0.3
        labels[0] = True
        labels[1] = False
        assert auc(np.exp(scores), labels) == pytest.approx(
            auc(scores, labels), abs=1e-12)


class TestYouden:
    def test_known_tie_break(self):
        # J ties at 0.5; the larger qualifying threshold wins
        assert youden_threshold([0.1, 0.4, 0.35, 0.8],
                                [False, False, True, True]) == 0.4

    def test_perfect_separation(self):
        # largest threshold achieving (TPR=1, FPR=0)
        assert youden_threshold([0.1, 0.2, 0.7, 0.9],
                                [False, False, True, True]) == 0.2

    def test_single_distinct_score(self):
        assert youden_threshold([2.0, 2.0], [True, False]) == 2.0

    def test_exhaustive_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(30):
            n = rng.integers(4, 60)
            scores = rng.choice(np.arange(6, dtype=float), size=n)
            labels = rng.random(n) < 0.5
            if labels.all() or not labels.any():
                labels[0] = ~labels[0]
            best_j, best_t = -2.0, -np.inf
            for t in sorted(set(scores)):
                c = confusion(scores > t, labels)
                j = c.tpr - c.fpr
                if j > best_j + 1e-12 or (abs(j - best_j) <= 1e-12 and t > best_t):
                    best_j, best_t = j, t
            assert youden_threshold(scores, labels) == best_t


class TestEvaluateRun:
    def test_perfect_signal(self):
        labels = np.zeros(400, dtype=bool)
        labels[100:150] = True
        counts = labels * 5.0
        report = evaluate_run(counts, labels, smoothing_options=(None,))
        assert report.g_mean.value == 1.0
        assert report.f1.value == 1.0
        assert report.auc.value == 1.0

    def test_constant_signal(self):
        labels = np.zeros(50, dtype=bool)
        labels[::3] = True
        report = evaluate_run(np.ones(50), labels, smoothing_options=(None,))
        assert report.auc.value == pytest.approx(0.5)

    def test_smoothing_choice_recorded(self):
        # sparse spikes inside the anomaly that only a windowed mean separates
        rng = np.random.default_rng(1)
        n = 2000
        labels = np.zeros(n, dtype=bool)
        labels[1000:1400] = True
        counts = (rng.random(n) < 0.05).astype(float)  # background noise
        counts[1000:1400] = (rng.random(400) < 0.5).astype(float)
        report = evaluate_run(counts, labels, smoothing_options=(None, 100))
        assert report.g_mean.smoothing == 100
        assert report.auc.smoothing == 100

    def test_single_class_auc_omitted(self):
        report = evaluate_run(np.arange(10.0), np.zeros(10, dtype=bool))
        assert report.auc is None
        assert report.youden_threshold is None
        assert report.g_mean.value == 0.0

    def test_best_not_worse_than_any_grid_member(self):
        rng = np.random.default_rng(2)
        counts = rng.integers(0, 8, size=300).astype(float)
        labels = rng.random(300) < 0.2
        report = evaluate_run(counts, labels, smoothing_options=(None,))
        from snnad.detector import apply_threshold, threshold_grid

        for theta in threshold_grid(counts, 10):
            c = confusion(apply_threshold(counts, theta), labels)
            assert report.g_mean.value >= g_mean(c) - 1e-12
            assert report.f1.value >= f1(c) - 1e-12
