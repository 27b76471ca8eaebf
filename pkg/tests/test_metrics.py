"""
Unit Tests for calibration, classification and sweep metrics
"""

import numpy as np
import pytest

from src.utils.exceptions import EmptyInputError, InvalidInputError, ShapeMismatchError
from src.utils.metrics import (
    beta_key,
    best_thresholds,
    binary_calibration,
    classification_rates,
    coupled_sweep,
    default_thresholds,
    ece_mce,
    f_beta,
    rates_from_counts,
    siou,
    sweep,
)

SCORES = np.array([0.1, 0.4, 0.35, 0.8])
LABELS = np.array([0, 0, 1, 1])


class TestCalibration:
    """Test ECE and MCE."""

    def test_two_bins(self):
        """Each bin is off by 0.25."""
        report = ece_mce([0.25, 0.25, 0.75, 0.75], [0, 1, 1, 1], n_bins=2)
        assert report.ece == pytest.approx(0.25)
        assert report.mce == pytest.approx(0.25)
        np.testing.assert_array_equal(report.counts, [2, 2])

    def test_confidence_one_in_last_bin(self):
        """A confidence of exactly 1 is counted by the last bin."""
        report = ece_mce([1.0], [1.0], n_bins=10)
        assert report.counts[-1] == 1
        assert report.ece == 0.0

    def test_empty_bins_are_skipped(self):
        """Empty bins carry zeros and do not count toward MCE."""
        report = ece_mce([0.95, 0.95], [1, 1], n_bins=10)
        assert report.n_samples == 2
        assert report.mce == pytest.approx(0.05)

    def test_empty_input(self):
        """No samples, no calibration."""
        with pytest.raises(EmptyInputError):
            ece_mce([], [])

    def test_binary_top_label(self):
        """Confidence is max(p, 1-p); both samples are correct."""
        report = binary_calibration([0.9, 0.2], [1, 0])
        assert report.ece == pytest.approx(0.15)
        assert report.to_record()["n_samples"] == 2


class TestClassification:
    """Test classification rates and sIoU."""

    def test_confusion_counts(self):
        """One of each outcome."""
        rates = classification_rates([1, 1, 0, 0], [1, 0, 1, 0])
        assert (rates.tp, rates.fp, rates.tn, rates.fn) == (1, 1, 1, 1)
        assert rates.precision == 0.5
        assert rates.recall == 0.5
        assert rates.tnr == 0.5
        assert rates.f_scores[beta_key(1.0)] == pytest.approx(0.5)

    def test_undefined_rates(self):
        """0/0 ratios are 0 and flagged."""
        rates = rates_from_counts(0, 0, 5, 0)
        assert rates.precision == 0.0
        assert {"precision", "recall", "f1"} <= rates.undefined
        assert "tnr" not in rates.undefined

    def test_f_beta(self):
        """Small beta weights precision, large beta weights recall."""
        assert f_beta(0.5, 1.0, 1.0) == pytest.approx(2.0 / 3.0)
        assert f_beta(0.5, 1.0, 0.1) < f_beta(0.5, 1.0, 10.0)
        assert beta_key(0.1) == "f0.1"

    def test_siou(self):
        """Intersection above t_siou over the union with predictions above 0.5."""
        gt = [np.array([[1.0, 1.0], [0.0, 0.0]])]
        pred = [np.array([[0.9, 0.3], [0.6, 0.0]])]
        assert siou(gt, pred) == pytest.approx(1.0 / 3.0)
        assert siou(gt, pred, t_siou=0.95) == 0.0

    def test_siou_empty_union(self):
        """Nothing predicted, nothing true: perfect overlap."""
        assert siou([np.zeros((2, 2))], [np.zeros((2, 2))]) == 1.0

    def test_siou_errors(self):
        """No pairs or mismatched shapes fail."""
        with pytest.raises(EmptyInputError):
            siou([], [])
        with pytest.raises(ShapeMismatchError):
            siou([np.zeros((2, 2))], [np.zeros((3, 3))])


class TestSweep:
    """Test threshold sweeps."""

    def test_default_thresholds(self):
        """The linear grid has step 0.005; dense adds points near the ends."""
        linear = default_thresholds()
        assert linear.size == 201
        assert linear[0] == 0.0 and linear[-1] == 1.0
        dense = default_thresholds("dense")
        assert dense.size > linear.size
        assert dense.min() == 0.0 and dense.max() == 1.0
        with pytest.raises(InvalidInputError):
            default_thresholds("log")

    def test_auc(self):
        """AUC of the textbook example is 0.75, independent of the grid."""
        assert sweep(SCORES, LABELS).auc_roc == pytest.approx(0.75)
        assert sweep(SCORES, LABELS, thresholds=[0.5]).auc_roc == pytest.approx(0.75)

    def test_rates_at_threshold(self):
        """Scores at or above the threshold are positive."""
        result = sweep(SCORES, LABELS, thresholds=[0.35])
        assert result.recall[0] == 1.0
        assert result.precision[0] == pytest.approx(2.0 / 3.0)
        assert result.n_positive == 2 and result.n_negative == 2

    def test_single_class(self):
        """Single-class ground truth leaves AUC undefined."""
        result = sweep([0.2, 0.7], [1, 1])
        assert result.auc_roc is None
        assert not result.auc_defined

    def test_best_threshold_ties_go_low(self):
        """Of equally good thresholds the lowest wins."""
        result = sweep(SCORES, LABELS, thresholds=[0.5, 0.6, 0.7])
        threshold, score = best_thresholds(result)["f1"]
        assert threshold == 0.5
        assert score == pytest.approx(2.0 / 3.0)

    def test_rows(self):
        """Curve rows carry tpr and fpr."""
        row = sweep(SCORES, LABELS, thresholds=[0.35]).rows()[0]
        assert row["tpr"] == 1.0
        assert row["fpr"] == pytest.approx(0.5)

    def test_empty_scores(self):
        """Nothing to sweep."""
        with pytest.raises(EmptyInputError):
            sweep([], [])


class TestCoupledSweep:
    """Test sweeps whose scores depend on the threshold."""

    def test_fixed_scores_match_plain_sweep(self):
        """With threshold-independent scores both sweeps agree."""
        coupled = coupled_sweep(lambda t: (SCORES, LABELS))
        plain = sweep(SCORES, LABELS)
        np.testing.assert_allclose(coupled.precision, plain.precision)
        np.testing.assert_allclose(coupled.recall, plain.recall)
        np.testing.assert_allclose(coupled.tnr, plain.tnr)
        assert coupled.auc_roc == pytest.approx(0.75)

    def test_scores_reevaluated_per_threshold(self):
        """score_fn is called once per distinct threshold."""
        seen = []

        def score_fn(t):
            seen.append(t)
            return (np.array([1.0, 0.0]), np.array([1, 0]))

        result = coupled_sweep(score_fn, thresholds=[0.5, 0.2, 0.5])
        assert seen == [0.2, 0.5]
        assert result.auc_roc == pytest.approx(1.0)

    def test_single_class(self):
        """Single-class evaluations leave AUC undefined."""
        result = coupled_sweep(lambda t: ([0.3], [1]), thresholds=[0.5])
        assert result.auc_roc is None
        assert result.n_positive == 1


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
