"""
Expected and maximum calibration error over equal-width confidence bins.
"""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from ..exceptions import DataValidationError, EmptyInputError
from ..validators import validate_integer, validate_truth_array

DEFAULT_BINS = 10


@dataclass(frozen=True)
class CalibrationReport:
    """Per-bin reliability data; empty bins carry count 0 and zero means."""

    bin_edges: np.ndarray
    confidence: np.ndarray
    accuracy: np.ndarray
    counts: np.ndarray
    ece: float
    mce: float

    @property
    def n_samples(self) -> int:
        return int(self.counts.sum())

    @property
    def n_bins(self) -> int:
        return self.counts.shape[0]

    def to_record(self) -> Dict[str, Any]:
        return {
            "ece": self.ece,
            "mce": self.mce,
            "n_samples": self.n_samples,
            "bin_edges": self.bin_edges.tolist(),
            "confidence": self.confidence.tolist(),
            "accuracy": self.accuracy.tolist(),
            "counts": self.counts.tolist(),
        }


def ece_mce(confidences, correctness, n_bins: int = DEFAULT_BINS) -> CalibrationReport:
    """
    Bin confidences on [0,1] and compare each bin's mean confidence to its accuracy.

    Bin i holds confidences in [i/n, (i+1)/n); a confidence of exactly 1 lands
    in the last bin.

    Raises:
        EmptyInputError: no samples
        DataValidationError: sequences of different length
        ValueRangeError: confidences outside [0,1]
    """
    n_bins = validate_integer(n_bins, "n_bins", min_value=1)
    conf = validate_truth_array(confidences, "confidences").reshape(-1)
    correct = np.asarray(correctness, dtype=np.float64).reshape(-1)
    if conf.size == 0:
        raise EmptyInputError("confidences")
    if correct.shape != conf.shape:
        raise DataValidationError("correctness", f"{conf.size} values", correctness)

    idx = np.minimum((conf * n_bins).astype(int), n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    conf_sum = np.bincount(idx, weights=conf, minlength=n_bins)
    acc_sum = np.bincount(idx, weights=correct, minlength=n_bins)
    filled = counts > 0
    mean_conf = np.divide(conf_sum, counts, out=np.zeros(n_bins), where=filled)
    mean_acc = np.divide(acc_sum, counts, out=np.zeros(n_bins), where=filled)

    gaps = np.abs(mean_acc - mean_conf)
    ece = float(np.sum(counts / conf.size * gaps))
    mce = float(gaps[filled].max())
    return CalibrationReport(
        bin_edges=np.linspace(0.0, 1.0, n_bins + 1),
        confidence=mean_conf,
        accuracy=mean_acc,
        counts=counts,
        ece=ece,
        mce=mce,
    )


def binary_calibration(probabilities, labels, n_bins: int = DEFAULT_BINS) -> CalibrationReport:
    """
    Top-label calibration of a binary classifier.

    Confidence is max(p, 1-p); a sample is correct when (p >= 0.5) matches its label.
    """
    p = validate_truth_array(probabilities, "probabilities").reshape(-1)
    y = np.asarray(labels, dtype=np.float64).reshape(-1) >= 0.5
    if y.shape != p.shape:
        raise DataValidationError("labels", f"{p.size} values", labels)
    confidence = np.maximum(p, 1.0 - p)
    correct = (p >= 0.5) == y
    return ece_mce(confidence, correct, n_bins)
