"""
Threshold sweeps over continuous scores.

A score counts as a positive prediction when score >= threshold. ROC AUC
is computed from the full score ranking, so it equals the Mann-Whitney
statistic independently of the sweep grid.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import auc, roc_curve

from ..exceptions import DataValidationError, EmptyInputError, InvalidInputError
from ..logging_utils import LogCategory, get_category_logger
from .classification import DEFAULT_BETAS, safe_ratio, beta_key, f_beta

logger = get_category_logger(LogCategory.METRICS)

LINEAR_STEP = 0.005


def default_thresholds(kind: str = "linear") -> np.ndarray:
    """
    linear: 0, 0.005, ..., 1.
    dense: linear plus log-spaced points towards 0 and 1.
    """
    linear = np.round(np.linspace(0.0, 1.0, int(round(1.0 / LINEAR_STEP)) + 1), 12)
    if kind == "linear":
        return linear
    if kind == "dense":
        eps = np.logspace(-6, np.log10(LINEAR_STEP), 16)
        return np.unique(np.concatenate([linear, eps, 1.0 - eps]))
    raise InvalidInputError("thresholds", "must be 'linear' or 'dense'", kind)


@dataclass(frozen=True)
class SweepResult:
    thresholds: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    tnr: np.ndarray
    f_scores: Dict[str, np.ndarray]
    auc_roc: Optional[float]
    n_positive: int
    n_negative: int
    betas: Tuple[float, ...] = DEFAULT_BETAS
    best: Dict[str, Tuple[float, float]] = field(default_factory=dict)

    @property
    def fpr(self) -> np.ndarray:
        return 1.0 - self.tnr

    @property
    def auc_defined(self) -> bool:
        return self.auc_roc is not None

    def rows(self) -> List[Dict[str, float]]:
        """Curve points: threshold, precision, recall, tpr, fpr."""
        return [
            {
                "threshold": float(t),
                "precision": float(p),
                "recall": float(r),
                "tpr": float(r),
                "fpr": float(f),
            }
            for t, p, r, f in zip(self.thresholds, self.precision, self.recall, self.fpr)
        ]

    def to_record(self) -> Dict[str, Any]:
        return {
            "n_positive": self.n_positive,
            "n_negative": self.n_negative,
            "auc_roc": self.auc_roc,
            "auc_defined": self.auc_defined,
            "best": {k: {"threshold": t, "score": s} for k, (t, s) in self.best.items()},
            "thresholds": self.thresholds.tolist(),
            "precision": self.precision.tolist(),
            "recall": self.recall.tolist(),
            "tnr": self.tnr.tolist(),
            **{k: v.tolist() for k, v in self.f_scores.items()},
        }


def _count_at_least(sorted_values: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    return sorted_values.size - np.searchsorted(sorted_values, thresholds, side="left")


def _best(
    thresholds: np.ndarray, f_scores: Dict[str, np.ndarray]
) -> Dict[str, Tuple[float, float]]:
    best = {}
    for key, values in f_scores.items():
        i = int(np.argmax(values))
        best[key] = (float(thresholds[i]), float(values[i]))
    return best


def best_thresholds(result: SweepResult) -> Dict[str, Tuple[float, float]]:
    """Per F-score, the threshold with the highest score; the lowest such threshold on ties."""
    return _best(result.thresholds, result.f_scores)


def sweep(
    scores,
    gt,
    thresholds: Optional[Sequence[float]] = None,
    betas: Sequence[float] = DEFAULT_BETAS,
) -> SweepResult:
    """
    Classification rates at each threshold plus ROC AUC.

    Thresholds are sorted and deduplicated. A single-class ground truth
    leaves auc_roc as None.

    Raises:
        EmptyInputError: no scores
        DataValidationError: scores and gt of different length
    """
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(gt, dtype=np.float64).reshape(-1) >= 0.5
    if scores.size == 0:
        raise EmptyInputError("scores")
    if labels.shape != scores.shape:
        raise DataValidationError("gt", f"{scores.size} values", gt)
    thresholds = default_thresholds() if thresholds is None else thresholds
    thresholds = np.unique(np.asarray(thresholds, dtype=np.float64))

    pos = np.sort(scores[labels])
    neg = np.sort(scores[~labels])
    tp = _count_at_least(pos, thresholds)
    fp = _count_at_least(neg, thresholds)
    fn = pos.size - tp
    tn = neg.size - fp

    precision = safe_ratio(tp, tp + fp)
    recall = safe_ratio(tp, tp + fn)
    tnr = safe_ratio(tn, tn + fp)
    f_scores = {beta_key(b): f_beta(precision, recall, b) for b in betas}

    auc_roc = None
    if pos.size and neg.size:
        fpr_curve, tpr_curve, _ = roc_curve(labels, scores)
        auc_roc = float(auc(fpr_curve, tpr_curve))
    else:
        logger.warning(
            "ROC AUC undefined: ground truth has only {} samples".format(
                "positive" if pos.size else "negative"
            )
        )

    return SweepResult(
        thresholds=thresholds,
        precision=precision,
        recall=recall,
        tnr=tnr,
        f_scores=f_scores,
        auc_roc=auc_roc,
        n_positive=int(pos.size),
        n_negative=int(neg.size),
        betas=tuple(betas),
        best=_best(thresholds, f_scores),
    )


def coupled_sweep(
    score_fn: Callable[[float], Tuple[np.ndarray, np.ndarray]],
    thresholds: Optional[Sequence[float]] = None,
    betas: Sequence[float] = DEFAULT_BETAS,
) -> SweepResult:
    """
    Sweep for scores that themselves depend on the threshold.

    score_fn(t) returns (scores, gt) evaluated at t; the Boolean baseline
    binarizes its inputs at the swept threshold, so every point needs a
    fresh evaluation. AUC is the trapezoid area under the (fpr, tpr) points
    closed by (0, 0) and (1, 1); None when any evaluation is single-class.
    """
    thresholds = default_thresholds() if thresholds is None else thresholds
    thresholds = np.unique(np.asarray(thresholds, dtype=np.float64))
    if thresholds.size == 0:
        raise EmptyInputError("thresholds")

    counts = []
    for t in thresholds:
        scores, gt = score_fn(float(t))
        scores = np.asarray(scores, dtype=np.float64).reshape(-1)
        labels = np.asarray(gt, dtype=np.float64).reshape(-1) >= 0.5
        if labels.shape != scores.shape:
            raise DataValidationError("gt", f"{scores.size} values", gt)
        predicted = scores >= t
        counts.append(
            (
                np.count_nonzero(predicted & labels),
                np.count_nonzero(predicted & ~labels),
                np.count_nonzero(~predicted & ~labels),
                np.count_nonzero(~predicted & labels),
            )
        )
    tp, fp, tn, fn = (np.asarray(c, dtype=np.float64) for c in zip(*counts))

    precision = safe_ratio(tp, tp + fp)
    recall = safe_ratio(tp, tp + fn)
    tnr = safe_ratio(tn, tn + fp)
    f_scores = {beta_key(b): f_beta(precision, recall, b) for b in betas}

    single_class = np.any(tp + fn == 0) or np.any(tn + fp == 0)
    auc_roc = None
    if single_class:
        logger.warning("ROC AUC undefined: ground truth is single-class at some threshold")
    else:
        points = sorted(set(zip((1.0 - tnr).tolist(), recall.tolist())) | {(0.0, 0.0), (1.0, 1.0)})
        fpr_curve, tpr_curve = (np.asarray(v) for v in zip(*points))
        auc_roc = float(auc(fpr_curve, tpr_curve))

    return SweepResult(
        thresholds=thresholds,
        precision=precision,
        recall=recall,
        tnr=tnr,
        f_scores=f_scores,
        auc_roc=auc_roc,
        n_positive=int(tp[0] + fn[0]),
        n_negative=int(tn[0] + fp[0]),
        betas=tuple(betas),
        best=_best(thresholds, f_scores),
    )
