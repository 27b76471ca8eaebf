"""
Binary classification rates and the segmentation overlap score.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Sequence, Tuple

import numpy as np

from ..exceptions import DataValidationError, EmptyInputError, ShapeMismatchError
from ..masks import TruthMask
from ..validators import validate_truth_value

DEFAULT_BETAS: Tuple[float, ...] = (1.0, 0.1, 10.0)


def beta_key(beta: float) -> str:
    return "f{:g}".format(beta)


def safe_ratio(num, den):
    """num/den elementwise with 0 where den == 0."""
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    return np.divide(num, den, out=np.zeros(np.broadcast(num, den).shape), where=den > 0)


def f_beta(precision, recall, beta: float):
    """(1+b^2)PR / (b^2 P + R), 0 where both rates are 0."""
    b2 = beta * beta
    precision = np.asarray(precision, dtype=np.float64)
    recall = np.asarray(recall, dtype=np.float64)
    return safe_ratio((1.0 + b2) * precision * recall, b2 * precision + recall)


@dataclass(frozen=True)
class ClassificationRates:
    tp: int
    fp: int
    tn: int
    fn: int
    precision: float
    recall: float
    tnr: float
    f_scores: Dict[str, float]
    undefined: FrozenSet[str] = field(default_factory=frozenset)

    def to_record(self) -> Dict[str, Any]:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "tnr": self.tnr,
            **self.f_scores,
            "undefined": sorted(self.undefined),
        }


def rates_from_counts(
    tp: int, fp: int, tn: int, fn: int, betas: Sequence[float] = DEFAULT_BETAS
) -> ClassificationRates:
    """Rates from confusion counts; 0/0 ratios become 0 and are listed in undefined."""
    undefined = set()
    if tp + fp == 0:
        undefined.add("precision")
    if tp + fn == 0:
        undefined.add("recall")
    if tn + fp == 0:
        undefined.add("tnr")
    precision = float(safe_ratio(tp, tp + fp))
    recall = float(safe_ratio(tp, tp + fn))
    f_scores = {}
    for beta in betas:
        key = beta_key(beta)
        f_scores[key] = float(f_beta(precision, recall, beta))
        if precision == 0.0 and recall == 0.0:
            undefined.add(key)
    return ClassificationRates(
        tp=int(tp),
        fp=int(fp),
        tn=int(tn),
        fn=int(fn),
        precision=precision,
        recall=recall,
        tnr=float(safe_ratio(tn, tn + fp)),
        f_scores=f_scores,
        undefined=frozenset(undefined),
    )


def _binary(values) -> np.ndarray:
    return np.asarray(values, dtype=np.float64).reshape(-1) >= 0.5


def classification_rates(pred, gt, betas: Sequence[float] = DEFAULT_BETAS) -> ClassificationRates:
    """
    Precision, recall, TNR and F-beta scores of binary predictions.

    Inputs are flattened; values >= 0.5 count as positive.
    """
    p = _binary(pred)
    g = _binary(gt)
    if p.shape != g.shape:
        raise DataValidationError("gt", f"{p.size} values", gt)
    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    tn = p.size - tp - fp - fn
    return rates_from_counts(tp, fp, tn, fn, betas)


def siou(gt_masks, pred_masks, t_siou: float = 0.5) -> float:
    """
    Set intersection over union over a dataset of paired masks.

    The intersection counts predictions above t_siou, the union counts
    predictions above 0.5 regardless of t_siou. An empty union scores 1
    when the intersection is empty too, else 0.

    Raises:
        EmptyInputError: no mask pairs
        ShapeMismatchError: a prediction shape differs from its ground truth
    """
    t_siou = validate_truth_value(t_siou, "t_siou")
    gt_masks = list(gt_masks)
    pred_masks = list(pred_masks)
    if not gt_masks:
        raise EmptyInputError("mask pairs for sIoU")
    if len(gt_masks) != len(pred_masks):
        raise DataValidationError("pred_masks", f"{len(gt_masks)} masks", pred_masks)

    intersection = union = 0
    for gt, pred in zip(gt_masks, pred_masks):
        g = np.asarray(gt.array if isinstance(gt, TruthMask) else gt) >= 0.5
        p = np.asarray(pred.array if isinstance(pred, TruthMask) else pred, dtype=np.float64)
        if g.shape != p.shape:
            raise ShapeMismatchError(g.shape, p.shape, "sIoU prediction")
        intersection += int(np.count_nonzero(g & (p > t_siou)))
        union += int(np.count_nonzero(g | (p > 0.5)))

    if union == 0:
        return 1.0 if intersection == 0 else 0.0
    return intersection / union
