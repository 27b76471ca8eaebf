"""
Ground truth for monitor evaluation: false-negative pixels, region verdicts
derived from them with the monitor's own region formula, and false-positive
predictions by GT coverage.

Ground truth never depends on the Boolean binarization threshold: Boolean
monitors derive it with the Goedel connectives, which agree with the Boolean
ones on classical inputs.
"""

import math
from typing import List, Optional, Sequence

import numpy as np

from ..exceptions import ShapeMismatchError
from ..logic import Family, LogicSystem, conj, neg
from ..masks import BoundingBox, Shape, TruthMask, binarize, box_support
from .monitors import region_score
from .types import MonitorConfig

# predictions below this score are never false positives
FP_MIN_SCORE = 0.5
# a prediction covered less than this by GT boxes is a false positive
FP_MAX_COVERAGE = 0.2


def ground_truth_logic(logic: LogicSystem) -> LogicSystem:
    if logic.is_boolean:
        return logic.model_copy(update={"family": Family.GOEDEL})
    return logic


def fn_ground_truth(
    person_pred: TruthMask,
    person_gt: TruthMask,
    cfg: MonitorConfig,
    logic: LogicSystem,
) -> TruthMask:
    """is_FN(p) = !person(p) & GTperson(p), binarized at t_ped."""
    if person_pred.shape != person_gt.shape:
        raise ShapeMismatchError(person_gt.shape, person_pred.shape, "predicted person mask")
    logic = ground_truth_logic(logic)
    fn = conj(neg(person_pred.array, logic), person_gt.array, logic)
    return binarize(TruthMask(fn), cfg.t_ped)


def region_ground_truth(fn_mask: TruthMask, cfg: MonitorConfig, logic: LogicSystem) -> bool:
    """Apply the configured region formula with ksize_gt and binarize at t_gt_reg."""
    logic = ground_truth_logic(logic)
    return bool(region_score(fn_mask, cfg, logic, ksize=cfg.ksize_gt) >= cfg.t_gt_reg)


def _extent(boxes: Sequence[BoundingBox]) -> Shape:
    height = max((math.ceil(b.y1) for b in boxes), default=1)
    width = max((math.ceil(b.x1) for b in boxes), default=1)
    return (max(height, 1), max(width, 1))


def fp_ground_truth(
    pred_boxes: Sequence[BoundingBox],
    gt_boxes: Sequence[BoundingBox],
    shape: Optional[Shape] = None,
) -> List[bool]:
    """
    A prediction is a false positive if its score exceeds 0.5 and less than
    20% of its pixels lie in the union of GT boxes. Areas are pixel counts by
    center test on shape, which defaults to the extent of all boxes.
    """
    if shape is None:
        shape = _extent(list(pred_boxes) + list(gt_boxes))
    covered = np.zeros(shape, dtype=bool)
    for box in gt_boxes:
        covered |= box_support(box, shape)

    out = []
    for box in pred_boxes:
        support = box_support(box, shape)
        area = int(support.sum())
        coverage = (support & covered).sum() / area if area else 0.0
        out.append(bool(box.score > FP_MIN_SCORE and coverage < FP_MAX_COVERAGE))
    return out
