from typing import Iterable, Optional

import numpy as np

from ..logic import LogicSystem, disj
from ..validators import validate_truth_value
from .types import BoundingBox, Shape, TruthMask, pixel_centers


def binarize(m: TruthMask, t: float) -> TruthMask:
    t = validate_truth_value(t, "binarize threshold")
    return TruthMask((m.array >= t).astype(np.float64))


def denoise(m: TruthMask, t_denoise: float) -> TruthMask:
    """Zero every cell strictly below t_denoise."""
    t_denoise = validate_truth_value(t_denoise, "t_denoise")
    return TruthMask(np.where(m.array < t_denoise, 0.0, m.array))


def box_support(box: BoundingBox, shape: Shape) -> np.ndarray:
    """Boolean mask of pixels whose centers lie in [x0, x1) x [y0, y1)."""
    rows, cols = pixel_centers(shape)
    return (cols >= box.x0) & (cols < box.x1) & (rows >= box.y0) & (rows < box.y1)


def boxes_to_mask(
    boxes: Iterable[BoundingBox],
    shape: Shape,
    logic: LogicSystem,
    constant_score: Optional[float] = None,
) -> TruthMask:
    """
    Fill each box with its objectness score (or constant_score) and combine
    overlapping boxes with the family disjunction.
    """
    out = np.zeros(shape, dtype=np.float64)
    for box in boxes:
        support = box_support(box, shape)
        if not support.any():
            continue
        score = box.score if constant_score is None else constant_score
        out = np.where(support, disj(out, score, logic), out)
    return TruthMask(out)
