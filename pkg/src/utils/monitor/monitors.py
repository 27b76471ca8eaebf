"""
Pixel, region, prediction and dataset level monitors.

The pixel monitor is the negated rule mask M(p) = !F(p). Region scores
aggregate M with the existential quantifier, either directly (simple) or
after the all-neighbors smoothing (peaks), which with the mean universal
and max existential is max(avg_pool(M, ksize)).
"""

from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import EmptyInputError
from ..logic import LogicSystem, TruthValue, conj, impl, neg, reduce_exists, reduce_forall
from ..masks import (
    BoundingBox,
    CloseByParams,
    NeighborMode,
    TruthMask,
    binarize,
    boxes_to_mask,
    nb_cond,
)
from .types import MonitorConfig, RegionMode


def pixel_monitor(f_mask: TruthMask, logic: LogicSystem) -> TruthMask:
    return TruthMask(neg(f_mask.array, logic))


def pixel_alarms(m: TruthMask, cfg: MonitorConfig) -> TruthMask:
    return binarize(m, cfg.t_px)


def restrict_to_region(m: TruthMask, roi: Optional[TruthMask], logic: LogicSystem) -> TruthMask:
    """AND the monitor with a region-of-interest mask; None keeps m."""
    if roi is None:
        return m
    return TruthMask(conj(m.array, roi.array, logic))


def region_monitor_simple(m: TruthMask, logic: LogicSystem) -> TruthValue:
    return TruthValue(reduce_exists(m.array, logic))


def region_monitor_peaks(
    m: TruthMask, cfg: MonitorConfig, logic: LogicSystem, ksize: Optional[int] = None
) -> TruthValue:
    ksize = cfg.ksize_m if ksize is None else ksize
    smoothed = nb_cond(m, NeighborMode.ALL_NEIGHBORS, CloseByParams.l1_window(ksize), logic)
    return TruthValue(reduce_exists(smoothed.array, logic))


def region_score(
    m: TruthMask, cfg: MonitorConfig, logic: LogicSystem, ksize: Optional[int] = None
) -> TruthValue:
    if cfg.region_mode == RegionMode.SIMPLE:
        return region_monitor_simple(m, logic)
    return region_monitor_peaks(m, cfg, logic, ksize)


def fp_formula(box: BoundingBox, body_part_mask: TruthMask, logic: LogicSystem) -> TruthValue:
    """(exists p: person_i(p)) -> (exists p: person_i(p) & IsBodyPart(p)) for one prediction."""
    person = boxes_to_mask([box], body_part_mask.shape, logic).array
    has_person = reduce_exists(person, logic)
    has_part = reduce_exists(conj(person, body_part_mask.array, logic), logic)
    return TruthValue(impl(has_person, has_part, logic))


def fp_monitor(
    prediction_boxes: Sequence[BoundingBox],
    body_part_mask: TruthMask,
    logic: LogicSystem,
) -> List[TruthValue]:
    """Per prediction, the negated 'a person has a body part' rule."""
    return [
        TruthValue(neg(fp_formula(box, body_part_mask, logic), logic)) for box in prediction_boxes
    ]


def global_consistency(scores: Iterable[float], logic: LogicSystem) -> TruthValue:
    scores = np.asarray(list(scores), dtype=np.float64)
    if scores.size == 0:
        raise EmptyInputError("image scores for the global consistency score")
    return TruthValue(reduce_forall(scores, logic))


def corner_case_score(m: TruthMask, logic: LogicSystem, floor: float = 1e-3) -> float:
    """Simple region monitor over the non-trivial region {p : M(p) >= floor}; 0 when empty."""
    values = m.array[m.array >= floor]
    return float(reduce_exists(values, logic))


def rank_corner_cases(
    results: Iterable[Tuple[str, TruthMask]],
    logic: LogicSystem,
    top_k: Optional[int] = None,
    floor: float = 1e-3,
) -> List[Tuple[str, float]]:
    """
    Rank scenes by corner-case score, highest first; ties in scene id order.

    Args:
        results: (scene_id, pixel monitor) pairs
        top_k: Keep only the first top_k scenes
        floor: Pixels with M(p) below floor do not count
    """
    scored = [(scene_id, corner_case_score(m, logic, floor)) for scene_id, m in results]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored if top_k is None else scored[:top_k]
