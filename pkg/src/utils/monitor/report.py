"""
Scene-level monitor evaluation and report assembly.
"""

from typing import Any, Dict, List, Optional

from ..logic import LogicSystem, TruthValue, disj, neg, reduce_forall
from ..masks import ScalingPolicy, Shape, TruthMask, boxes_to_mask, rescale
from ..rules import EvalPlan, evaluate_pixelwise
from ..storage.scene import ChannelKind, SceneBundle
from .ground_truth import (
    fn_ground_truth,
    fp_ground_truth,
    ground_truth_logic,
    region_ground_truth,
)
from .monitors import (
    fp_formula,
    pixel_alarms,
    pixel_monitor,
    region_score,
    restrict_to_region,
)
from .types import MonitorConfig, MonitorReport, PredictionReport


def channel_mask(
    scene: SceneBundle,
    name: str,
    shape: Shape,
    logic: LogicSystem,
    policy: ScalingPolicy = ScalingPolicy.UPSCALE,
    constant_score: Optional[float] = None,
) -> TruthMask:
    """A scene channel as a truth mask on shape; box channels are rasterized at image size."""
    spec = scene.manifest.channel(name)
    if spec.kind == ChannelKind.BOXES:
        mask = boxes_to_mask(scene.box_set(name), scene.image_shape, logic, constant_score)
    else:
        mask = scene.mask(name)
    return rescale(mask, shape, policy)


def _union(scene: SceneBundle, names, shape, logic, policy) -> Optional[TruthMask]:
    names = [n for n in names if scene.manifest.has_channel(n)]
    if not names:
        return None
    out = channel_mask(scene, names[0], shape, logic, policy).array
    for name in names[1:]:
        out = disj(out, channel_mask(scene, name, shape, logic, policy).array, logic)
    return TruthMask(out)


def build_monitor_report(
    scene_id: str,
    rule_id: str,
    f_mask: TruthMask,
    cfg: MonitorConfig,
    logic: LogicSystem,
    roi: Optional[TruthMask] = None,
    rule_score: Optional[float] = None,
    gt_pixels: Optional[TruthMask] = None,
    gt_verdict: Optional[bool] = None,
    predictions: Optional[List[PredictionReport]] = None,
    provenance: Optional[Dict[str, Any]] = None,
) -> MonitorReport:
    """Derive pixel alarms and the region verdict from a rule mask."""
    m = restrict_to_region(pixel_monitor(f_mask, logic), roi, logic)
    score = float(region_score(m, cfg, logic))
    record = {"rule_id": rule_id, "scene_id": scene_id, "logic": logic.model_dump(mode="json")}
    record.update(provenance or {})
    return MonitorReport(
        scene_id=scene_id,
        rule_id=rule_id,
        pixel_monitor=m,
        alarms=pixel_alarms(m, cfg),
        region_score=score,
        verdict=score >= cfg.t_reg,
        region_mode=cfg.region_mode,
        rule_score=rule_score,
        gt_pixels=gt_pixels,
        gt_verdict=gt_verdict,
        predictions=list(predictions or []),
        provenance=record,
    )


def evaluate_monitors(
    plan: EvalPlan,
    scene: SceneBundle,
    cfg: MonitorConfig,
    rule_id: str = "rule",
    fingerprint: Optional[str] = None,
) -> MonitorReport:
    """
    Evaluate a pixel-wise rule on scene and assemble its monitor report.

    Ground truth is attached when the scene carries both the predicted and
    the GT person channels; prediction-level checks run when the person
    channel holds boxes and body-part channels are configured.
    """
    logic = plan.logic
    policy = plan.bound.scaling
    f_mask = evaluate_pixelwise(plan, scene)
    shape = f_mask.shape
    rule_score = None
    if plan.pixel_output is not None:
        rule_score = TruthValue(reduce_forall(f_mask.array, logic))

    roi = None
    if cfg.region_of_interest:
        roi = channel_mask(scene, cfg.region_of_interest, shape, logic, policy)

    manifest = scene.manifest
    gt_pixels = gt_verdict = None
    if manifest.has_channel(cfg.person_channel) and manifest.has_channel(cfg.gt_person_channel):
        gt_logic = ground_truth_logic(logic)
        pred = channel_mask(scene, cfg.person_channel, shape, gt_logic, policy)
        gt = channel_mask(
            scene, cfg.gt_person_channel, shape, gt_logic, policy, constant_score=1.0
        )
        fn = fn_ground_truth(pred, gt, cfg, gt_logic)
        gt_verdict = region_ground_truth(fn, cfg, gt_logic)
        parts = _union(scene, cfg.gt_body_part_channels, shape, gt_logic, policy)
        gt_pixels = fn if parts is None else TruthMask(fn.array * (parts.array >= 0.5))

    predictions = []
    body = _union(scene, cfg.body_part_channels, scene.image_shape, logic, ScalingPolicy.UPSCALE)
    person_is_boxes = (
        manifest.has_channel(cfg.person_channel)
        and manifest.channel(cfg.person_channel).kind == ChannelKind.BOXES
    )
    if body is not None and person_is_boxes:
        boxes = scene.box_set(cfg.person_channel)
        gt_flags = [None] * len(boxes)
        if manifest.has_channel(cfg.gt_person_channel):
            if manifest.channel(cfg.gt_person_channel).kind == ChannelKind.BOXES:
                gt_boxes = scene.box_set(cfg.gt_person_channel)
                gt_flags = fp_ground_truth(boxes, gt_boxes, scene.image_shape)
        for i, box in enumerate(boxes):
            formula = float(fp_formula(box, body, logic))
            monitor = float(neg(formula, logic))
            predictions.append(PredictionReport(i, box, formula, monitor, gt_flags[i]))

    provenance = {"config_fingerprint": fingerprint} if fingerprint else {}
    return build_monitor_report(
        scene.scene_id,
        rule_id,
        f_mask,
        cfg,
        logic,
        roi=roi,
        rule_score=rule_score,
        gt_pixels=gt_pixels,
        gt_verdict=gt_verdict,
        predictions=predictions,
        provenance=provenance,
    )
