"""
Picklable per-scene jobs. A job carries the parsed rule and every setting a
worker process needs; the rule is bound to each scene's own manifest.
"""

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ..concepts import ConceptHead, predict
from ..logic import LogicSystem, TruthValue, reduce_forall
from ..masks import ScalingPolicy, TruthMask
from ..monitor import MonitorConfig, MonitorReport, evaluate_monitors
from ..rules import EvalPlan, Formula, MembershipForm, bind, evaluate, lower, predicate_names
from ..rules import rename_predicates
from ..storage import SceneBundle, SceneManifest, add_mask_channel, load_scene

RuleResult = Union[TruthMask, TruthValue]


@dataclass(frozen=True)
class RuleJob:
    formula: Formula
    logic: LogicSystem
    rule_id: str = "rule"
    scaling: ScalingPolicy = ScalingPolicy.UPSCALE
    denoise: Optional[float] = None
    membership_form: MembershipForm = MembershipForm.RESTRICTED
    monitor: Optional[MonitorConfig] = None
    fingerprint: Optional[str] = None
    calibrated_suffix: Optional[str] = None

    def with_logic(self, logic: LogicSystem) -> "RuleJob":
        return replace(self, logic=logic)

    def formula_for(self, manifest: SceneManifest) -> Formula:
        """The rule, reading calibrated channels where the scene provides them."""
        if not self.calibrated_suffix:
            return self.formula
        mapping = {
            name: name + self.calibrated_suffix
            for name in predicate_names(self.formula)
            if manifest.has_channel(name + self.calibrated_suffix)
        }
        return rename_predicates(self.formula, mapping)

    def plan(self, scene: SceneBundle) -> EvalPlan:
        bound = bind(
            self.formula_for(scene.manifest),
            scene.manifest,
            self.scaling,
            self.denoise,
            self.membership_form,
        )
        return lower(bound, self.logic)


def rule_score(result: RuleResult, logic: LogicSystem) -> float:
    """Per-image score R(P): the closed rule's value, or the forall over an open rule's mask."""
    if isinstance(result, TruthMask):
        return float(reduce_forall(result.array, logic))
    return float(result)


def evaluate_scene(job: RuleJob, path: Path) -> Tuple[str, RuleResult, float]:
    scene = load_scene(path)
    result = evaluate(job.plan(scene), scene)
    return scene.scene_id, result, rule_score(result, job.logic)


def monitor_scene(job: RuleJob, path: Path) -> MonitorReport:
    scene = load_scene(path)
    return evaluate_monitors(
        job.plan(scene), scene, job.monitor, rule_id=job.rule_id, fingerprint=job.fingerprint
    )


def apply_head_scene(
    head: ConceptHead, channel: str, calibrated: bool, item: Tuple[Path, np.ndarray]
) -> str:
    """Write the head's concept mask for one (scene, activations) pair as channel."""
    path, activations = item
    scene = load_scene(path)
    mask = predict(head, activations, calibrated, scene.image_shape)
    add_mask_channel(path, channel, mask)
    return scene.scene_id
