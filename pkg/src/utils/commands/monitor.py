from functools import partial
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..logging_utils import LogCategory, get_category_logger
from ..metrics import classification_rates
from ..monitor import MonitorReport, global_consistency
from ..storage import write_json
from .base import Command
from .jobs import RuleJob, monitor_scene
from .pool import discover_scenes, map_scenes

logger = get_category_logger(LogCategory.MONITOR)

Pairs = Tuple[np.ndarray, np.ndarray]


def image_pairs(reports: List[MonitorReport]) -> Optional[Pairs]:
    """(region score, ground-truth verdict) of every scene with ground truth."""
    rows = [(r.region_score, float(r.gt_verdict)) for r in reports if r.gt_verdict is not None]
    if not rows:
        return None
    scores, gt = zip(*rows)
    return np.asarray(scores), np.asarray(gt)


def pixel_pairs(reports: List[MonitorReport]) -> Optional[Pairs]:
    """Pixel monitor values against FN-on-body-part pixels, over all scenes with ground truth."""
    rows = [r for r in reports if r.gt_pixels is not None]
    if not rows:
        return None
    scores = np.concatenate([r.pixel_monitor.array.reshape(-1) for r in rows])
    gt = np.concatenate([r.gt_pixels.array.reshape(-1) for r in rows])
    return scores, gt


def prediction_pairs(reports: List[MonitorReport]) -> Optional[Pairs]:
    rows = [
        (p.monitor, float(p.ground_truth))
        for r in reports
        for p in r.predictions
        if p.ground_truth is not None
    ]
    if not rows:
        return None
    scores, gt = zip(*rows)
    return np.asarray(scores), np.asarray(gt)


class MonitorCommand(Command):
    """Monitor reports per scene plus image, pixel and prediction level rates."""

    name = "monitor"

    def monitor_job(self, **logic_overrides) -> RuleJob:
        config = self.config
        return RuleJob(
            formula=self.rule(),
            logic=config.logic_system(**logic_overrides),
            rule_id=self.rule_id,
            scaling=config.scaling_policy(),
            denoise=config.denoise_threshold(),
            membership_form=config.membership(),
            monitor=config.monitor_config(),
            fingerprint=config.fingerprint(),
            calibrated_suffix=config.calibration_suffix(),
        )

    async def collect(self, job: RuleJob, desc: Optional[str] = None) -> List[MonitorReport]:
        scenes = discover_scenes(self.require("scenes_dir"))
        return await map_scenes(
            partial(monitor_scene, job), scenes, self.config.jobs, desc or self.name, self.silent
        )

    def aggregate(self, job: RuleJob, reports: List[MonitorReport]) -> Dict[str, Any]:
        cfg = job.monitor
        betas = self.config.betas
        record: Dict[str, Any] = {"n_scenes": len(reports)}

        scores = [r.rule_score for r in reports if r.rule_score is not None]
        record["global_score"] = float(global_consistency(scores, job.logic)) if scores else None

        pairs = image_pairs(reports)
        if pairs is not None:
            verdicts = np.asarray([r.verdict for r in reports if r.gt_verdict is not None])
            record["image"] = classification_rates(verdicts, pairs[1], betas).to_record()
        pairs = pixel_pairs(reports)
        if pairs is not None:
            alarms = pairs[0] >= cfg.t_px
            record["pixel"] = classification_rates(alarms, pairs[1], betas).to_record()
        pairs = prediction_pairs(reports)
        if pairs is not None:
            record["prediction"] = classification_rates(
                pairs[0] >= cfg.t_reg, pairs[1], betas
            ).to_record()
        if not {"image", "pixel", "prediction"} & record.keys():
            logger.warning("No scene carries ground truth; only the global score is reported")
        return record

    async def _run(self) -> Dict[str, Any]:
        job = self.monitor_job()
        reports = await self.collect(job)
        out = self.output_dir()

        write_json([r.to_record() for r in reports], out / "monitor_reports.json")
        summary = {
            "rule_id": job.rule_id,
            "logic": job.logic.model_dump(mode="json"),
            "monitor": job.monitor.model_dump(mode="json"),
            **self.aggregate(job, reports),
            "alarmed_scenes": [r.scene_id for r in reports if r.verdict],
            "provenance": self.provenance(),
        }
        write_json(summary, out / "monitor_summary.json")
        return {
            "n_scenes": len(reports),
            "alarmed_scenes": len(summary["alarmed_scenes"]),
            "global_score": summary["global_score"],
            "output": str(out),
        }
