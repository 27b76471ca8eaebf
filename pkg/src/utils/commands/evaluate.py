from functools import partial
from typing import Any, Dict

from ..masks import TruthMask
from ..monitor import global_consistency
from ..storage import SceneBundle, write_json, write_scene
from .base import Command
from .jobs import RuleJob, evaluate_scene
from .pool import discover_scenes, map_scenes

FORMULA_CHANNEL = "formula"


class EvalCommand(Command):
    """Per-scene rule values, the formula masks of open rules and the global score."""

    name = "eval"

    def job(self) -> RuleJob:
        config = self.config
        return RuleJob(
            formula=self.rule(),
            logic=config.logic_system(),
            rule_id=self.rule_id,
            scaling=config.scaling_policy(),
            denoise=config.denoise_threshold(),
            membership_form=config.membership(),
            fingerprint=config.fingerprint(),
            calibrated_suffix=config.calibration_suffix(),
        )

    async def _run(self) -> Dict[str, Any]:
        job = self.job()
        scenes = discover_scenes(self.require("scenes_dir"))
        results = await map_scenes(
            partial(evaluate_scene, job), scenes, self.config.jobs, "eval", self.silent
        )

        out = self.output_dir()
        records = []
        for scene_id, result, score in results:
            record = {"scene_id": scene_id, "score": score}
            if isinstance(result, TruthMask):
                bundle = SceneBundle.from_channels(
                    scene_id,
                    result.shape,
                    masks={FORMULA_CHANNEL: result},
                    provenance=self.provenance(rule_id=job.rule_id, source_scene=scene_id),
                )
                record["mask"] = str(write_scene(bundle, out / "masks" / scene_id))
            records.append(record)

        global_score = global_consistency([r["score"] for r in records], job.logic)
        summary = {
            "rule_id": job.rule_id,
            "logic": job.logic.model_dump(mode="json"),
            "n_scenes": len(records),
            "global_score": float(global_score),
            "scenes": records,
            "provenance": self.provenance(),
        }
        write_json(summary, out / "scores.json")
        return {"global_score": float(global_score), "n_scenes": len(records), "output": str(out)}
