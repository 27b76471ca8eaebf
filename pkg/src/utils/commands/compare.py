import itertools
from functools import partial
from typing import Any, Dict, List

from ..monitor import global_consistency
from ..storage import comparison_table, write_json
from .base import Command
from .jobs import RuleJob, evaluate_scene
from .pool import discover_scenes, map_scenes

COLUMNS = ["family", "implication", "denoise", "scaling", "calibrated", "global_score"]


class CompareCommand(Command):
    """
    Global consistency scores of one rule across a grid of logic variants:
    family x implication x denoise x scaling, optionally x calibrated masks.
    """

    name = "compare"

    def variants(self) -> List[Dict[str, Any]]:
        config = self.config
        grid = itertools.product(
            config.compare_families,
            config.compare_implications,
            config.compare_denoise,
            config.compare_scaling,
            config.compare_calibration,
        )
        return [
            dict(zip(COLUMNS, (family, implication, bool(denoise), scaling, bool(calibrated))))
            for family, implication, denoise, scaling, calibrated in grid
        ]

    def job(self, variant: Dict[str, Any], formula) -> RuleJob:
        config = self.config
        return RuleJob(
            formula=formula,
            logic=config.logic_system(
                family=variant["family"], implication=variant["implication"]
            ),
            rule_id=self.rule_id,
            scaling=config.scaling_policy(variant["scaling"]),
            denoise=config.denoise_threshold(variant["denoise"]),
            membership_form=config.membership(),
            fingerprint=config.fingerprint(),
            calibrated_suffix=config.calibration_suffix(variant["calibrated"]),
        )

    async def _run(self) -> Dict[str, Any]:
        formula = self.rule()
        scenes = discover_scenes(self.require("scenes_dir"))
        rows = []
        for variant in self.variants():
            job = self.job(variant, formula)
            label = "{family}/{implication}".format(**variant)
            results = await map_scenes(
                partial(evaluate_scene, job), scenes, self.config.jobs, label, self.silent
            )
            score = global_consistency([score for _, _, score in results], job.logic)
            rows.append({**variant, "global_score": float(score)})

        table = comparison_table(rows, COLUMNS)
        if not self.silent:
            print(table)
        out = self.output_dir()
        write_json(
            {
                "rule_id": self.rule_id,
                "n_scenes": len(scenes),
                "variants": rows,
                "provenance": self.provenance(),
            },
            out / "compare.json",
        )
        (out / "compare.txt").write_text(table + "\n", encoding="utf-8")
        return {"variants": rows, "output": str(out)}
