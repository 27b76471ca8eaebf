from typing import Any, Callable, Dict, List, Optional

import numpy as np

from ..logging_utils import LogCategory, get_category_logger
from ..logic import Family
from ..metrics import SweepResult, coupled_sweep, default_thresholds, sweep
from ..monitor import MonitorReport
from ..storage import plot_curves_svg, write_curve_csv, write_json
from .monitor import MonitorCommand, Pairs, image_pairs, pixel_pairs, prediction_pairs

logger = get_category_logger(LogCategory.METRICS)

LEVELS: Dict[str, Callable[[List[MonitorReport]], Optional[Pairs]]] = {
    "image": image_pairs,
    "pixel": pixel_pairs,
    "prediction": prediction_pairs,
}


class SweepCommand(MonitorCommand):
    """
    Threshold sweeps of the region, pixel and prediction monitors against
    ground truth. For Boolean logic the mask binarization threshold follows
    the swept threshold, so the rule is re-evaluated at every point.
    """

    name = "sweep"

    async def _fuzzy_sweeps(self, thresholds: np.ndarray) -> Dict[str, SweepResult]:
        reports = await self.collect(self.monitor_job())
        results = {}
        for level, pairs_of in LEVELS.items():
            pairs = pairs_of(reports)
            if pairs is not None:
                results[level] = sweep(pairs[0], pairs[1], thresholds, self.config.betas)
        return results

    async def _coupled_sweeps(self, thresholds: np.ndarray) -> Dict[str, SweepResult]:
        logger.warning(
            "Boolean logic: re-evaluating {} thresholds, one monitor pass each".format(
                thresholds.size
            )
        )
        job = self.monitor_job()
        pairs_at: Dict[str, Dict[float, Pairs]] = {level: {} for level in LEVELS}
        for t in thresholds:
            logic = job.logic.model_copy(update={"bool_threshold": float(t)})
            reports = await self.collect(job.with_logic(logic), desc=f"sweep@{t:.3f}")
            for level, pairs_of in LEVELS.items():
                pairs = pairs_of(reports)
                if pairs is not None:
                    pairs_at[level][float(t)] = pairs

        return {
            level: coupled_sweep(lambda t, p=pairs: p[t], thresholds, self.config.betas)
            for level, pairs in pairs_at.items()
            if len(pairs) == thresholds.size
        }

    async def _run(self) -> Dict[str, Any]:
        config = self.config
        thresholds = default_thresholds(config.thresholds)
        if config.logic_system().family == Family.BOOLEAN:
            results = await self._coupled_sweeps(thresholds)
        else:
            results = await self._fuzzy_sweeps(thresholds)
        if not results:
            logger.warning("No scene carries ground truth; nothing to sweep")

        out = self.output_dir()
        summary = {
            "rule_id": self.rule_id,
            "thresholds": config.thresholds,
            "levels": {level: result.to_record() for level, result in results.items()},
            "provenance": self.provenance(),
        }
        write_json(summary, out / "sweep.json")
        files = {}
        for level, result in results.items():
            files[level] = str(write_curve_csv(result, out / f"sweep_{level}.csv"))
            if config.plot:
                plots = plot_curves_svg(
                    result, out, prefix=f"{level}_", title=f"{self.rule_id} ({level} level)"
                )
                files.update({f"{level}_{k}": str(v) for k, v in plots.items()})

        return {
            "auc_roc": {level: result.auc_roc for level, result in results.items()},
            "best": {level: result.best for level, result in results.items()},
            "files": files,
        }
