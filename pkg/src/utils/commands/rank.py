from typing import Any, Dict

from ..monitor import rank_corner_cases
from ..storage import write_json
from .monitor import MonitorCommand


class RankCommand(MonitorCommand):
    """Corner-case search: scenes ordered by their strongest non-trivial alarm."""

    name = "rank"

    async def _run(self) -> Dict[str, Any]:
        config = self.config
        job = self.monitor_job()
        reports = await self.collect(job)
        ranking = rank_corner_cases(
            [(r.scene_id, r.pixel_monitor) for r in reports],
            job.logic,
            top_k=config.top_k,
            floor=job.monitor.corner_case_floor,
        )
        ranked = [
            {"rank": i + 1, "scene_id": scene_id, "score": score}
            for i, (scene_id, score) in enumerate(ranking)
        ]
        out = self.output_dir()
        write_json(
            {
                "rule_id": job.rule_id,
                "top_k": config.top_k,
                "floor": job.monitor.corner_case_floor,
                "ranking": ranked,
                "provenance": self.provenance(),
            },
            out / "corner_cases.json",
        )
        return {"ranking": ranked, "output": str(out)}
