from functools import partial
from pathlib import Path
from typing import Any, Dict

from ..datagen import SceneSpec, generate_scene
from ..storage import write_json, write_scene
from .base import Command
from .pool import map_scenes

SPEC_NAME = "spec.json"


def generate_to(spec: SceneSpec, directory: Path, index: int) -> str:
    bundle = generate_scene(spec, index)
    write_scene(bundle, directory / bundle.scene_id, spec.encoding)
    return bundle.scene_id


class GenCommand(Command):
    """Synthetic scene bundles with injected detection errors, plus the spec that made them."""

    name = "gen"

    async def _run(self) -> Dict[str, Any]:
        spec = self.config.scene_spec()
        out = self.output_dir()
        scene_ids = await map_scenes(
            partial(generate_to, spec, out),
            list(range(spec.n_scenes)),
            self.config.jobs,
            self.name,
            self.silent,
        )
        write_json(spec.model_dump(mode="json"), out / SPEC_NAME)
        return {"n_scenes": len(scene_ids), "seed": spec.seed, "output": str(out)}
