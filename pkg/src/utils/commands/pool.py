"""
Per-scene work distribution.

Scenes run in a process pool sized by --jobs, inline for a single job.
Results always come back in submission order, so every reduction over
them is deterministic.
"""

import asyncio
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Callable, List, Sequence, TypeVar, Union

from tqdm import tqdm

from ..exceptions import EmptyInputError
from ..helpers.time import elapsed_ms
from ..logging_utils import LogCategory, get_category_logger, log_performance_metric
from ..storage import MANIFEST_NAME
from ..validators import validate_file_path

T = TypeVar("T")
R = TypeVar("R")

logger = get_category_logger(LogCategory.PERFORMANCE)


def discover_scenes(scenes_dir: Union[str, Path]) -> List[Path]:
    """Scene directories (those holding a manifest) below scenes_dir, sorted by name."""
    root = validate_file_path(scenes_dir, "scenes_dir", must_exist=True, must_be_dir=True)
    if (root / MANIFEST_NAME).is_file():
        return [root]
    scenes = sorted(p for p in root.iterdir() if (p / MANIFEST_NAME).is_file())
    if not scenes:
        raise EmptyInputError(f"scene directories in {root}")
    return scenes


async def map_scenes(
    fn: Callable[[T], R],
    items: Sequence[T],
    jobs: int = 1,
    desc: str = "scenes",
    silent: bool = False,
) -> List[R]:
    """
    Apply fn to every item. fn must be a picklable top-level function (or a
    partial of one) when jobs > 1.
    """
    start = time.perf_counter()
    progress = tqdm(total=len(items), desc=desc, disable=silent, leave=False)
    try:
        if jobs <= 1 or len(items) <= 1:
            results = []
            for item in items:
                results.append(fn(item))
                progress.update()
        else:
            results = await _map_pool(fn, items, jobs, progress)
    finally:
        progress.close()

    if items:
        log_performance_metric(
            logger, desc, round(elapsed_ms(start) / len(items), 3), unit="ms/item", jobs=jobs
        )
    return results


async def _map_pool(fn, items, jobs: int, progress) -> list:
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:

        async def run(item):
            result = await loop.run_in_executor(pool, partial(fn, item))
            progress.update()
            return result

        return list(await asyncio.gather(*(run(item) for item in items)))
