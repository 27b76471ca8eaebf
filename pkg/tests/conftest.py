"""
Shared fixtures: a clean Config singleton per test and random scene builders.
"""

from pathlib import Path

import numpy as np
import pytest

from src.utils.config import Config
from src.utils.masks import BoundingBox, TruthMask
from src.utils.storage import SceneBundle

RULES_DIR = Path(__file__).parent / "rules"
CONCEPTS = ("eye", "arm", "wrist", "leg", "ankle")


@pytest.fixture(autouse=True)
def clean_config():
    """Every test starts from the Config defaults."""
    Config().reset()
    yield
    Config().reset()


def random_boxes(rng: np.random.Generator, shape, n: int):
    height, width = shape
    boxes = []
    for _ in range(n):
        x0, y0 = rng.uniform(0, width - 1), rng.uniform(0, height - 1)
        x1 = rng.uniform(x0 + 0.5, width + 0.5)
        y1 = rng.uniform(y0 + 0.5, height + 0.5)
        boxes.append(BoundingBox(x0=x0, y0=y0, x1=x1, y1=y1, score=float(rng.uniform(0.3, 1.0))))
    return boxes


def random_scene(rng: np.random.Generator, shape=(8, 8), scene_id: str = "scene") -> SceneBundle:
    """Random concept masks, person and gt_person boxes."""
    masks = {name: TruthMask(rng.random(shape)) for name in CONCEPTS}
    boxes = {
        "person": random_boxes(rng, shape, int(rng.integers(1, 3))),
        "gt_person": random_boxes(rng, shape, int(rng.integers(1, 3))),
    }
    return SceneBundle.from_channels(scene_id, shape, masks=masks, boxes=boxes)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def rule_files():
    return sorted(RULES_DIR.glob("*.fzr"))
