"""
Synthetic scenes with known detection errors.

Persons are placed in disjoint columns of the image, each with a body-part
layout scaled to its box. Ground truth is complete; the predicted channels
carry the injected errors: dropped boxes (FN), spurious boxes (FP), shrunk
boxes, and optionally blurred, noisy concept masks.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.ndimage import gaussian_filter

from ..exceptions import LayoutError
from ..logging_utils import LogCategory, get_category_logger
from ..masks import BoundingBox, TruthMask
from ..storage.scene import MaskEncoding, SceneBundle
from .keypoints import CONCEPTS, Keypoint, KeypointAnnotation, keypoints_to_concept_masks

logger = get_category_logger(LogCategory.DATAGEN)

# (u, v) in box coordinates: u along the width, v down from the top of the head
BODY_TEMPLATE: Dict[str, Tuple[float, float]] = {
    "nose": (0.50, 0.09),
    "left_eye": (0.42, 0.07),
    "right_eye": (0.58, 0.07),
    "left_shoulder": (0.25, 0.25),
    "right_shoulder": (0.75, 0.25),
    "left_elbow": (0.16, 0.40),
    "right_elbow": (0.84, 0.40),
    "left_wrist": (0.14, 0.55),
    "right_wrist": (0.86, 0.55),
    "left_hip": (0.36, 0.55),
    "right_hip": (0.64, 0.55),
    "left_knee": (0.36, 0.77),
    "right_knee": (0.64, 0.77),
    "left_ankle": (0.36, 0.96),
    "right_ankle": (0.64, 0.96),
}


class ConceptNoise(BaseModel):
    model_config = ConfigDict(frozen=True)

    blur_sigma: float = Field(default=1.0, ge=0.0)
    amplitude: float = Field(default=0.05, ge=0.0, le=1.0)


class SceneSpec(BaseModel):
    """Generation parameters; the same spec and seed always yield the same scenes."""

    model_config = ConfigDict(frozen=True)

    image_size: Tuple[int, int] = (128, 128)
    persons: Tuple[int, int] = (1, 3)
    person_height: Tuple[float, float] = (48.0, 96.0)
    aspect: float = Field(default=0.4, gt=0.0)
    fn_prob: float = Field(default=0.0, ge=0.0, le=1.0)
    fp_prob: float = Field(default=0.0, ge=0.0, le=1.0)
    shrink: Tuple[float, float] = (1.0, 1.0)
    occlusion_prob: float = Field(default=0.0, ge=0.0, le=1.0)
    detection_score: float = Field(default=1.0, ge=0.0, le=1.0)
    concepts: Tuple[str, ...] = CONCEPTS
    concept_noise: Optional[ConceptNoise] = None
    n_scenes: int = Field(default=1, ge=1)
    scene_prefix: str = "scene_"
    encoding: MaskEncoding = MaskEncoding.RAW
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_ranges(self):
        for name in ("persons", "person_height", "shrink"):
            low, high = getattr(self, name)
            if low > high:
                raise ValueError(f"{name} range is empty: {low} > {high}")
        if min(self.image_size) <= 0 or self.persons[0] < 0 or self.person_height[0] <= 0:
            raise ValueError("sizes and counts must be positive")
        if not 0.0 < self.shrink[0] <= self.shrink[1] <= 1.0:
            raise ValueError("shrink factors must lie in (0, 1]")
        return self

    def scene_id(self, index: int) -> str:
        return f"{self.scene_prefix}{index:04d}"


def _place_persons(spec: SceneSpec, rng: np.random.Generator, n: int) -> List[BoundingBox]:
    height, width = spec.image_size
    boxes = []
    if n == 0:
        return boxes
    column = width / n
    for i in range(n):
        h = float(rng.uniform(*spec.person_height))
        w = spec.aspect * h
        if h > height or w > column:
            raise LayoutError(
                f"{n} persons of height {h:.1f} do not fit side by side into {spec.image_size}"
            )
        x0 = i * column + float(rng.uniform(0.0, column - w))
        y0 = float(rng.uniform(0.0, height - h))
        boxes.append(BoundingBox(x0=x0, y0=y0, x1=x0 + w, y1=y0 + h))
    return boxes


def _annotate(box: BoundingBox, spec: SceneSpec, rng: np.random.Generator) -> KeypointAnnotation:
    keypoints = {}
    for name, (u, v) in BODY_TEMPLATE.items():
        visible = bool(rng.random() >= spec.occlusion_prob)
        x, y = box.x0 + u * box.width, box.y0 + v * box.height
        keypoints[name] = Keypoint(x=x, y=y, visible=visible)
    return KeypointAnnotation(keypoints=keypoints, box=box, image_shape=spec.image_size)


def _shrink(box: BoundingBox, factor: float, score: float) -> BoundingBox:
    cx, cy = 0.5 * (box.x0 + box.x1), 0.5 * (box.y0 + box.y1)
    hw, hh = 0.5 * factor * box.width, 0.5 * factor * box.height
    return BoundingBox(x0=cx - hw, y0=cy - hh, x1=cx + hw, y1=cy + hh, score=score)


def _spurious_box(spec: SceneSpec, rng: np.random.Generator) -> BoundingBox:
    height, width = spec.image_size
    h = min(float(rng.uniform(*spec.person_height)), float(height))
    w = min(spec.aspect * h, float(width))
    x0 = float(rng.uniform(0.0, width - w))
    y0 = float(rng.uniform(0.0, height - h))
    return BoundingBox(x0=x0, y0=y0, x1=x0 + w, y1=y0 + h, score=spec.detection_score)


def _noisy(gt: np.ndarray, noise: ConceptNoise, rng: np.random.Generator) -> np.ndarray:
    out = gaussian_filter(gt, noise.blur_sigma) if noise.blur_sigma > 0 else gt.copy()
    out = out + rng.uniform(-noise.amplitude, noise.amplitude, size=gt.shape)
    return np.clip(out, 0.0, 1.0)


def generate_scene(spec: SceneSpec, index: int = 0) -> SceneBundle:
    """
    Generate scene number index of spec.

    Channels: gt_person and person boxes, gt_<concept> and <concept> masks.
    The scene draws from its own stream seeded with spec.seed XOR index.

    Raises:
        LayoutError: the persons cannot be placed side by side
    """
    rng = np.random.default_rng(spec.seed ^ index)
    shape = tuple(spec.image_size)
    n = int(rng.integers(spec.persons[0], spec.persons[1] + 1))
    gt_boxes = _place_persons(spec, rng, n)

    gt_masks = {c: np.zeros(shape) for c in spec.concepts}
    for box in gt_boxes:
        ann = _annotate(box, spec, rng)
        for concept, mask in keypoints_to_concept_masks(ann, shape, spec.concepts).items():
            gt_masks[concept] = np.maximum(gt_masks[concept], mask)

    pred_boxes, dropped = [], []
    for i, box in enumerate(gt_boxes):
        if rng.random() < spec.fn_prob:
            dropped.append(i)
            continue
        factor = float(rng.uniform(*spec.shrink))
        pred_boxes.append(_shrink(box, factor, spec.detection_score))
    n_spurious = int(rng.binomial(max(n, 1), spec.fp_prob))
    pred_boxes += [_spurious_box(spec, rng) for _ in range(n_spurious)]

    masks = {f"gt_{c}": TruthMask(m) for c, m in gt_masks.items()}
    for concept, gt in gt_masks.items():
        pred = gt if spec.concept_noise is None else _noisy(gt, spec.concept_noise, rng)
        masks[concept] = TruthMask(pred)

    scene_id = spec.scene_id(index)
    logger.debug(
        "Generated {}: {} persons, {} dropped, {} spurious".format(
            scene_id, n, len(dropped), n_spurious
        )
    )
    return SceneBundle.from_channels(
        scene_id,
        shape,
        masks=masks,
        boxes={"gt_person": gt_boxes, "person": pred_boxes},
        provenance={
            "generator": "datagen",
            "seed": spec.seed,
            "index": index,
            "dropped_persons": dropped,
            "spurious_boxes": list(range(len(pred_boxes) - n_spurious, len(pred_boxes))),
        },
        encoding=spec.encoding,
    )
