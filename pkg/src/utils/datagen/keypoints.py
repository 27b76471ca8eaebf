"""
Keypoint annotations and their rasterization into body-part concept masks.

Point concepts become filled discs at their keypoints. Limb concepts
become discs at every visible joint joined by thick lines along visible
skeleton links, i.e. a union of capsules. Disc diameter and line width are
5% of the person's body height. Occluded keypoints are ignored.
"""

from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..masks import BoundingBox, Shape, pixel_centers

WIDTH_FRACTION = 0.05

POINT_CONCEPTS: Dict[str, Tuple[str, ...]] = {
    "eye": ("left_eye", "right_eye"),
    "wrist": ("left_wrist", "right_wrist"),
    "ankle": ("left_ankle", "right_ankle"),
}
LIMB_CONCEPTS: Dict[str, Tuple[Tuple[str, str], ...]] = {
    "arm": (
        ("left_shoulder", "left_elbow"),
        ("left_elbow", "left_wrist"),
        ("right_shoulder", "right_elbow"),
        ("right_elbow", "right_wrist"),
    ),
    "leg": (
        ("left_hip", "left_knee"),
        ("left_knee", "left_ankle"),
        ("right_hip", "right_knee"),
        ("right_knee", "right_ankle"),
    ),
}
CONCEPTS: Tuple[str, ...] = ("eye", "arm", "wrist", "leg", "ankle")

SKELETON: Tuple[Tuple[str, str], ...] = (
    ("left_shoulder", "left_elbow"),
    ("left_elbow", "left_wrist"),
    ("right_shoulder", "right_elbow"),
    ("right_elbow", "right_wrist"),
    ("left_hip", "left_knee"),
    ("left_knee", "left_ankle"),
    ("right_hip", "right_knee"),
    ("right_knee", "right_ankle"),
    ("left_shoulder", "right_shoulder"),
    ("left_hip", "right_hip"),
    ("left_shoulder", "left_hip"),
    ("right_shoulder", "right_hip"),
    ("left_eye", "right_eye"),
)


class Keypoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    visible: bool = True


class KeypointAnnotation(BaseModel):
    """One person: named keypoints in pixel coordinates, skeleton links and the person box.

    With image_shape set, every visible keypoint must lie inside the image;
    keypoints outside it have to be flagged occluded.
    """

    model_config = ConfigDict(frozen=True)

    keypoints: Dict[str, Keypoint] = Field(default_factory=dict)
    skeleton: Tuple[Tuple[str, str], ...] = SKELETON
    box: BoundingBox
    body_height: Optional[float] = Field(default=None, gt=0.0)
    image_shape: Optional[Tuple[int, int]] = None

    @model_validator(mode="after")
    def _check_inside(self):
        if self.image_shape is None:
            return self
        height, width = self.image_shape
        for name, kp in self.keypoints.items():
            if kp.visible and not (0.0 <= kp.x <= width and 0.0 <= kp.y <= height):
                raise ValueError(
                    f"visible keypoint {name} at ({kp.x}, {kp.y}) lies outside {self.image_shape}"
                )
        return self

    def estimated_height(self) -> float:
        """Annotated body height, else the box height."""
        return self.body_height if self.body_height is not None else self.box.height

    def visible(self, name: str) -> Optional[Keypoint]:
        kp = self.keypoints.get(name)
        return kp if kp is not None and kp.visible else None


def concept_keypoints(concept: str) -> Tuple[str, ...]:
    if concept in POINT_CONCEPTS:
        return POINT_CONCEPTS[concept]
    links = LIMB_CONCEPTS.get(concept, ())
    return tuple(dict.fromkeys(name for link in links for name in link))


def capsule_mask(
    shape: Shape, start: Tuple[float, float], end: Tuple[float, float], radius: float
) -> np.ndarray:
    """
    Pixels whose centers lie within radius of the segment start-end, as booleans.

    Points are (x, y); start == end gives a disc.
    """
    rows, cols = pixel_centers(shape)
    ax, ay = start
    dx, dy = end[0] - ax, end[1] - ay
    length2 = dx * dx + dy * dy
    if length2 == 0.0:
        t = np.zeros(shape)
    else:
        t = np.clip(((cols - ax) * dx + (rows - ay) * dy) / length2, 0.0, 1.0)
    dist2 = (cols - ax - t * dx) ** 2 + (rows - ay - t * dy) ** 2
    return dist2 <= radius * radius


def keypoints_to_concept_masks(
    ann: KeypointAnnotation,
    image_shape: Shape,
    concepts: Tuple[str, ...] = CONCEPTS,
) -> Dict[str, np.ndarray]:
    """Binary (0/1 float) mask per concept for one annotated person."""
    radius = 0.5 * WIDTH_FRACTION * ann.estimated_height()
    masks = {}
    for concept in concepts:
        out = np.zeros(image_shape, dtype=bool)
        links = LIMB_CONCEPTS.get(concept, ())
        for name in concept_keypoints(concept):
            kp = ann.visible(name)
            if kp is not None:
                out |= capsule_mask(image_shape, (kp.x, kp.y), (kp.x, kp.y), radius)
        drawn = set(ann.skeleton) | {(b, a) for a, b in ann.skeleton}
        for a, b in links:
            if (a, b) in drawn:
                ka, kb = ann.visible(a), ann.visible(b)
                if ka is not None and kb is not None:
                    out |= capsule_mask(image_shape, (ka.x, ka.y), (kb.x, kb.y), radius)
        masks[concept] = out.astype(np.float64)
    return masks
