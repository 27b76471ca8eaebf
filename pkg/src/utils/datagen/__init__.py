from .keypoints import (
    CONCEPTS,
    POINT_CONCEPTS,
    LIMB_CONCEPTS,
    SKELETON,
    WIDTH_FRACTION,
    Keypoint,
    KeypointAnnotation,
    capsule_mask,
    concept_keypoints,
    keypoints_to_concept_masks,
)
from .generator import BODY_TEMPLATE, ConceptNoise, SceneSpec, generate_scene
