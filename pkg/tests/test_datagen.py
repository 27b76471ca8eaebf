"""
Unit Tests for synthetic scene generation
"""

import numpy as np
import pytest
from pydantic import ValidationError

from src.utils.datagen import (
    CONCEPTS,
    ConceptNoise,
    Keypoint,
    KeypointAnnotation,
    SceneSpec,
    capsule_mask,
    concept_keypoints,
    generate_scene,
    keypoints_to_concept_masks,
)
from src.utils.exceptions import LayoutError
from src.utils.masks import BoundingBox
from src.utils.storage import MaskEncoding

SMALL = dict(image_size=(64, 64), persons=(1, 2), person_height=(20.0, 30.0))


class TestSceneSpec:
    """Test generation parameters."""

    def test_defaults(self):
        spec = SceneSpec()
        assert spec.image_size == (128, 128)
        assert spec.concepts == CONCEPTS
        assert spec.encoding == MaskEncoding.RAW

    def test_scene_id(self):
        assert SceneSpec(scene_prefix="img_").scene_id(7) == "img_0007"

    def test_empty_range(self):
        with pytest.raises(ValidationError):
            SceneSpec(persons=(3, 1))

    def test_shrink_range(self):
        with pytest.raises(ValidationError):
            SceneSpec(shrink=(0.0, 1.0))

    def test_probability_range(self):
        with pytest.raises(ValidationError):
            SceneSpec(fn_prob=1.5)


class TestGenerateScene:
    """Test scene generation."""

    def test_channels(self):
        """Both box channels and a gt/predicted mask pair per concept."""
        scene = generate_scene(SceneSpec(**SMALL))
        assert set(scene.boxes) == {"gt_person", "person"}
        for concept in CONCEPTS:
            assert scene.mask(concept).shape == (64, 64)
            assert scene.mask(f"gt_{concept}").shape == (64, 64)
        assert scene.scene_id == "scene_0000"

    def test_deterministic(self):
        """Same spec and index give the same scene."""
        spec = SceneSpec(**SMALL, seed=5, concept_noise=ConceptNoise())
        a, b = generate_scene(spec, 3), generate_scene(spec, 3)
        assert a.box_set("gt_person") == b.box_set("gt_person")
        for name in a.masks:
            assert a.mask(name) == b.mask(name)
        assert a.manifest.provenance == b.manifest.provenance

    def test_persons_inside_image(self):
        spec = SceneSpec(**SMALL, seed=11)
        for index in range(5):
            for box in generate_scene(spec, index).box_set("gt_person"):
                assert 0.0 <= box.x0 < box.x1 <= 64.0
                assert 0.0 <= box.y0 < box.y1 <= 64.0

    def test_clean_predictions_match_ground_truth(self):
        """Without injected errors the predicted channels equal the ground truth."""
        scene = generate_scene(SceneSpec(**SMALL, seed=2))
        for gt, pred in zip(scene.box_set("gt_person"), scene.box_set("person")):
            assert pred.to_list() == pytest.approx(gt.to_list())
        for concept in CONCEPTS:
            assert scene.mask(concept) == scene.mask(f"gt_{concept}")

    def test_ground_truth_masks_binary(self):
        scene = generate_scene(SceneSpec(**SMALL, concept_noise=ConceptNoise()))
        for concept in CONCEPTS:
            gt = scene.mask(f"gt_{concept}").array
            assert np.all((gt == 0.0) | (gt == 1.0))
            pred = scene.mask(concept).array
            assert pred.min() >= 0.0 and pred.max() <= 1.0

    def test_all_persons_dropped(self):
        """fn_prob 1 removes every predicted person."""
        scene = generate_scene(SceneSpec(**SMALL, fn_prob=1.0))
        n = len(scene.box_set("gt_person"))
        assert scene.box_set("person") == []
        assert scene.manifest.provenance["dropped_persons"] == list(range(n))

    def test_spurious_boxes(self):
        """fp_prob 1 adds one spurious box per person, listed in the provenance."""
        scene = generate_scene(SceneSpec(**SMALL, fp_prob=1.0, seed=4))
        n = len(scene.box_set("gt_person"))
        assert len(scene.box_set("person")) == 2 * n
        assert scene.manifest.provenance["spurious_boxes"] == list(range(n, 2 * n))

    def test_full_occlusion(self):
        """Occluded keypoints draw nothing."""
        scene = generate_scene(SceneSpec(**SMALL, occlusion_prob=1.0))
        for concept in CONCEPTS:
            assert scene.mask(f"gt_{concept}").array.max() == 0.0

    def test_layout_error(self):
        """Four 20-pixel-wide persons do not fit into 16-pixel columns."""
        spec = SceneSpec(image_size=(64, 64), persons=(4, 4), person_height=(50.0, 50.0))
        with pytest.raises(LayoutError):
            generate_scene(spec)

    def test_png_encoding_carried(self):
        scene = generate_scene(SceneSpec(**SMALL, encoding=MaskEncoding.PNG))
        assert scene.manifest.channel("arm").file == "arm.png"


class TestKeypoints:
    """Test keypoint rasterization."""

    def test_disc(self):
        """A unit disc on a pixel center covers it and its four neighbours."""
        mask = capsule_mask((5, 5), (2.5, 2.5), (2.5, 2.5), 1.0)
        assert mask.sum() == 5
        assert mask[2, 2] and mask[1, 2] and not mask[1, 1]

    def test_capsule(self):
        """A horizontal segment covers the pixel centers along it."""
        mask = capsule_mask((5, 10), (2.5, 2.5), (7.5, 2.5), 0.5)
        assert mask.sum() == 6
        assert mask[2, 2:8].all()

    def test_concept_keypoints(self):
        assert concept_keypoints("eye") == ("left_eye", "right_eye")
        assert concept_keypoints("arm") == (
            "left_shoulder",
            "left_elbow",
            "left_wrist",
            "right_shoulder",
            "right_elbow",
            "right_wrist",
        )
        assert concept_keypoints("tail") == ()

    def test_height_estimate(self):
        box = BoundingBox(x0=0, y0=0, x1=10, y1=40)
        assert KeypointAnnotation(box=box).estimated_height() == 40.0
        assert KeypointAnnotation(box=box, body_height=60.0).estimated_height() == 60.0

    def test_visible_keypoints_inside_image(self):
        """Keypoints outside the image must be flagged occluded."""
        box = BoundingBox(x0=0, y0=0, x1=10, y1=20)
        with pytest.raises(ValidationError):
            KeypointAnnotation(
                keypoints={"left_eye": Keypoint(x=12.0, y=3.0)}, box=box, image_shape=(10, 10)
            )
        ann = KeypointAnnotation(
            keypoints={"left_eye": Keypoint(x=12.0, y=3.0, visible=False)},
            box=box,
            image_shape=(10, 10),
        )
        assert ann.visible("left_eye") is None

    def test_point_and_limb_masks(self):
        """Radius is 2.5% of the body height; limbs join visible joints."""
        box = BoundingBox(x0=0, y0=0, x1=10, y1=20)
        ann = KeypointAnnotation(
            keypoints={
                "left_shoulder": Keypoint(x=2.5, y=2.5),
                "left_elbow": Keypoint(x=7.5, y=2.5),
                "left_eye": Keypoint(x=5.5, y=7.5, visible=False),
            },
            box=box,
        )
        masks = keypoints_to_concept_masks(ann, (10, 10), ("arm", "eye"))
        assert masks["arm"].sum() == 6
        assert masks["arm"][2, 2:8].tolist() == [1.0] * 6
        assert masks["eye"].sum() == 0

    def test_unlinked_joints_stay_discs(self):
        """Without the skeleton link only the joint discs are drawn."""
        box = BoundingBox(x0=0, y0=0, x1=10, y1=40)
        ann = KeypointAnnotation(
            keypoints={
                "left_shoulder": Keypoint(x=2.5, y=2.5),
                "left_elbow": Keypoint(x=7.5, y=2.5),
            },
            skeleton=(),
            box=box,
        )
        mask = keypoints_to_concept_masks(ann, (10, 10), ("arm",))["arm"]
        assert mask.sum() == 10
        assert mask[2, 5] == 0.0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
