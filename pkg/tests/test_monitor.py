"""
Unit Tests for the pixel, region, prediction and dataset monitors
"""

import numpy as np
import pytest

from conftest import random_scene
from src.utils.datagen import CONCEPTS, ConceptNoise, SceneSpec, generate_scene
from src.utils.exceptions import EmptyInputError, KernelSizeError
from src.utils.logic import Family, LogicSystem
from src.utils.masks import BoundingBox, TruthMask, box_support
from src.utils.metrics import beta_key, coupled_sweep, sweep
from src.utils.monitor import (
    MonitorConfig,
    RegionMode,
    corner_case_score,
    evaluate_monitors,
    fn_ground_truth,
    fp_formula,
    fp_ground_truth,
    fp_monitor,
    global_consistency,
    pixel_alarms,
    pixel_monitor,
    rank_corner_cases,
    region_ground_truth,
    region_monitor_peaks,
    region_monitor_simple,
    region_score,
    restrict_to_region,
)
from src.utils.rules import bind, evaluate, lower, parse
from src.utils.storage import SceneBundle

PRODUCT = LogicSystem(family=Family.PRODUCT)
GOEDEL = LogicSystem(family=Family.GOEDEL)


def isolated_pixel(size: int) -> TruthMask:
    arr = np.zeros((size, size))
    arr[size // 2, size // 2] = 1.0
    return TruthMask(arr)


class TestPixelMonitor:
    """Test the negated rule mask and its alarms."""

    def test_pixel_monitor_negates(self):
        """M(p) = !F(p)."""
        m = pixel_monitor(TruthMask([[0.2, 1.0]]), PRODUCT)
        np.testing.assert_allclose(m.array, [[0.8, 0.0]])

    def test_alarms_binarize_at_t_px(self):
        """Alarms fire at and above t_px."""
        cfg = MonitorConfig(t_px=0.6)
        alarms = pixel_alarms(TruthMask([[0.59, 0.6, 0.9]]), cfg)
        np.testing.assert_array_equal(alarms.array, [[0.0, 1.0, 1.0]])

    def test_region_of_interest(self):
        """The monitor is ANDed with the ROI mask."""
        m = TruthMask([[0.8, 0.8]])
        roi = TruthMask([[1.0, 0.0]])
        np.testing.assert_allclose(restrict_to_region(m, roi, PRODUCT).array, [[0.8, 0.0]])
        assert restrict_to_region(m, None, PRODUCT) is m


class TestRegionMonitor:
    """Test the simple and peaks region scores."""

    def test_simple_is_max(self):
        """The simple region monitor is the existential over all pixels."""
        assert region_monitor_simple(isolated_pixel(9), PRODUCT) == 1.0

    def test_peaks_isolated_pixel(self):
        """A lone alarm pixel averages to 1/1089 in a 33x33 window."""
        cfg = MonitorConfig(ksize_m=33)
        score = region_monitor_peaks(isolated_pixel(65), cfg, PRODUCT)
        assert score == pytest.approx(1.0 / 1089.0)

    def test_peaks_dense_region(self):
        """A filled block scores 1 with a window no larger than the block."""
        arr = np.zeros((20, 20))
        arr[5:12, 5:12] = 1.0
        cfg = MonitorConfig(ksize_m=5)
        assert region_monitor_peaks(TruthMask(arr), cfg, PRODUCT) == pytest.approx(1.0)

    def test_region_score_dispatch(self):
        """region_score follows the configured mode."""
        m = isolated_pixel(65)
        assert region_score(m, MonitorConfig(region_mode=RegionMode.SIMPLE), PRODUCT) == 1.0
        assert region_score(m, MonitorConfig(), PRODUCT) < 0.01

    def test_even_ksize_rejected(self):
        """Monitor windows are odd."""
        with pytest.raises(KernelSizeError):
            MonitorConfig(ksize_m=32)


class TestGroundTruth:
    """Test false-negative and false-positive ground truth."""

    def test_fn_pixel(self):
        """Predicted 0.2 against GT 1 is a false negative under Goedel."""
        cfg = MonitorConfig()
        fn = fn_ground_truth(TruthMask([[0.2, 1.0]]), TruthMask([[1.0, 1.0]]), cfg, GOEDEL)
        np.testing.assert_array_equal(fn.array, [[1.0, 0.0]])

    def test_fn_region_verdict(self):
        """545 FN cells of a 33x33 window exceed half of it."""
        cfg = MonitorConfig(ksize_gt=33)
        arr = np.zeros(33 * 33)
        arr[:545] = 1.0
        assert region_ground_truth(TruthMask(arr.reshape(33, 33)), cfg, PRODUCT)
        assert not region_ground_truth(TruthMask.zeros((33, 33)), cfg, PRODUCT)

    def test_boolean_ground_truth_is_threshold_free(self):
        """The Boolean binarization threshold never moves the FN labels or verdict."""
        cfg = MonitorConfig(ksize_gt=5)
        pred = TruthMask.full((12, 12), 0.45)
        gt_arr = np.zeros((12, 12))
        gt_arr[2:10, 2:10] = 1.0
        gt = TruthMask(gt_arr)
        for t in (0.3, 0.5, 0.7):
            logic = LogicSystem(family=Family.BOOLEAN, bool_threshold=t)
            fn = fn_ground_truth(pred, gt, cfg, logic)
            assert fn.array.sum() == 64
            assert region_ground_truth(fn, cfg, logic)

    def test_fp_ground_truth(self):
        """Confident predictions barely covered by GT are false positives."""
        gt = [BoundingBox(x0=0, y0=0, x1=10, y1=20)]
        preds = [
            BoundingBox(x0=0, y0=0, x1=10, y1=20, score=0.9),
            BoundingBox(x0=20, y0=0, x1=30, y1=20, score=0.9),
            BoundingBox(x0=20, y0=0, x1=30, y1=20, score=0.4),
        ]
        assert fp_ground_truth(preds, gt, (20, 30)) == [False, True, False]

    def test_fp_ground_truth_default_extent(self):
        """Without a shape the extent of all boxes is used."""
        preds = [BoundingBox(x0=40, y0=40, x1=50, y1=60, score=0.8)]
        assert fp_ground_truth(preds, []) == [True]


class TestPredictionMonitor:
    """Test the per-prediction body-part rule."""

    def test_person_without_body_part(self):
        """A 0.9 box with no body part: formula 0.1, monitor 0.9 under Goedel."""
        box = BoundingBox(x0=0, y0=0, x1=4, y1=4, score=0.9)
        parts = TruthMask.zeros((8, 8))
        assert fp_formula(box, parts, GOEDEL) == pytest.approx(0.1)
        assert fp_monitor([box], parts, GOEDEL)[0] == pytest.approx(0.9)

    def test_person_with_body_part(self):
        """A body part inside the box satisfies the rule."""
        box = BoundingBox(x0=0, y0=0, x1=4, y1=4, score=1.0)
        arr = np.zeros((8, 8))
        arr[1, 1] = 1.0
        assert fp_formula(box, TruthMask(arr), GOEDEL) == 1.0


class TestDatasetMonitors:
    """Test global consistency and corner-case ranking."""

    def test_global_consistency_mean(self):
        """The dataset score is the universal over image scores."""
        assert global_consistency([0.99, 0.97], PRODUCT) == pytest.approx(0.98)

    def test_global_consistency_empty(self):
        """No images, no score."""
        with pytest.raises(EmptyInputError):
            global_consistency([], PRODUCT)

    def test_rank_corner_cases(self):
        """Scenes are ranked by their strongest alarm."""
        ranked = rank_corner_cases(
            [("scene1", TruthMask([[0.5]])), ("scene2", TruthMask([[0.9]]))], PRODUCT
        )
        assert [scene for scene, _ in ranked] == ["scene2", "scene1"]
        assert ranked[0][1] == pytest.approx(0.9)

    def test_rank_ties_and_top_k(self):
        """Ties keep scene id order; top_k truncates."""
        results = [("b", TruthMask([[0.4]])), ("a", TruthMask([[0.4]])), ("c", TruthMask([[0.1]]))]
        assert rank_corner_cases(results, PRODUCT, top_k=2) == [("a", 0.4), ("b", 0.4)]

    def test_corner_case_floor(self):
        """Pixels below the floor do not count."""
        assert corner_case_score(TruthMask([[0.0005, 0.0]]), PRODUCT, floor=1e-3) == 0.0


class TestSceneReport:
    """Test monitor report assembly on a scene."""

    def test_evaluate_monitors(self, rng):
        """Rule score, GT attachment and one prediction record per box."""
        scene = random_scene(rng, (16, 16))
        cfg = MonitorConfig(ksize_m=5, ksize_gt=5, body_part_channels=("eye", "arm"))
        bound = bind(parse("forall p in P: arm(p) -> person(p)"), scene.manifest)
        plan = lower(bound, PRODUCT)

        report = evaluate_monitors(plan, scene, cfg, rule_id="fn_arm", fingerprint="abc")

        assert report.rule_score == pytest.approx(evaluate(plan, scene))
        assert report.gt_verdict is not None
        assert report.gt_pixels is not None
        assert len(report.predictions) == len(scene.box_set("person"))
        assert report.verdict == (report.region_score >= cfg.t_reg)
        record = report.to_record()
        assert record["rule_id"] == "fn_arm"
        assert record["provenance"]["config_fingerprint"] == "abc"
        for prediction in report.predictions:
            assert prediction.monitor == pytest.approx(1.0 - prediction.formula)
            assert prediction.ground_truth in (True, False)

    def test_boolean_report_ground_truth_is_stable(self):
        """Scene ground truth is the same at every Boolean threshold."""
        scene = SceneBundle.from_channels(
            "low_score",
            (12, 12),
            masks={"arm": TruthMask.full((12, 12), 0.8)},
            boxes={
                "person": [BoundingBox(x0=0, y0=0, x1=12, y1=12, score=0.45)],
                "gt_person": [BoundingBox(x0=2, y0=2, x1=10, y1=10)],
            },
        )
        cfg = MonitorConfig(ksize_m=5, ksize_gt=5)
        bound = bind(parse("forall p in P: arm(p) -> person(p)"), scene.manifest)
        seen = []
        for t in (0.3, 0.5, 0.7):
            plan = lower(bound, LogicSystem(family=Family.BOOLEAN, bool_threshold=t))
            report = evaluate_monitors(plan, scene, cfg)
            seen.append((report.gt_pixels.array.sum(), report.gt_verdict))
        assert seen == [(64.0, True)] * 3


BODY_RULE = "forall p in P: (eye(p) | arm(p) | wrist(p) | leg(p) | ankle(p)) -> person(p)"
GT_PARTS = tuple(f"gt_{concept}" for concept in CONCEPTS)
# blur 0.5 keeps part pixels above 0.56 and every other pixel below 0.44
SCENE_SPEC = SceneSpec(
    image_size=(64, 64),
    persons=(1, 2),
    person_height=(40.0, 60.0),
    fn_prob=0.5,
    concept_noise=ConceptNoise(blur_sigma=0.5, amplitude=0.05),
    n_scenes=200,
    seed=21,
)


@pytest.fixture(scope="module")
def generated_scenes():
    return [generate_scene(SCENE_SPEC, i) for i in range(SCENE_SPEC.n_scenes)]


def run_monitors(scenes, logic: LogicSystem, ksize: int = 9):
    cfg = MonitorConfig(ksize_m=ksize, ksize_gt=ksize, gt_body_part_channels=GT_PARTS)
    plan = lower(bind(parse(BODY_RULE), scenes[0].manifest), logic)
    return [evaluate_monitors(plan, scene, cfg) for scene in scenes]


def pixel_pairs(reports):
    scores = np.concatenate([r.pixel_monitor.array.ravel() for r in reports])
    gt = np.concatenate([r.gt_pixels.array.ravel() for r in reports])
    return scores, gt


def image_pairs(reports):
    return [r.region_score for r in reports], [r.gt_verdict for r in reports]


class TestEndToEnd:
    """Monitors on generated scenes with dropped person detections."""

    def test_scenes_mix_both_classes(self, generated_scenes):
        dropped = [bool(s.manifest.provenance["dropped_persons"]) for s in generated_scenes]
        assert any(dropped) and not all(dropped)

    def test_pixel_and_image_auc(self, generated_scenes):
        reports = run_monitors(generated_scenes, PRODUCT)
        assert sweep(*pixel_pairs(reports)).auc_roc > 0.95
        assert sweep(*image_pairs(reports)).auc_roc > 0.90

    def test_fuzzy_f1_not_below_boolean(self, generated_scenes):
        """The Boolean baseline is re-evaluated at every swept threshold."""
        thresholds = [0.2, 0.35, 0.5, 0.65, 0.8]
        key = beta_key(1.0)
        fuzzy = sweep(*pixel_pairs(run_monitors(generated_scenes, GOEDEL)), thresholds)

        def boolean_pairs(t):
            logic = LogicSystem(family=Family.BOOLEAN, bool_threshold=t)
            return pixel_pairs(run_monitors(generated_scenes, logic))

        boolean = coupled_sweep(boolean_pairs, thresholds)
        assert fuzzy.best[key][1] > 0.0
        assert fuzzy.best[key][1] >= boolean.best[key][1]

    def test_region_auc_stable_across_window_sizes(self, generated_scenes):
        aucs = [
            sweep(*image_pairs(run_monitors(generated_scenes, PRODUCT, ksize))).auc_roc
            for ksize in (9, 17)
        ]
        assert abs(aucs[0] - aucs[1]) < 0.05

    def test_alarms_lie_on_dropped_body_parts(self, generated_scenes):
        """Every alarm is a body-part pixel of a person the detector dropped."""
        reports = run_monitors(generated_scenes, GOEDEL)
        n_alarms = 0
        for scene, report in zip(generated_scenes, reports):
            gt_boxes = scene.box_set("gt_person")
            dropped = np.zeros(scene.image_shape, dtype=bool)
            for i in scene.manifest.provenance["dropped_persons"]:
                dropped |= box_support(gt_boxes[i], scene.image_shape)
            parts = np.zeros(scene.image_shape, dtype=bool)
            for name in GT_PARTS:
                parts |= scene.mask(name).array >= 0.5
            expected = dropped & parts
            alarms = report.alarms.array >= 0.5
            assert not np.any(alarms & ~expected)
            np.testing.assert_array_equal(report.gt_pixels.array >= 0.5, expected)
            n_alarms += int(alarms.sum())
        assert n_alarms > 0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
