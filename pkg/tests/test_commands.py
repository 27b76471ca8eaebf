"""
End-to-end tests of the commands on small generated scenes
"""

import json

import numpy as np
import pytest

from src.utils.commands import discover_scenes, load_command, map_scenes
from src.utils.concepts import ActivationStack, ConceptHead, Posterior
from src.utils.config import Config
from src.utils.exceptions import (
    EmptyInputError,
    InvalidInputError,
    MissingPosteriorError,
    MissingRequiredFieldError,
    ShapeMismatchError,
)
from src.utils.storage import load_head, load_scene, save_activations, save_head

from conftest import RULES_DIR

SCENE_SPEC = """\
image_size: [32, 32]
persons: [1, 2]
person_height: [12.0, 20.0]
fn_prob: 0.5
fp_prob: 0.3
occlusion_prob: 0.1
concept_noise:
  blur_sigma: 0.5
  amplitude: 0.05
seed: 3
"""


async def run_command(name: str, **fields):
    Config().load_from_dict(**fields)
    return await load_command(name, Config(), silent=True)()


@pytest.fixture
async def scenes_dir(tmp_path):
    spec = tmp_path / "spec.yaml"
    spec.write_text(SCENE_SPEC)
    out = tmp_path / "scenes"
    await run_command("gen", spec_file=str(spec), n_scenes=3, output_dir=str(out))
    Config().reset()
    return out


def monitor_fields(scenes_dir, out, rule="fn_arm.fzr", **extra):
    return dict(
        rule_file=str(RULES_DIR / rule),
        scenes_dir=str(scenes_dir),
        output_dir=str(out),
        ksize_m=5,
        ksize_gt=5,
        **extra,
    )


def separable_npz(path, seed=0):
    rng = np.random.default_rng(seed)
    acts = rng.normal(size=(16, 3, 4, 4))
    labels = (acts[:, 0] > 0.3).astype(float)
    return save_activations(ActivationStack(acts, labels, "layer3"), path)


def scene_activations(path, n_scenes=3, seed=0):
    """One (2, 8, 8) activation sample per 32x32 scene."""
    rng = np.random.default_rng(seed)
    stack = ActivationStack(rng.normal(size=(n_scenes, 2, 8, 8)), np.zeros((n_scenes, 32, 32)))
    return save_activations(stack, path)


def head_file(path, posterior=True):
    weights = np.array([3.0, -2.0])
    fitted = None
    if posterior:
        fitted = Posterior(np.append(weights, 0.5), np.diag([4.0, 4.0, 4.0]), 1.0)
    return save_head(ConceptHead(weights, 0.5, "layer3", fitted), path)


class TestRegistry:
    """Test command lookup."""

    def test_unknown_command(self):
        with pytest.raises(InvalidInputError):
            load_command("explain", Config())

    def test_names(self):
        assert load_command("calib-report", Config()).name == "calib-report"
        assert load_command("train-head", Config()).name == "train-head"


class TestPool:
    """Test scene discovery and mapping."""

    async def test_discover_sorted(self, scenes_dir):
        scenes = discover_scenes(scenes_dir)
        assert [p.name for p in scenes] == ["scene_0000", "scene_0001", "scene_0002"]
        assert discover_scenes(scenes[0]) == [scenes[0]]

    def test_discover_empty(self, tmp_path):
        with pytest.raises(EmptyInputError):
            discover_scenes(tmp_path)

    async def test_map_keeps_order(self):
        assert await map_scenes(abs, [-3, 1, -2], jobs=1, silent=True) == [3, 1, 2]


class TestGen:
    """Test scene generation."""

    async def test_writes_scenes_and_spec(self, tmp_path):
        spec = tmp_path / "spec.yaml"
        spec.write_text(SCENE_SPEC)
        summary = await run_command(
            "gen", spec_file=str(spec), n_scenes=2, encoding="png", output_dir=str(tmp_path / "o")
        )
        assert summary["n_scenes"] == 2
        assert summary["seed"] == 3
        written = json.loads((tmp_path / "o" / "spec.json").read_text())
        assert written["image_size"] == [32, 32]
        scene = load_scene(tmp_path / "o" / "scene_0001")
        assert scene.manifest.channel("arm").file == "arm.png"

    async def test_deterministic(self, tmp_path):
        spec = tmp_path / "spec.yaml"
        spec.write_text(SCENE_SPEC)
        for name in ("a", "b"):
            await run_command("gen", spec_file=str(spec), output_dir=str(tmp_path / name))
        a = load_scene(tmp_path / "a" / "scene_0000")
        b = load_scene(tmp_path / "b" / "scene_0000")
        assert a.box_set("person") == b.box_set("person")
        assert a.mask("arm") == b.mask("arm")


class TestRuleCommands:
    """Test eval, monitor, sweep, rank and compare."""

    async def test_eval_closed_rule(self, scenes_dir, tmp_path):
        out = tmp_path / "eval"
        summary = await run_command(
            "eval",
            rule_file=str(RULES_DIR / "fn_arm.fzr"),
            scenes_dir=str(scenes_dir),
            output_dir=str(out),
        )
        assert summary["n_scenes"] == 3
        assert 0.0 <= summary["global_score"] <= 1.0
        record = json.loads((out / "scores.json").read_text())
        assert record["rule_id"] == "fn_arm"
        assert [s["scene_id"] for s in record["scenes"]] == [
            "scene_0000",
            "scene_0001",
            "scene_0002",
        ]
        assert "mask" not in record["scenes"][0]
        assert record["provenance"]["config_fingerprint"] == Config().fingerprint()

    async def test_eval_open_rule_writes_masks(self, scenes_dir, tmp_path):
        out = tmp_path / "eval"
        await run_command(
            "eval",
            rule_file=str(RULES_DIR / "open_fn_arm.fzr"),
            scenes_dir=str(scenes_dir),
            output_dir=str(out),
            rule_id="open",
        )
        record = json.loads((out / "scores.json").read_text())
        mask_scene = load_scene(record["scenes"][0]["mask"])
        assert mask_scene.mask("formula").shape == (32, 32)

    async def test_eval_requires_rule(self, scenes_dir):
        with pytest.raises(MissingRequiredFieldError):
            await run_command("eval", scenes_dir=str(scenes_dir))

    async def test_monitor(self, scenes_dir, tmp_path):
        out = tmp_path / "monitor"
        summary = await run_command("monitor", **monitor_fields(scenes_dir, out))
        assert summary["n_scenes"] == 3
        reports = json.loads((out / "monitor_reports.json").read_text())
        assert len(reports) == 3
        record = json.loads((out / "monitor_summary.json").read_text())
        assert {"image", "pixel"} <= record.keys()
        assert record["monitor"]["ksize_m"] == 5

    async def test_sweep(self, scenes_dir, tmp_path):
        out = tmp_path / "sweep"
        summary = await run_command("sweep", plot=True, **monitor_fields(scenes_dir, out))
        record = json.loads((out / "sweep.json").read_text())
        assert {"image", "pixel"} <= set(record["levels"])
        header = (out / "sweep_pixel.csv").read_text().splitlines()[0]
        assert header == "threshold,precision,recall,tpr,fpr"
        assert (out / "pixel_roc.svg").exists()
        assert "image_pr" in summary["files"]

    async def test_boolean_sweep_couples_threshold(self, scenes_dir, tmp_path):
        """Boolean logic re-evaluates the rule at every swept threshold."""
        out = tmp_path / "sweep"
        await run_command(
            "sweep", family="boolean", thresholds="linear", **monitor_fields(scenes_dir, out)
        )
        record = json.loads((out / "sweep.json").read_text())
        assert "pixel" in record["levels"]
        assert len(record["levels"]["pixel"]["thresholds"]) == 201

    async def test_rank(self, scenes_dir, tmp_path):
        out = tmp_path / "rank"
        summary = await run_command("rank", top_k=2, **monitor_fields(scenes_dir, out))
        ranking = summary["ranking"]
        assert len(ranking) <= 2
        assert [r["rank"] for r in ranking] == list(range(1, len(ranking) + 1))
        scores = [r["score"] for r in ranking]
        assert scores == sorted(scores, reverse=True)
        assert (out / "corner_cases.json").exists()

    async def test_compare(self, scenes_dir, tmp_path):
        out = tmp_path / "compare"
        summary = await run_command(
            "compare",
            compare_families=["goedel", "product"],
            compare_implications=["S", "R"],
            compare_denoise=[False],
            **monitor_fields(scenes_dir, out),
        )
        rows = summary["variants"]
        assert [(r["family"], r["implication"]) for r in rows] == [
            ("goedel", "S"),
            ("goedel", "R"),
            ("product", "S"),
            ("product", "R"),
        ]
        assert all(0.0 <= r["global_score"] <= 1.0 for r in rows)
        table = (out / "compare.txt").read_text().splitlines()
        assert table[0].split()[0] == "family"
        assert len(table) == 6

    async def test_compare_calibrated_falls_back(self, scenes_dir, tmp_path):
        """Scenes without calibrated channels score the same either way."""
        out = tmp_path / "compare"
        summary = await run_command(
            "compare",
            compare_families=["product"],
            compare_implications=["S"],
            compare_denoise=[False],
            compare_calibration=[False, True],
            **monitor_fields(scenes_dir, out),
        )
        plain, calibrated = summary["variants"]
        assert calibrated["calibrated"] is True
        assert calibrated["global_score"] == plain["global_score"]


class TestHeadCommands:
    """Test train-head, calibrate and calib-report."""

    async def test_train_calibrate_report(self, tmp_path):
        acts = separable_npz(tmp_path / "acts.npz")
        out = tmp_path / "heads"
        summary = await run_command(
            "train-head",
            activations_file=str(acts),
            optimizer="lbfgs",
            val_fraction=0.0,
            output_dir=str(out),
        )
        head_path = out / "layer3_head.json"
        assert summary["head"] == str(head_path)
        assert load_head(head_path).posterior is None

        summary = await run_command("calibrate", head_file=str(head_path), prior_grid=[0.1, 1.0])
        cal_path = out / "layer3_head_cal.json"
        assert summary["head"] == str(cal_path)
        assert summary["prior_precision"] in (0.1, 1.0)
        assert load_head(cal_path).posterior is not None

        summary = await run_command("calib-report", head_file=str(cal_path), plot=True)
        assert set(summary["results"]) == {"map", "laplace"}
        for result in summary["results"].values():
            assert 0.0 <= result["ece"] <= result["mce"] <= 1.0
        record = json.loads((out / "layer3_calibration.json").read_text())
        assert record["n_samples"] == 16
        assert (out / "layer3_laplace_reliability.svg").exists()

    async def test_report_without_posterior(self, tmp_path):
        acts = separable_npz(tmp_path / "acts.npz")
        out = tmp_path / "heads"
        await run_command(
            "train-head",
            activations_file=str(acts),
            optimizer="lbfgs",
            val_fraction=0.0,
            output_dir=str(out),
        )
        summary = await run_command("calib-report", head_file=str(out / "layer3_head.json"))
        assert set(summary["results"]) == {"map"}

    async def test_missing_activations(self, tmp_path):
        with pytest.raises(MissingRequiredFieldError):
            await run_command("train-head", output_dir=str(tmp_path))


class TestApplyHead:
    """Test writing head predictions into scenes and reading them back."""

    def apply_fields(self, scenes_dir, tmp_path, **extra):
        return dict(
            head_file=str(head_file(tmp_path / "head.json", extra.pop("posterior", True))),
            activations_file=str(scene_activations(tmp_path / "acts.npz")),
            scenes_dir=str(scenes_dir),
            concept="arm",
            **extra,
        )

    async def test_calibrated_channels_change_score(self, scenes_dir, tmp_path):
        """--calibrated rules read <concept>_cal and score differently."""
        summary = await run_command(
            "apply-head", calibrated=True, **self.apply_fields(scenes_dir, tmp_path)
        )
        assert summary["channel"] == "arm_cal"
        assert summary["scenes"] == ["scene_0000", "scene_0001", "scene_0002"]
        scene = load_scene(scenes_dir / "scene_0000")
        assert scene.mask("arm_cal").shape == (32, 32)
        assert scene.manifest.has_channel("person")

        scores = {}
        for calibrated in (False, True):
            Config().reset()
            scores[calibrated] = await run_command(
                "eval",
                rule_file=str(RULES_DIR / "fn_arm.fzr"),
                scenes_dir=str(scenes_dir),
                output_dir=str(tmp_path / f"eval_{calibrated}"),
                calibrated=calibrated,
            )
        assert scores[True]["global_score"] != pytest.approx(scores[False]["global_score"])

        Config().reset()
        out = tmp_path / "monitor"
        summary = await run_command("monitor", calibrated=True, **monitor_fields(scenes_dir, out))
        assert summary["n_scenes"] == 3

    async def test_map_replaces_concept(self, scenes_dir, tmp_path):
        """Without calibration the MAP mask overwrites the concept channel."""
        before = load_scene(scenes_dir / "scene_0001").mask("arm")
        summary = await run_command(
            "apply-head", **self.apply_fields(scenes_dir, tmp_path, posterior=False)
        )
        assert summary["channel"] == "arm"
        after = load_scene(scenes_dir / "scene_0001")
        assert not after.mask("arm").allclose(before)
        assert not after.manifest.has_channel("arm_cal")

    async def test_calibrated_needs_posterior(self, scenes_dir, tmp_path):
        with pytest.raises(MissingPosteriorError):
            await run_command(
                "apply-head",
                calibrated=True,
                **self.apply_fields(scenes_dir, tmp_path, posterior=False),
            )

    async def test_one_sample_per_scene(self, scenes_dir, tmp_path):
        fields = self.apply_fields(scenes_dir, tmp_path)
        fields["activations_file"] = str(scene_activations(tmp_path / "two.npz", n_scenes=2))
        with pytest.raises(ShapeMismatchError):
            await run_command("apply-head", **fields)


class TestCli:
    """Test the entry point's exit codes."""

    @pytest.fixture(autouse=True)
    def quiet_cli(self, monkeypatch):
        import main
        from utils.config import Config as CliConfig

        monkeypatch.setattr(main, "setup_logger", lambda *args, **kwargs: None)
        CliConfig().reset()
        yield main
        CliConfig().reset()

    def test_usage_error(self, quiet_cli, capsys):
        assert quiet_cli.run([]) == 1
        error = json.loads(capsys.readouterr().err)
        assert error["status"] == 1

    def test_missing_field(self, quiet_cli):
        assert quiet_cli.run(["--silent", "eval"]) == 1

    def test_gen_succeeds(self, quiet_cli, tmp_path, capsys):
        code = quiet_cli.run(
            ["--silent", "gen", "--n-scenes", "1", "--output", str(tmp_path / "scenes")]
        )
        assert code == 0
        response = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert response["data"]["n_scenes"] == 1
        assert (tmp_path / "scenes" / "scene_0000" / "manifest.json").exists()

    def test_rule_syntax_error(self, quiet_cli, tmp_path):
        rule = tmp_path / "bad.fzr"
        rule.write_text("forall p in P: arm(p) $ person(p)\n")
        (tmp_path / "scenes").mkdir()
        code = quiet_cli.run(
            ["--silent", "eval", "--rule", str(rule), "--scenes", str(tmp_path / "scenes")]
        )
        assert code == 2


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
