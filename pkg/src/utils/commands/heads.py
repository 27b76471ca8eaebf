"""
Concept head commands: training, Laplace calibration, calibration reports and
writing head outputs into scenes as concept channels.
"""

from dataclasses import replace
from functools import partial
from pathlib import Path
from typing import Any, Dict

from ..concepts import ActivationStack, laplace_fit, predict_stack, select_prior_precision
from ..concepts import train_head
from ..exceptions import MissingPosteriorError, ShapeMismatchError
from ..logging_utils import LogCategory, get_category_logger
from ..metrics import binary_calibration, siou
from ..storage import load_activations, load_head, plot_reliability_svg, save_head, write_json
from .base import Command
from .jobs import apply_head_scene
from .pool import discover_scenes, map_scenes

logger = get_category_logger(LogCategory.CALIBRATION)


class HeadCommand(Command):
    def activations(self) -> ActivationStack:
        return load_activations(self.existing_file("activations_file"))

    def head_path(self, default_name: str) -> Path:
        if self.config.head_out:
            return Path(self.config.head_out)
        return self.output_dir() / default_name


class TrainHeadCommand(HeadCommand):
    name = "train-head"

    async def _run(self) -> Dict[str, Any]:
        config = self.config
        data = self.activations()
        head = train_head(data, config.loss_kind(), config.training_hyper())
        head = replace(head, metadata={**head.metadata, "config_fingerprint": config.fingerprint()})
        path = save_head(head, self.head_path(f"{data.layer_id}_head.json"))
        return {"head": str(path), "layer_id": head.layer_id, **head.metadata}


class CalibrateCommand(HeadCommand):
    """
    Laplace posterior of a trained head: at the configured prior precision,
    or grid-searched on validation ECE when a prior grid is given.
    """

    name = "calibrate"

    async def _run(self) -> Dict[str, Any]:
        config = self.config
        head = load_head(self.existing_file("head_file"))
        data = self.activations().with_positives()
        train, val = data.split(config.val_fraction, config.seed)
        if config.prior_grid:
            head = select_prior_precision(head, train, val, config.prior_grid, config.n_bins)
        else:
            head = laplace_fit(head, train, config.prior_precision)
        head = replace(head, metadata={**head.metadata, "config_fingerprint": config.fingerprint()})
        name = f"{head.layer_id}_head{config.calibrated_suffix}.json"
        path = save_head(head, self.head_path(name))
        return {
            "head": str(path),
            "prior_precision": head.posterior.prior_precision,
            "method": head.posterior.method,
        }


class CalibReportCommand(HeadCommand):
    """ECE, MCE and sIoU of a head on held-out activations, with and without calibration."""

    name = "calib-report"

    async def _run(self) -> Dict[str, Any]:
        config = self.config
        head = load_head(self.existing_file("head_file"))
        data = self.activations()
        out = self.output_dir()

        variants = {"map": False}
        if head.posterior is not None:
            variants["laplace"] = True
        results, files = {}, {}
        for label, calibrated in variants.items():
            probs = predict_stack(head, data.activations, calibrated, data.label_shape)
            report = binary_calibration(probs, data.labels, config.n_bins)
            results[label] = {
                **report.to_record(),
                "siou": siou(data.labels, probs, config.t_siou),
            }
            if config.plot:
                path = out / f"{head.layer_id}_{label}_reliability.svg"
                files[label] = str(plot_reliability_svg(report, path, f"{head.layer_id} {label}"))

        write_json(
            {
                "layer_id": head.layer_id,
                "n_samples": data.n_samples,
                "n_bins": config.n_bins,
                "t_siou": config.t_siou,
                "results": results,
                "head_metadata": head.metadata,
                "provenance": self.provenance(),
            },
            out / f"{head.layer_id}_calibration.json",
        )
        summary = {label: {k: r[k] for k in ("ece", "mce", "siou")} for label, r in results.items()}
        return {"results": summary, "plots": files}


class ApplyHeadCommand(HeadCommand):
    """
    Predict a concept mask per scene and store it as a scene channel. The
    i-th activation sample belongs to the i-th scene in name order. With
    calibration the Laplace predictive is written to <concept>_cal, else the
    MAP prediction replaces <concept>.
    """

    name = "apply-head"

    async def _run(self) -> Dict[str, Any]:
        config = self.config
        head = load_head(self.existing_file("head_file"))
        if config.calibrated and head.posterior is None:
            raise MissingPosteriorError(head.layer_id)
        data = self.activations()
        scenes = discover_scenes(self.require("scenes_dir"))
        if data.n_samples != len(scenes):
            raise ShapeMismatchError(
                (len(scenes),), (data.n_samples,), "activation samples (one per scene)"
            )

        concept = self.require("concept")
        channel = concept + (config.calibration_suffix() or "")
        written = await map_scenes(
            partial(apply_head_scene, head, channel, bool(config.calibrated)),
            list(zip(scenes, data.activations)),
            config.jobs,
            self.name,
            self.silent,
        )
        logger.info("Wrote channel {} into {} scenes".format(channel, len(written)))
        return {
            "channel": channel,
            "calibrated": bool(config.calibrated),
            "layer_id": head.layer_id,
            "scenes": written,
        }
