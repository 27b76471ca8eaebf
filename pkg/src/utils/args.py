import argparse
import os
from typing import List, Optional

from .exceptions import InvalidInputError

COMMANDS = (
    "eval",
    "monitor",
    "sweep",
    "train-head",
    "calibrate",
    "calib-report",
    "apply-head",
    "gen",
    "rank",
    "compare",
)


class ArgumentParser(argparse.ArgumentParser):
    """Raises instead of exiting so usage errors reach the error record."""

    def error(self, message):
        raise InvalidInputError("arguments", message)


def _global_flags(parser: argparse.ArgumentParser):
    parser.add_argument(
        "-c",
        "--config",
        default=None,
        type=str,
        help='YAML or JSON run config. For example: "example" refers to configs/example.yaml',
    )
    parser.add_argument(
        "--log_level",
        default="INFO",
        type=str,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Level of logs to show",
    )
    parser.add_argument(
        "--log_dir",
        default=os.path.join(os.getcwd(), "logs"),
        type=str,
        help="Storing folder for logs",
    )
    parser.add_argument("--silent", action="store_true", help="Suppress console outputs")


def _flag(parser, name: str, dest: str, **kwargs):
    parser.add_argument(name, dest=dest, default=None, **kwargs)


def _switch(parser, name: str, dest: str, help_text: str):
    parser.add_argument(
        name, dest=dest, action="store_const", const=True, default=None, help=help_text
    )


def _output_flags(parser):
    _flag(parser, "--output", "output_dir", type=str, help="Output directory")
    _flag(parser, "--jobs", "jobs", type=int, help="Worker processes for per-scene work")


def _rule_flags(parser):
    _flag(parser, "--rule", "rule_file", type=str, help="Rule file (.fzr)")
    _flag(parser, "--rule-id", "rule_id", type=str, help="Rule id in reports (default: file stem)")
    _flag(parser, "--scenes", "scenes_dir", type=str, help="Directory of scene directories")
    _flag(
        parser,
        "--logic",
        "family",
        choices=["lukasiewicz", "goedel", "product", "boolean"],
        help="Connective family",
    )
    _flag(parser, "--implication", "implication", choices=["S", "R"], help="Implication style")
    _flag(parser, "--forall", "forall_mode", choices=["mean", "tnorm_reduce"])
    _flag(
        parser, "--exists", "exists_mode", choices=["goedel_max", "max", "tconorm_reduce", "mean"]
    )
    _flag(parser, "--bool-threshold", "bool_threshold", type=float)
    _flag(parser, "--scaling", "scaling", choices=["upscale", "downscale"])
    _flag(parser, "--membership-form", "membership_form", choices=["restricted", "implication"])
    _switch(parser, "--denoise", "denoise", "Denoise every concept mask predicate")
    _flag(parser, "--t-denoise", "t_denoise", type=float)
    _switch(parser, "--calibrated", "calibrated", "Read calibrated concept channels where present")
    _output_flags(parser)


def _monitor_flags(parser):
    _flag(parser, "--region-mode", "region_mode", choices=["simple", "peaks"])
    _flag(parser, "--ksize", "ksize_m", type=int, help="Window of the peaks region monitor")
    _flag(parser, "--ksize-gt", "ksize_gt", type=int, help="Window of the ground-truth verdict")
    _flag(parser, "--t-px", "t_px", type=float)
    _flag(parser, "--t-reg", "t_reg", type=float)
    _flag(parser, "--t-gt-reg", "t_gt_reg", type=float)
    _flag(parser, "--t-ped", "t_ped", type=float)
    _flag(parser, "--roi", "region_of_interest", type=str, help="Region-of-interest channel")
    _flag(parser, "--person-channel", "person_channel", type=str)
    _flag(parser, "--gt-person-channel", "gt_person_channel", type=str)
    _flag(parser, "--body-parts", "body_part_channels", nargs="+", type=str)
    _flag(parser, "--gt-body-parts", "gt_body_part_channels", nargs="+", type=str)


def _training_flags(parser):
    _flag(parser, "--activations", "activations_file", type=str, help="Activation stack (.npz)")
    _flag(parser, "--loss", "loss", choices=["bce", "balanced_bce", "dice"])
    _flag(parser, "--optimizer", "optimizer", choices=["adam", "lbfgs"])
    _flag(parser, "--lr", "lr", type=float)
    _flag(parser, "--batch-size", "batch_size", type=int)
    _flag(parser, "--max-epochs", "max_epochs", type=int)
    _flag(parser, "--val-fraction", "val_fraction", type=float)
    _flag(parser, "--prior-precision", "prior_precision", type=float)
    _flag(parser, "--seed", "seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog="logicmon", description="Fuzzy-logic rule monitors for masks")
    _global_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    p = sub.add_parser("eval", help="Evaluate a rule on scenes")
    _rule_flags(p)

    p = sub.add_parser("monitor", help="Pixel, region and prediction monitors with aggregate rates")
    _rule_flags(p)
    _monitor_flags(p)

    p = sub.add_parser("sweep", help="Threshold sweeps of the monitors against ground truth")
    _rule_flags(p)
    _monitor_flags(p)
    _flag(p, "--thresholds", "thresholds", choices=["linear", "dense"])
    _switch(p, "--plot", "plot", "Write SVG curve plots")

    p = sub.add_parser("train-head", help="Train a concept head on exported activations")
    _training_flags(p)
    _flag(p, "--out", "head_out", type=str, help="Head file to write")

    p = sub.add_parser("calibrate", help="Fit the Laplace posterior of a head")
    _flag(p, "--head", "head_file", type=str)
    _training_flags(p)
    _flag(p, "--prior-grid", "prior_grid", nargs="+", type=float, help="Grid-search the prior")
    _flag(p, "--out", "head_out", type=str, help="Head file to write")

    p = sub.add_parser("calib-report", help="ECE/MCE of a head, with and without calibration")
    _flag(p, "--head", "head_file", type=str)
    _flag(p, "--activations", "activations_file", type=str)
    _flag(p, "--n-bins", "n_bins", type=int)
    _flag(p, "--t-siou", "t_siou", type=float)
    _switch(p, "--plot", "plot", "Write reliability diagrams")
    _output_flags(p)

    p = sub.add_parser("apply-head", help="Write head predictions into scenes as a concept channel")
    _flag(p, "--head", "head_file", type=str)
    _flag(p, "--activations", "activations_file", type=str, help="One activation sample per scene")
    _flag(p, "--scenes", "scenes_dir", type=str, help="Directory of scene directories")
    _flag(p, "--concept", "concept", type=str, help="Concept channel name, e.g. arm")
    _switch(p, "--calibrated", "calibrated", "Write the Laplace predictive to <concept>_cal")
    _flag(p, "--jobs", "jobs", type=int, help="Worker processes for per-scene work")

    p = sub.add_parser("gen", help="Generate synthetic scenes")
    _flag(p, "--spec", "spec_file", type=str, help="Scene spec (JSON)")
    _flag(p, "--n-scenes", "n_scenes", type=int)
    _flag(p, "--seed", "seed", type=int)
    _flag(p, "--encoding", "encoding", choices=["raw", "png"])
    _output_flags(p)

    p = sub.add_parser("rank", help="Rank scenes by corner-case score")
    _rule_flags(p)
    _monitor_flags(p)
    _flag(p, "--top-k", "top_k", type=int)

    p = sub.add_parser("compare", help="Global consistency scores across logic variants")
    _rule_flags(p)
    _monitor_flags(p)
    _flag(p, "--families", "compare_families", nargs="+", type=str)
    _flag(p, "--implications", "compare_implications", nargs="+", type=str)
    _flag(p, "--scalings", "compare_scaling", nargs="+", type=str)

    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)
