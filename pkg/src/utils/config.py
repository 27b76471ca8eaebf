import hashlib
import json
import os
from typing import Any, Dict, List, Union, get_args, get_origin, get_type_hints

import yaml
from pydantic import BaseModel, TypeAdapter, ValidationError

from .concepts import LossKind, OptimizerKind, TrainingHyper
from .datagen import SceneSpec
from .exceptions import (
    ConfigValidationError,
    DataParsingError,
    UnknownConfigFieldError,
    UnknownConfigFileError,
)
from .helpers.singleton import Singleton
from .logic import ExistsMode, ForallMode, Family, ImplicationStyle, LogicSystem
from .masks import ScalingPolicy
from .monitor import MonitorConfig, RegionMode
from .rules import MembershipForm
from .storage import MaskEncoding


def _build(model: type, **fields) -> BaseModel:
    try:
        return model(**fields)
    except ValidationError as e:
        error = e.errors()[0]
        field = ".".join(str(p) for p in error.get("loc", ())) or model.__name__
        raise ConfigValidationError(field, error.get("input"), error.get("msg", str(e))) from None


def _cast(hint, value):
    if get_origin(hint) is Union:
        hint = next(t for t in get_args(hint) if t is not type(None))
    # bool("false") is True and list("ab") is ["a", "b"]
    if hint in (bool, list) or get_origin(hint) is list:
        return TypeAdapter(hint).validate_python(value)
    return hint(value)


def _enum(enum_type, field: str, value):
    try:
        return enum_type(value)
    except ValueError:
        allowed = ", ".join(str(m.value) for m in enum_type)
        raise ConfigValidationError(field, value, f"must be one of: {allowed}") from None


class Config(metaclass=Singleton):
    # Every attribute must be typed for validation
    CONFIG_DIR: str = os.path.join(os.getcwd(), "configs")
    current_config: str = "Unsaved"

    # Inputs and outputs
    rule_file: str = None
    rule_id: str = None
    scenes_dir: str = None
    output_dir: str = os.path.join(os.getcwd(), "output")
    jobs: int = 1

    # Logic
    family: str = "product"
    implication: str = "S"
    forall_mode: str = "mean"
    exists_mode: str = "goedel_max"
    bool_threshold: float = 0.5
    scaling: str = "upscale"
    membership_form: str = "restricted"
    denoise: bool = False
    t_denoise: float = 0.005

    # Monitors
    t_px: float = 0.5
    t_reg: float = 0.5
    t_gt_reg: float = 0.5
    t_ped: float = 0.5
    ksize_m: int = 33
    ksize_gt: int = 33
    region_mode: str = "peaks"
    corner_case_floor: float = 1e-3
    region_of_interest: str = None
    person_channel: str = "person"
    gt_person_channel: str = "gt_person"
    body_part_channels: list = ["eye", "arm", "wrist", "leg", "ankle"]
    gt_body_part_channels: list = ["gt_eye", "gt_arm", "gt_wrist", "gt_leg", "gt_ankle"]
    top_k: int = 10

    # Metrics
    n_bins: int = 10
    betas: list = [1.0, 0.1, 10.0]
    thresholds: str = "linear"
    t_siou: float = 0.5
    plot: bool = False

    # Variant grid of the compare command
    compare_families: list = ["lukasiewicz", "goedel", "product"]
    compare_implications: list = ["S", "R"]
    compare_denoise: List[bool] = [False, True]
    compare_scaling: list = ["upscale"]
    compare_calibration: List[bool] = [False]

    # Calibrated concept channels
    calibrated: bool = False
    calibrated_suffix: str = "_cal"
    concept: str = None

    # Concept heads
    activations_file: str = None
    head_file: str = None
    head_out: str = None
    loss: str = "bce"
    optimizer: str = "adam"
    lr: float = 1e-3
    batch_size: int = 8
    max_epochs: int = 7
    early_stop_delta: float = 1e-3
    patience: int = 3
    val_fraction: float = 0.2
    prior_precision: float = 1.0
    prior_grid: list = None
    seed: int = 0

    # Scene generation
    spec_file: str = None
    n_scenes: int = None
    encoding: str = "raw"

    # Can raise: UnknownConfigFileError, UnknownConfigFieldError
    def load_from_name(self, config_name: str):
        filepath = config_name
        if not os.path.isfile(filepath):
            filepath = os.path.join(self.CONFIG_DIR, config_name + ".yaml")
        if not os.path.isfile(filepath):
            filepath = os.path.join(self.CONFIG_DIR, config_name)
        if not os.path.isfile(filepath):
            raise UnknownConfigFileError(filepath)

        # JSON is a YAML subset
        with open(filepath) as f:
            conf_d = yaml.safe_load(f) or {}

        self.load_from_dict(**conf_d)
        self.current_config = config_name

    def load_from_dict(self, **conf_d):
        uncommitted = dict(conf_d)
        config_typings = get_type_hints(Config)

        # Pre-check fields before committing changes
        for field in conf_d:
            if field not in config_typings or field.isupper() or field == "current_config":
                raise UnknownConfigFieldError(field)
            try:
                uncommitted[field] = (
                    _cast(config_typings[field], conf_d[field])
                    if conf_d[field] is not None
                    else None
                )  # attempt cast to correct typing
            except (TypeError, ValueError) as e:
                raise ConfigValidationError(field, conf_d[field], str(e)) from None

        # Commit config change request
        for field in uncommitted:
            setattr(self, field, uncommitted[field])

        self.current_config = "Unsaved"

    def reset(self):
        """Drop every override, back to the class defaults."""
        for field in list(vars(self)):
            delattr(self, field)

    def save(self, filepath: str):
        with open(filepath, "w") as f:
            yaml.safe_dump(self.get_config_dict(), f, sort_keys=True)

    def get_config_dict(self) -> Dict[str, Any]:
        return {
            field: getattr(self, field)
            for field in get_type_hints(Config)
            if not field.isupper() and field != "current_config"
        }

    def fingerprint(self) -> str:
        """sha256 of the canonical config; identical configs give identical hashes."""
        canonical = json.dumps(self.get_config_dict(), sort_keys=True, default=str)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    ## Domain parameter objects ####
    def logic_system(self, **overrides) -> LogicSystem:
        values = {
            "family": self.family,
            "implication": self.implication,
            "forall_mode": self.forall_mode,
            "exists_mode": self.exists_mode,
            **overrides,
        }
        exists = "goedel_max" if values["exists_mode"] == "max" else values["exists_mode"]
        return _build(
            LogicSystem,
            family=_enum(Family, "family", values["family"]),
            bool_threshold=self.bool_threshold,
            implication_style=_enum(ImplicationStyle, "implication", values["implication"]),
            forall_mode=_enum(ForallMode, "forall_mode", values["forall_mode"]),
            exists_mode=_enum(ExistsMode, "exists_mode", exists),
        )

    def scaling_policy(self, value: str = None) -> ScalingPolicy:
        return _enum(ScalingPolicy, "scaling", value or self.scaling)

    def membership(self) -> MembershipForm:
        return _enum(MembershipForm, "membership_form", self.membership_form)

    def denoise_threshold(self, enabled: bool = None):
        """t_denoise when denoising is on, else None."""
        enabled = self.denoise if enabled is None else enabled
        return self.t_denoise if enabled else None

    def calibration_suffix(self, enabled: bool = None):
        """The calibrated channel suffix when calibrated channels are read, else None."""
        enabled = self.calibrated if enabled is None else enabled
        return self.calibrated_suffix if enabled else None

    def monitor_config(self) -> MonitorConfig:
        return _build(
            MonitorConfig,
            t_px=self.t_px,
            t_reg=self.t_reg,
            t_gt_reg=self.t_gt_reg,
            t_ped=self.t_ped,
            ksize_m=self.ksize_m,
            ksize_gt=self.ksize_gt,
            region_mode=_enum(RegionMode, "region_mode", self.region_mode),
            corner_case_floor=self.corner_case_floor,
            region_of_interest=self.region_of_interest,
            person_channel=self.person_channel,
            gt_person_channel=self.gt_person_channel,
            body_part_channels=tuple(self.body_part_channels or ()),
            gt_body_part_channels=tuple(self.gt_body_part_channels or ()),
        )

    def loss_kind(self) -> LossKind:
        return _enum(LossKind, "loss", self.loss)

    def training_hyper(self) -> TrainingHyper:
        return _build(
            TrainingHyper,
            lr=self.lr,
            batch_size=self.batch_size,
            max_epochs=self.max_epochs,
            early_stop_delta=self.early_stop_delta,
            patience=self.patience,
            val_fraction=self.val_fraction,
            prior_precision=self.prior_precision,
            optimizer=_enum(OptimizerKind, "optimizer", self.optimizer),
            seed=self.seed,
        )

    def scene_spec(self) -> SceneSpec:
        """The spec file (when set) with n_scenes, seed and encoding overrides applied."""
        fields = {}
        if self.spec_file is not None:
            if not os.path.isfile(self.spec_file):
                raise UnknownConfigFileError(self.spec_file)
            with open(self.spec_file) as f:
                try:
                    fields = yaml.safe_load(f) or {}
                except yaml.YAMLError as e:
                    raise DataParsingError("scene spec", str(e)) from None
        if self.n_scenes is not None:
            fields["n_scenes"] = self.n_scenes
        if "seed" not in fields or self.seed != Config.seed:
            fields["seed"] = self.seed
        fields.setdefault("encoding", _enum(MaskEncoding, "encoding", self.encoding))
        return _build(SceneSpec, **fields)
