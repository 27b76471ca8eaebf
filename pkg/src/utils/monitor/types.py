from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..masks import BoundingBox, TruthMask
from ..validators import validate_odd_ksize


class RegionMode(str, Enum):
    SIMPLE = "simple"
    PEAKS = "peaks"


class MonitorConfig(BaseModel):
    """
    Monitor thresholds and window sizes.

    ksize_m smooths the pixel monitor for the peaks region score, ksize_gt
    does the same for the ground-truth verdict. 33 px is about the height of
    a head at the evaluated image sizes.
    """

    model_config = ConfigDict(frozen=True)

    t_px: float = Field(default=0.5, ge=0.0, le=1.0)
    t_reg: float = Field(default=0.5, ge=0.0, le=1.0)
    t_gt_reg: float = Field(default=0.5, ge=0.0, le=1.0)
    t_ped: float = Field(default=0.5, ge=0.0, le=1.0)
    ksize_m: int = 33
    ksize_gt: int = 33
    region_mode: RegionMode = RegionMode.PEAKS
    corner_case_floor: float = Field(default=1e-3, ge=0.0, le=1.0)
    region_of_interest: Optional[str] = None
    person_channel: str = "person"
    gt_person_channel: str = "gt_person"
    body_part_channels: Tuple[str, ...] = ()
    gt_body_part_channels: Tuple[str, ...] = ()

    @field_validator("ksize_m", "ksize_gt")
    @classmethod
    def _odd(cls, value):
        return validate_odd_ksize(value)


@dataclass(frozen=True)
class PredictionReport:
    index: int
    box: BoundingBox
    formula: float
    monitor: float
    ground_truth: Optional[bool] = None

    @property
    def box_size(self) -> Tuple[float, float]:
        return (self.box.height, self.box.width)

    def to_record(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "box": self.box.to_list(),
            "box_height": self.box.height,
            "box_width": self.box.width,
            "formula": self.formula,
            "monitor": self.monitor,
            "ground_truth": self.ground_truth,
        }


@dataclass(frozen=True)
class MonitorReport:
    scene_id: str
    rule_id: str
    pixel_monitor: TruthMask
    alarms: TruthMask
    region_score: float
    verdict: bool
    region_mode: RegionMode
    rule_score: Optional[float] = None
    gt_pixels: Optional[TruthMask] = None
    gt_verdict: Optional[bool] = None
    predictions: List[PredictionReport] = field(default_factory=list)
    provenance: Dict[str, Any] = field(default_factory=dict)

    def to_record(self) -> Dict[str, Any]:
        """JSON-serializable summary; masks are reduced to pixel counts."""
        record = {
            "scene_id": self.scene_id,
            "rule_id": self.rule_id,
            "region_mode": self.region_mode.value,
            "region_score": self.region_score,
            "verdict": self.verdict,
            "rule_score": self.rule_score,
            "alarm_pixels": int(np.count_nonzero(self.alarms.array)),
            "max_pixel_monitor": float(self.pixel_monitor.array.max()),
            "gt_verdict": self.gt_verdict,
            "predictions": [p.to_record() for p in self.predictions],
            "provenance": self.provenance,
        }
        if self.gt_pixels is not None:
            record["gt_pixels"] = int(np.count_nonzero(self.gt_pixels.array))
        return record
