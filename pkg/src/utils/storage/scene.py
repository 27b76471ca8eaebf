"""
Scene container format.

A scene is a directory holding manifest.json plus one data file per
channel. Mask channels are raw float32 little-endian row-major (.f32) or
8-bit grayscale PNG (value / 255); box channels are JSON arrays of
[x0, y0, x1, y1, score].
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from PIL import Image
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..exceptions import (
    ChannelShapeError,
    DataParsingError,
    MissingChannelError,
    UnknownChannelKindError,
    ValueRangeError,
)
from ..logging_utils import LogCategory, get_category_logger
from ..masks import BoundingBox, Shape, TruthMask

logger = get_category_logger(LogCategory.IO)

MANIFEST_NAME = "manifest.json"


class ChannelKind(str, Enum):
    MASK = "mask"
    BOXES = "boxes"


class MaskEncoding(str, Enum):
    RAW = "raw"
    PNG = "png"


class ChannelSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)
    kind: ChannelKind
    height: int = Field(gt=0)
    width: int = Field(gt=0)
    file: str
    encoding: Optional[MaskEncoding] = None

    @property
    def shape(self) -> Shape:
        return (self.height, self.width)


class SceneManifest(BaseModel):
    model_config = ConfigDict(frozen=True)

    scene_id: str = Field(min_length=1)
    image_size: tuple[int, int]
    channels: List[ChannelSpec] = Field(default_factory=list)
    provenance: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _unique_names(self):
        names = [c.name for c in self.channels]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"duplicate channel names: {', '.join(duplicates)}")
        if min(self.image_size) <= 0:
            raise ValueError(f"image_size must be positive, got {self.image_size}")
        return self

    @property
    def image_shape(self) -> Shape:
        return tuple(self.image_size)

    def channel(self, name: str) -> ChannelSpec:
        for spec in self.channels:
            if spec.name == name:
                return spec
        raise MissingChannelError(name, self.scene_id)

    def has_channel(self, name: str) -> bool:
        return any(spec.name == name for spec in self.channels)

    @property
    def channel_names(self) -> List[str]:
        return [c.name for c in self.channels]


@dataclass(frozen=True)
class SceneBundle:
    """One image's channels: truth masks and box sets keyed by channel name."""

    manifest: SceneManifest
    masks: Dict[str, TruthMask] = field(default_factory=dict)
    boxes: Dict[str, List[BoundingBox]] = field(default_factory=dict)

    @property
    def scene_id(self) -> str:
        return self.manifest.scene_id

    @property
    def image_shape(self) -> Shape:
        return self.manifest.image_shape

    def mask(self, name: str) -> TruthMask:
        if name not in self.masks:
            raise MissingChannelError(name, self.scene_id)
        return self.masks[name]

    def box_set(self, name: str) -> List[BoundingBox]:
        if name not in self.boxes:
            raise MissingChannelError(name, self.scene_id)
        return self.boxes[name]

    @classmethod
    def from_channels(
        cls,
        scene_id: str,
        image_shape: Shape,
        masks: Optional[Dict[str, TruthMask]] = None,
        boxes: Optional[Dict[str, List[BoundingBox]]] = None,
        provenance: Optional[Dict[str, Any]] = None,
        encoding: MaskEncoding = MaskEncoding.RAW,
    ) -> "SceneBundle":
        """Build a bundle in memory together with a matching manifest."""
        masks = dict(masks or {})
        boxes = {k: list(v) for k, v in (boxes or {}).items()}
        specs = [
            ChannelSpec(
                name=name,
                kind=ChannelKind.MASK,
                height=m.height,
                width=m.width,
                file=f"{name}.{'f32' if encoding == MaskEncoding.RAW else 'png'}",
                encoding=encoding,
            )
            for name, m in masks.items()
        ]
        specs += [
            ChannelSpec(
                name=name,
                kind=ChannelKind.BOXES,
                height=image_shape[0],
                width=image_shape[1],
                file=f"{name}.json",
            )
            for name in boxes
        ]
        manifest = SceneManifest(
            scene_id=scene_id,
            image_size=tuple(image_shape),
            channels=specs,
            provenance=dict(provenance or {}),
        )
        return cls(manifest, masks, boxes)

    def with_mask(
        self, name: str, mask: TruthMask, encoding: MaskEncoding = MaskEncoding.RAW
    ) -> "SceneBundle":
        """A copy with the mask channel name added, or replaced when it exists."""
        spec = ChannelSpec(
            name=name,
            kind=ChannelKind.MASK,
            height=mask.height,
            width=mask.width,
            file=f"{name}.{'f32' if encoding == MaskEncoding.RAW else 'png'}",
            encoding=encoding,
        )
        channels = [c for c in self.manifest.channels if c.name != name] + [spec]
        manifest = self.manifest.model_copy(update={"channels": channels})
        boxes = {k: v for k, v in self.boxes.items() if k != name}
        return SceneBundle(manifest, {**self.masks, name: mask}, boxes)


def _check_range(arr: np.ndarray, channel: str) -> np.ndarray:
    if not np.all(np.isfinite(arr)) or arr.min(initial=0.0) < 0.0 or arr.max(initial=0.0) > 1.0:
        raise ValueRangeError(f"channel '{channel}'", 0.0, 1.0)
    return arr


def _read_mask(path: Path, spec: ChannelSpec) -> TruthMask:
    encoding = spec.encoding or (MaskEncoding.PNG if path.suffix == ".png" else MaskEncoding.RAW)
    if encoding == MaskEncoding.RAW:
        raw = path.read_bytes()
        expected = spec.height * spec.width * 4
        if len(raw) != expected:
            raise ChannelShapeError(
                spec.name, f"raw file has {len(raw)} bytes, expected {expected} for {spec.shape}"
            )
        arr = np.frombuffer(raw, dtype="<f4").reshape(spec.shape).astype(np.float64)
    else:
        with Image.open(path) as img:
            if img.mode != "L":
                raise ChannelShapeError(
                    spec.name, f"PNG mode {img.mode}, expected 8-bit grayscale"
                )
            arr = np.asarray(img, dtype=np.float64) / 255.0
        if arr.shape != spec.shape:
            raise ChannelShapeError(
                spec.name, f"PNG is {arr.shape}, manifest declares {spec.shape}"
            )
    return TruthMask(_check_range(arr, spec.name))


def _read_boxes(path: Path, spec: ChannelSpec) -> List[BoundingBox]:
    try:
        rows = json.loads(path.read_text(encoding="utf-8"))
        return [BoundingBox.from_list(row) for row in rows]
    except (json.JSONDecodeError, ValidationError, TypeError, ValueError, IndexError) as e:
        raise DataParsingError(f"boxes of channel '{spec.name}'", str(e)) from None


def read_manifest(path: Union[str, Path]) -> SceneManifest:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataParsingError("scene manifest", str(e)) from None

    for channel in raw.get("channels", []):
        kind = channel.get("kind")
        if kind not in {k.value for k in ChannelKind}:
            raise UnknownChannelKindError(channel.get("name", "?"), str(kind))
    try:
        return SceneManifest.model_validate(raw)
    except ValidationError as e:
        raise DataParsingError("scene manifest", str(e)) from None


def load_scene(path: Union[str, Path]) -> SceneBundle:
    """
    Load a scene from its manifest file or directory.

    Raises:
        ChannelShapeError: data file size disagrees with the declared shape
        ValueRangeError: decoded values outside [0, 1]
        UnknownChannelKindError: channel kind is neither mask nor boxes
    """
    path = Path(path)
    manifest_path = path / MANIFEST_NAME if path.is_dir() else path
    manifest = read_manifest(manifest_path)
    root = manifest_path.parent

    masks, boxes = {}, {}
    for spec in manifest.channels:
        data_path = root / spec.file
        if not data_path.exists():
            raise MissingChannelError(spec.name, manifest.scene_id)
        if spec.kind == ChannelKind.MASK:
            masks[spec.name] = _read_mask(data_path, spec)
        else:
            boxes[spec.name] = _read_boxes(data_path, spec)

    logger.debug(
        "Loaded scene {} with {} mask and {} box channels".format(
            manifest.scene_id, len(masks), len(boxes)
        )
    )
    return SceneBundle(manifest, masks, boxes)


def write_scene(
    bundle: SceneBundle,
    directory: Union[str, Path],
    encoding: Optional[MaskEncoding] = None,
) -> Path:
    """Write bundle under directory; returns the manifest path. Inverse of load_scene."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    specs = []
    for spec in bundle.manifest.channels:
        if spec.kind == ChannelKind.MASK:
            enc = MaskEncoding(encoding or spec.encoding or MaskEncoding.RAW)
            stem = Path(spec.file).stem
            file = f"{stem}.{'f32' if enc == MaskEncoding.RAW else 'png'}"
            arr = bundle.mask(spec.name).array
            if enc == MaskEncoding.RAW:
                (directory / file).write_bytes(arr.astype("<f4").tobytes(order="C"))
            else:
                Image.fromarray(np.round(arr * 255.0).astype(np.uint8)).save(directory / file)
            specs.append(spec.model_copy(update={"file": file, "encoding": enc}))
        else:
            rows = [box.to_list() for box in bundle.box_set(spec.name)]
            (directory / spec.file).write_text(json.dumps(rows), encoding="utf-8")
            specs.append(spec)

    manifest = bundle.manifest.model_copy(update={"channels": specs})
    manifest_path = directory / MANIFEST_NAME
    manifest_path.write_text(
        json.dumps(manifest.model_dump(mode="json"), indent=2, sort_keys=True), encoding="utf-8"
    )
    logger.debug("Wrote scene {} to {}".format(bundle.scene_id, directory))
    return manifest_path


def add_mask_channel(
    path: Union[str, Path],
    name: str,
    mask: TruthMask,
    encoding: MaskEncoding = MaskEncoding.RAW,
) -> Path:
    """Add (or replace) one mask channel of the scene stored at path."""
    path = Path(path)
    directory = path if path.is_dir() else path.parent
    scene = load_scene(directory)
    return write_scene(scene.with_mask(name, mask, encoding), directory)
