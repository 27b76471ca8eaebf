"""
Binding of rule predicates to scene channels.

Every predicate name (and every region used as a quantifier domain or
membership guard) must name a channel of the manifest. Mask channels are
brought to one common grid: the image size when upscaling, the smallest
channel resolution when downscaling. Box channels are rasterized at image
size first and then scaled like masks.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

import numpy as np

from ..exceptions import BindError, ShapeMismatchError, UnknownPredicateError
from ..logging_utils import LogCategory, get_category_logger
from ..logic import LogicSystem
from ..masks import ScalingPolicy, Shape, TruthMask, binarize, boxes_to_mask, rescale
from ..storage.scene import ChannelKind, ChannelSpec, SceneBundle, SceneManifest
from .ast import DenoiseGuard, Formula, Predicate, predicate_names
from .transform import rewrite

logger = get_category_logger(LogCategory.PLAN)

# region membership is crisp: a pixel belongs to a region if its mask is >= 0.5
MEMBERSHIP_THRESHOLD = 0.5


class MembershipForm(str, Enum):
    """Lowering of region-restricted quantifiers."""

    RESTRICTED = "restricted"
    IMPLICATION = "implication"


@dataclass(frozen=True)
class BoundFormula:
    formula: Formula
    channels: Dict[str, ChannelSpec]
    image_shape: Shape
    grid_shape: Shape
    scaling: ScalingPolicy = ScalingPolicy.UPSCALE
    membership_form: MembershipForm = MembershipForm.RESTRICTED
    manifest_id: Optional[str] = field(default=None, compare=False)

    @property
    def n_pixels(self) -> int:
        return self.grid_shape[0] * self.grid_shape[1]


def _channel_shape(spec: ChannelSpec, image_shape: Shape) -> Shape:
    return image_shape if spec.kind == ChannelKind.BOXES else spec.shape


def _grid_shape(
    channels: Dict[str, ChannelSpec], image_shape: Shape, policy: ScalingPolicy
) -> Shape:
    shapes = {name: _channel_shape(spec, image_shape) for name, spec in channels.items()}
    if policy == ScalingPolicy.UPSCALE:
        for name, (h, w) in shapes.items():
            if h > image_shape[0] or w > image_shape[1]:
                raise BindError(
                    f"channel is {h}x{w}, larger than the image {image_shape}; cannot upscale", name
                )
        return tuple(image_shape)

    if not shapes:
        return tuple(image_shape)
    target = (min(s[0] for s in shapes.values()), min(s[1] for s in shapes.values()))
    for name, (h, w) in shapes.items():
        if h % target[0] or w % target[1]:
            raise BindError(
                f"channel {h}x{w} is no integer multiple of the common grid {target}; "
                "use the upscale policy",
                name,
            )
    return target


def bind(
    f: Formula,
    manifest: SceneManifest,
    scaling: ScalingPolicy = ScalingPolicy.UPSCALE,
    denoise: Optional[float] = None,
    membership_form: MembershipForm = MembershipForm.RESTRICTED,
) -> BoundFormula:
    """
    Resolve predicates against manifest and fix the common grid.

    Args:
        f: Parsed formula
        manifest: Scene manifest providing the channels
        scaling: Policy reconciling channel resolutions
        denoise: If set, wrap every unguarded mask predicate in a denoise guard
        membership_form: Lowering of region-restricted quantifiers

    Raises:
        UnknownPredicateError: a predicate names no channel of the manifest
        BindError: channel resolutions are irreconcilable under the policy
    """
    scaling = ScalingPolicy(scaling)
    channels = {}
    for name in sorted(predicate_names(f)):
        if not manifest.has_channel(name):
            raise UnknownPredicateError(name)
        channels[name] = manifest.channel(name)

    if denoise is not None:
        def guard(node: Formula) -> Formula:
            if isinstance(node, Predicate) and channels[node.name].kind == ChannelKind.MASK:
                return DenoiseGuard(float(denoise), node, span=node.span)
            return node

        f = rewrite(f, guard, skip=(DenoiseGuard,))

    grid = _grid_shape(channels, manifest.image_shape, scaling)
    logger.debug(
        "Bound {} channel(s) of scene {} on grid {} ({})".format(
            len(channels), manifest.scene_id, grid, scaling.value
        )
    )
    return BoundFormula(
        formula=f,
        channels=channels,
        image_shape=manifest.image_shape,
        grid_shape=grid,
        scaling=scaling,
        membership_form=MembershipForm(membership_form),
        manifest_id=manifest.scene_id,
    )


class ChannelLoader:
    """Loads bound channels of one scene on the common grid, caching each channel once."""

    def __init__(self, bound: BoundFormula, scene: SceneBundle, logic: LogicSystem):
        if tuple(scene.image_shape) != tuple(bound.image_shape):
            raise ShapeMismatchError(bound.image_shape, scene.image_shape, "scene image")
        self.bound = bound
        self.scene = scene
        self.logic = logic
        self._cache: Dict[str, TruthMask] = {}

    def raw(self, name: str) -> TruthMask:
        """The channel as stored: mask as is, boxes rasterized at image size."""
        spec = self.bound.channels[name]
        if spec.kind == ChannelKind.BOXES:
            return boxes_to_mask(self.scene.box_set(name), self.bound.image_shape, self.logic)
        return self.scene.mask(name)

    def grid(self, name: str) -> TruthMask:
        if name not in self._cache:
            self._cache[name] = rescale(self.raw(name), self.bound.grid_shape, self.bound.scaling)
        return self._cache[name]

    def membership(self, region: str) -> np.ndarray:
        return binarize(self.grid(region), MEMBERSHIP_THRESHOLD).array
