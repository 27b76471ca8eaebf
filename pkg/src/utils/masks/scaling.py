"""
Resolution reconciliation for truth masks.

Upscaling is bilinear on pixel centers (align_corners=False), downscaling
is block maxpooling with integer block factors.
"""

from enum import Enum

import numpy as np
import torch
import torch.nn.functional as F

from ..exceptions import BlockSizeError, ScaleDirectionError
from ..validators import validate_shape
from .types import Shape, TruthMask


class ScalingPolicy(str, Enum):
    UPSCALE = "upscale"
    DOWNSCALE = "downscale"


def _as_tensor(m: TruthMask) -> torch.Tensor:
    return torch.from_numpy(np.array(m.array))[None, None]


def upscale_bilinear(m: TruthMask, shape: Shape) -> TruthMask:
    shape = validate_shape(shape)
    if shape == m.shape:
        return m
    if shape[0] < m.height or shape[1] < m.width:
        raise ScaleDirectionError("upscale_bilinear", m.shape, shape)

    out = F.interpolate(_as_tensor(m), size=shape, mode="bilinear", align_corners=False)
    return TruthMask(out[0, 0].clamp(0.0, 1.0).numpy())


def downscale_maxpool(m: TruthMask, shape: Shape) -> TruthMask:
    shape = validate_shape(shape)
    if shape == m.shape:
        return m
    if shape[0] > m.height or shape[1] > m.width:
        raise ScaleDirectionError("downscale_maxpool", m.shape, shape)
    if m.height % shape[0] or m.width % shape[1]:
        raise BlockSizeError(m.shape, shape)

    block = (m.height // shape[0], m.width // shape[1])
    out = F.max_pool2d(_as_tensor(m), kernel_size=block, stride=block)
    return TruthMask(out[0, 0].numpy())


def rescale(m: TruthMask, shape: Shape, policy: ScalingPolicy) -> TruthMask:
    if ScalingPolicy(policy) == ScalingPolicy.UPSCALE:
        return upscale_bilinear(m, shape)
    return downscale_maxpool(m, shape)
