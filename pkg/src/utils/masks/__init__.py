from .types import (
    TruthMask,
    CloseByKind,
    CloseByParams,
    BoundingBox,
    Shape,
    pixel_centers,
)
from .ops import binarize, denoise, boxes_to_mask, box_support
from .scaling import ScalingPolicy, upscale_bilinear, downscale_maxpool, rescale
from .kernels import (
    NeighborMode,
    closeby_weight,
    closeby_kernel,
    close_to_a,
    close_to_a_all_pairs,
    close_forall,
    close_forall_all_pairs,
    avg_pool,
    neighborhood_weights,
    nb_cond,
)
