"""
Windowed mask kernels: CloseBy weight windows, CloseToA, average pooling and
the neighborhood conditions.

close_to_a evaluates, for every output pixel p,
    exists q: b(q) & CloseBy(p, q)
over the (2r+1) x (2r+1) window around p only. Whenever CloseBy vanishes
beyond L1 distance r this equals the evaluation over all pixel pairs, which
close_to_a_all_pairs implements directly. close_forall is the universal dual,
    forall q: CloseBy(p, q) -> b(q).
For the mean quantifiers the sum is divided by the number of pixels of the
whole mask, not of the window.
"""

from enum import Enum
from typing import Optional

import numpy as np
import torch
import torch.nn.functional as F
from numpy.lib.stride_tricks import sliding_window_view

from ..exceptions import ShapeMismatchError
from ..logic import (
    ExistsMode,
    ImplicationStyle,
    ForallMode,
    LogicSystem,
    binarize_values,
    conj,
    impl,
    reduce_exists,
    reduce_forall,
    tconorm_fold,
    tnorm_fold,
)
from ..validators import validate_odd_ksize
from .types import CloseByKind, CloseByParams, Shape, TruthMask

# rows of output pixels processed per block; bounds window memory
ROW_BLOCK = 32


class NeighborMode(str, Enum):
    ALL_NEIGHBORS = "all_neighbors"
    ANY_OTHER_NEIGHBOR = "any_other_neighbor"


def closeby_weight(params: CloseByParams, d_row: np.ndarray, d_col: np.ndarray) -> np.ndarray:
    """CloseBy truth value for pixel offsets (d_row, d_col)."""
    d_row = np.asarray(d_row, dtype=np.float64)
    d_col = np.asarray(d_col, dtype=np.float64)
    l1 = np.abs(d_row) + np.abs(d_col)
    match params.kind:
        case CloseByKind.TRIVIAL:
            return (l1 == 0).astype(np.float64)
        case CloseByKind.L1_WINDOW:
            return (l1 <= params.r).astype(np.float64)
        case CloseByKind.GAUSSIAN:
            w = np.exp(-(d_row**2 + d_col**2) / (2.0 * params.sigma**2))
            if params.r is not None:
                w = np.where(l1 <= params.r, w, 0.0)
            return np.where(w < params.low_cut, 0.0, w)


def closeby_kernel(params: CloseByParams) -> np.ndarray:
    """Weight window of size (2r+1) x (2r+1) centered on the offset (0, 0)."""
    if not params.is_bounded:
        raise ValueError("closeby_kernel needs a finite window half-size r")
    offsets = np.arange(-params.r, params.r + 1)
    d_row, d_col = np.meshgrid(offsets, offsets, indexing="ij")
    return closeby_weight(params, d_row, d_col)


def _windows(arr: np.ndarray, r: int, fill: float) -> np.ndarray:
    padded = np.pad(arr, r, mode="constant", constant_values=fill)
    k = 2 * r + 1
    return sliding_window_view(padded, (k, k))


def _reduce_exists_window(vals: np.ndarray, logic: LogicSystem, n_domain: int) -> np.ndarray:
    """Existential over the trailing two window axes; zeros are neutral for every mode."""
    axes = (-2, -1)
    match logic.exists_mode:
        case ExistsMode.GOEDEL_MAX:
            return vals.max(axis=axes)
        case ExistsMode.TCONORM_REDUCE:
            return tconorm_fold(vals, logic.family, axis=axes)
        case ExistsMode.MEAN:
            return vals.sum(axis=axes) / n_domain


def _check_out_shape(q_mask: TruthMask, out_shape: Optional[Shape], op: str) -> None:
    if out_shape is not None and tuple(out_shape) != q_mask.shape:
        raise ShapeMismatchError(
            q_mask.shape, tuple(out_shape), f"{op} output (declare a scaling step)"
        )


def close_to_a(
    q_mask: TruthMask,
    params: CloseByParams,
    logic: LogicSystem,
    out_shape: Optional[Shape] = None,
) -> TruthMask:
    _check_out_shape(q_mask, out_shape, "close_to_a")
    if params.is_trivial and logic.exists_mode != ExistsMode.MEAN:
        return TruthMask(conj(q_mask.array, 1.0, logic))

    kernel = closeby_kernel(params)
    r = params.r
    windows = _windows(q_mask.array, r, 0.0)
    out = np.empty(q_mask.shape, dtype=np.float64)
    n_domain = q_mask.height * q_mask.width
    for start in range(0, q_mask.height, ROW_BLOCK):
        block = windows[start : start + ROW_BLOCK]
        vals = conj(block, kernel, logic)
        out[start : start + ROW_BLOCK] = _reduce_exists_window(vals, logic, n_domain)
    return TruthMask(np.clip(out, 0.0, 1.0))


def close_forall(
    q_mask: TruthMask,
    params: CloseByParams,
    logic: LogicSystem,
    style: Optional[ImplicationStyle] = None,
    out_shape: Optional[Shape] = None,
) -> TruthMask:
    """
    forall q: CloseBy(p, q) -> b(q) over the window around p. Pixels with
    zero CloseBy weight give implication value 1, so only the window counts;
    the mean still divides by the pixel count of the whole mask.
    """
    _check_out_shape(q_mask, out_shape, "close_forall")
    kernel = closeby_kernel(params)
    r = params.r
    windows = _windows(q_mask.array, r, np.nan)
    out = np.empty(q_mask.shape, dtype=np.float64)
    n_domain = q_mask.height * q_mask.width
    n_window = kernel.size
    for start in range(0, q_mask.height, ROW_BLOCK):
        block = windows[start : start + ROW_BLOCK]
        vals = impl(kernel, np.nan_to_num(block), logic, style)
        vals = np.where(np.isnan(block), 1.0, vals)
        if logic.forall_mode == ForallMode.MEAN:
            reduced = (n_domain - n_window + vals.sum(axis=(-2, -1))) / n_domain
        else:
            reduced = tnorm_fold(vals, logic.family, axis=(-2, -1))
        out[start : start + ROW_BLOCK] = reduced
    return TruthMask(np.clip(out, 0.0, 1.0))


def _pair_weights(shape: Shape, params: CloseByParams) -> np.ndarray:
    h, w = shape
    rows, cols = np.divmod(np.arange(h * w), w)
    return closeby_weight(params, rows[:, None] - rows[None, :], cols[:, None] - cols[None, :])


def close_to_a_all_pairs(q_mask: TruthMask, params: CloseByParams, logic: LogicSystem) -> TruthMask:
    """Evaluate exists q: b(q) & CloseBy(p, q) over every pixel pair; O((HW)^2) memory."""
    vals = conj(q_mask.array.reshape(1, -1), _pair_weights(q_mask.shape, params), logic)
    out = reduce_exists(vals, logic, axis=1)
    return TruthMask(np.reshape(out, q_mask.shape))


def close_forall_all_pairs(
    q_mask: TruthMask,
    params: CloseByParams,
    logic: LogicSystem,
    style: Optional[ImplicationStyle] = None,
) -> TruthMask:
    vals = impl(_pair_weights(q_mask.shape, params), q_mask.array.reshape(1, -1), logic, style)
    out = reduce_forall(vals, logic, axis=1)
    return TruthMask(np.reshape(out, q_mask.shape))


def avg_pool(m: TruthMask, ksize: int) -> TruthMask:
    """Stride-1 mean over the ksize x ksize window intersected with the image."""
    ksize = validate_odd_ksize(ksize)
    if ksize == 1:
        return m
    x = torch.from_numpy(np.array(m.array))[None, None]
    out = F.avg_pool2d(x, ksize, stride=1, padding=ksize // 2, count_include_pad=False)
    return TruthMask(out[0, 0].clamp(0.0, 1.0).numpy())


def neighborhood_weights(params: CloseByParams) -> np.ndarray:
    """
    CloseBy weights of the neighborhood Nbh(p). The binary neighborhood is the
    full square window of side ksize; the Gaussian one keeps its weights.
    """
    if params.kind == CloseByKind.L1_WINDOW:
        return np.ones((params.window_size, params.window_size))
    return closeby_kernel(params)


def _all_neighbors_windowed(arr: np.ndarray, weights: np.ndarray, logic: LogicSystem) -> np.ndarray:
    """forall q in Nbh(p): CloseBy(p, q) -> M(q) over the in-bounds support of the window."""
    r = (weights.shape[0] - 1) // 2
    windows = _windows(arr, r, np.nan)
    out = np.empty(arr.shape, dtype=np.float64)
    for start in range(0, arr.shape[0], ROW_BLOCK):
        block = windows[start : start + ROW_BLOCK]
        inside = ~np.isnan(block) & (weights > 0)
        vals = impl(weights, np.nan_to_num(block), logic)
        if logic.forall_mode == ForallMode.MEAN:
            reduced = np.where(inside, vals, 0.0).sum(axis=(-2, -1)) / inside.sum(axis=(-2, -1))
        else:
            reduced = tnorm_fold(np.where(inside, vals, 1.0), logic.family, axis=(-2, -1))
        out[start : start + ROW_BLOCK] = reduced
    return np.clip(out, 0.0, 1.0)


def nb_cond(
    m: TruthMask,
    mode: NeighborMode,
    params: CloseByParams,
    logic: LogicSystem,
) -> TruthMask:
    mode = NeighborMode(mode)
    weights = neighborhood_weights(params)
    r = (weights.shape[0] - 1) // 2
    arr = m.array
    if logic.is_boolean:
        arr = binarize_values(arr, logic.bool_threshold)
        weights = binarize_values(weights, logic.bool_threshold)

    if mode == NeighborMode.ALL_NEIGHBORS:
        if logic.forall_mode == ForallMode.MEAN and params.kind == CloseByKind.L1_WINDOW:
            # implication with a true premise is the identity for every family
            return avg_pool(TruthMask(arr), weights.shape[0])
        return TruthMask(_all_neighbors_windowed(arr, weights, logic))

    # M(p) & exists q != p: CloseBy(p, q) & M(q)
    others = weights.copy()
    others[r, r] = 0.0
    windows = _windows(arr, r, 0.0)
    support = np.empty(arr.shape, dtype=np.float64)
    for start in range(0, arr.shape[0], ROW_BLOCK):
        vals = conj(windows[start : start + ROW_BLOCK], others, logic)
        n_others = max(arr.size - 1, 1)
        support[start : start + ROW_BLOCK] = _reduce_exists_window(vals, logic, n_others)
    return TruthMask(conj(arr, support, logic))
