"""
Quantifier reductions.

The universal quantifier reduces with the arithmetic mean or with the family
t-norm, the existential one with max, the family t-conorm or the mean.
Empty domains give 1 (forall) and 0 (exists).
"""

from typing import Optional

import numpy as np

from .connectives import Truth, binarize_values
from .types import ExistsMode, Family, ForallMode, LogicSystem


def _values(values, logic: LogicSystem) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if logic.is_boolean:
        arr = binarize_values(arr, logic.bool_threshold)
    return arr


def _finish(x) -> Truth:
    x = np.clip(x, 0.0, 1.0)
    if np.ndim(x) == 0:
        return float(x)
    return x


def _is_empty(arr: np.ndarray, axis) -> bool:
    if axis is None:
        return arr.size == 0
    axes = (axis,) if isinstance(axis, int) else tuple(axis)
    return any(arr.shape[ax] == 0 for ax in axes)


def tnorm_fold(arr: np.ndarray, family: Family, axis=None) -> np.ndarray:
    match family:
        case Family.LUKASIEWICZ:
            n = arr.size if axis is None else np.prod([arr.shape[ax] for ax in np.atleast_1d(axis)])
            return np.maximum(0.0, arr.sum(axis=axis) - (n - 1))
        case Family.GOEDEL | Family.BOOLEAN:
            return arr.min(axis=axis)
        case Family.PRODUCT:
            return arr.prod(axis=axis)


def tconorm_fold(arr: np.ndarray, family: Family, axis=None) -> np.ndarray:
    match family:
        case Family.LUKASIEWICZ:
            return np.minimum(1.0, arr.sum(axis=axis))
        case Family.GOEDEL | Family.BOOLEAN:
            return arr.max(axis=axis)
        case Family.PRODUCT:
            return 1.0 - np.prod(1.0 - arr, axis=axis)


def reduce_forall(values, logic: LogicSystem, axis: Optional[int] = None) -> Truth:
    arr = _values(values, logic)
    if _is_empty(arr, axis):
        shape = () if axis is None else np.delete(np.array(arr.shape), axis)
        return _finish(np.ones(shape))

    if logic.forall_mode == ForallMode.MEAN:
        return _finish(arr.mean(axis=axis))
    return _finish(tnorm_fold(arr, logic.family, axis=axis))


def reduce_exists(values, logic: LogicSystem, axis: Optional[int] = None) -> Truth:
    arr = _values(values, logic)
    if _is_empty(arr, axis):
        shape = () if axis is None else np.delete(np.array(arr.shape), axis)
        return _finish(np.zeros(shape))

    match logic.exists_mode:
        case ExistsMode.GOEDEL_MAX:
            return _finish(arr.max(axis=axis))
        case ExistsMode.TCONORM_REDUCE:
            return _finish(tconorm_fold(arr, logic.family, axis=axis))
        case ExistsMode.MEAN:
            return _finish(arr.mean(axis=axis))
