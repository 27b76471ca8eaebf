"""
Fuzzy connectives for the Lukasiewicz, Goedel, Product and Boolean logics.

Every connective accepts scalars or numpy arrays and broadcasts. Scalar
inputs give a Python float back, array inputs give an array.
"""

from typing import Optional, Union

import numpy as np

from .types import Family, ImplicationStyle, LogicSystem

Truth = Union[float, np.ndarray]


def _wrap(x: np.ndarray) -> Truth:
    x = np.clip(x, 0.0, 1.0)
    if np.ndim(x) == 0:
        return float(x)
    return x


def binarize_values(a, threshold: float) -> np.ndarray:
    """Classical truth of (a >= threshold) as 0.0/1.0."""
    return (np.asarray(a, dtype=np.float64) >= threshold).astype(np.float64)


def _operands(logic: LogicSystem, *values):
    arrays = [np.asarray(v, dtype=np.float64) for v in values]
    if logic.is_boolean:
        arrays = [binarize_values(v, logic.bool_threshold) for v in arrays]
    return arrays


def neg(a, logic: LogicSystem) -> Truth:
    (a,) = _operands(logic, a)
    return _wrap(1.0 - a)


def conj(a, b, logic: LogicSystem) -> Truth:
    a, b = _operands(logic, a, b)
    match logic.family:
        case Family.LUKASIEWICZ:
            out = np.maximum(0.0, a + b - 1.0)
        case Family.GOEDEL | Family.BOOLEAN:
            out = np.minimum(a, b)
        case Family.PRODUCT:
            out = a * b
    return _wrap(out)


def disj(a, b, logic: LogicSystem) -> Truth:
    a, b = _operands(logic, a, b)
    match logic.family:
        case Family.LUKASIEWICZ:
            out = np.minimum(1.0, a + b)
        case Family.GOEDEL | Family.BOOLEAN:
            out = np.maximum(a, b)
        case Family.PRODUCT:
            out = a + b - a * b
    return _wrap(out)


def impl(a, b, logic: LogicSystem, style: Optional[ImplicationStyle] = None) -> Truth:
    style = ImplicationStyle(style) if style is not None else logic.implication_style
    if style == ImplicationStyle.S or logic.is_boolean:
        return disj(neg(a, logic), b, logic)

    a, b = _operands(logic, a, b)
    match logic.family:
        case Family.LUKASIEWICZ:
            out = np.minimum(1.0, 1.0 - a + b)
        case Family.GOEDEL:
            out = np.where(a <= b, 1.0, b)
        case Family.PRODUCT:
            # residuum: 1 wherever a <= b, which covers a == 0
            ratio = np.divide(b, a, out=np.ones(np.broadcast(a, b).shape), where=a > b)
            out = np.where(a <= b, 1.0, ratio)
    return _wrap(out)


def equiv(a, b, logic: LogicSystem, style: Optional[ImplicationStyle] = None) -> Truth:
    return conj(impl(a, b, logic, style), impl(b, a, logic, style), logic)
