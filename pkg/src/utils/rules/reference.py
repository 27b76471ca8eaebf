"""
Naive reference interpreter.

Walks the AST and evaluates every subformula as a dense tensor with one
axis of length H*W per free pixel variable. CloseBy between two different
variables is the full pixel-pair weight matrix, so quantification is
always over all pixel pairs. Memory grows as (H*W)^k for k simultaneously
free variables; use it on small grids only.
"""

from typing import Tuple, Union

import numpy as np

from ..logic import LogicSystem, TruthValue, binarize_values, conj, disj, impl, neg
from ..logic import reduce_exists, reduce_forall
from ..masks import CloseByParams, TruthMask, closeby_weight, denoise
from ..storage.scene import SceneBundle
from .ast import (
    WHOLE_IMAGE,
    And,
    CloseBy,
    DenoiseGuard,
    Exists,
    ForAll,
    Formula,
    Implies,
    MembershipGuard,
    Not,
    Or,
    Predicate,
)
from .binder import BoundFormula, ChannelLoader, MembershipForm

Value = Tuple[np.ndarray, Tuple[str, ...]]


def _pair_matrix(shape, params: CloseByParams) -> np.ndarray:
    h, w = shape
    rows, cols = np.divmod(np.arange(h * w), w)
    return closeby_weight(params, rows[:, None] - rows[None, :], cols[:, None] - cols[None, :])


def _align(*values: Value) -> Tuple[list, Tuple[str, ...]]:
    """Broadcast values to the union of their variables."""
    order: list = []
    for _, vs in values:
        for v in vs:
            if v not in order:
                order.append(v)
    out = []
    for arr, vs in values:
        perm = sorted(range(len(vs)), key=lambda i: order.index(vs[i]))
        arr = np.transpose(arr, perm) if vs else np.asarray(arr)
        present = {vs[i] for i in perm}
        shape = []
        it = iter(arr.shape)
        for v in order:
            shape.append(next(it) if v in present else 1)
        out.append(np.reshape(arr, shape))
    return out, tuple(order)


class ReferenceInterpreter:
    def __init__(self, bound: BoundFormula, logic: LogicSystem, loader: ChannelLoader):
        self.bound = bound
        self.logic = logic
        self.loader = loader
        self.n = bound.n_pixels

    def _crisp(self, arr: np.ndarray) -> np.ndarray:
        if self.logic.is_boolean:
            return binarize_values(arr, self.logic.bool_threshold)
        return arr

    def _channel(self, name: str, threshold=None) -> np.ndarray:
        mask = self.loader.grid(name)
        if threshold is not None:
            mask = denoise(mask, threshold)
        return self._crisp(mask.array.reshape(-1))

    def eval(self, f: Formula) -> Value:
        logic = self.logic
        match f:
            case Predicate(name=name, var=v):
                return self._channel(name), (v,)
            case DenoiseGuard(threshold=t, body=Predicate(name=name, var=v)):
                return self._channel(name, t), (v,)
            case MembershipGuard(var=v, region=region):
                return self.loader.membership(region).reshape(-1), (v,)
            case CloseBy(left=a, right=b, params=params):
                if a == b:
                    w0 = float(closeby_weight(params, 0, 0))
                    return np.full(self.n, w0), (a,)
                return _pair_matrix(self.bound.grid_shape, params), (a, b)
            case Not(body=body):
                arr, vs = self.eval(body)
                return np.asarray(neg(arr, logic)), vs
            case And(left=l, right=r) | Or(left=l, right=r):
                (x, y), vs = _align(self.eval(l), self.eval(r))
                op = conj if isinstance(f, And) else disj
                return np.asarray(op(x, y, logic)), vs
            case Implies(left=l, right=r, style=style):
                (x, y), vs = _align(self.eval(l), self.eval(r))
                return np.asarray(impl(x, y, logic, style)), vs
            case ForAll(var=v, domain=domain, body=body) | Exists(var=v, domain=domain, body=body):
                return self._quantify(f, v, domain, body)
        raise TypeError(f"Cannot evaluate {type(f).__name__}")

    def _quantify(self, f: Formula, var: str, domain: str, body: Formula) -> Value:
        logic = self.logic
        universal = isinstance(f, ForAll)
        arr, vs = self.eval(body)
        if var not in vs:
            arr = np.broadcast_to(np.asarray(arr)[..., None], np.shape(arr) + (self.n,))
            vs = vs + (var,)
        axis = vs.index(var)
        arr = np.moveaxis(arr, axis, -1)
        rest = vs[:axis] + vs[axis + 1 :]

        if domain != WHOLE_IMAGE:
            guard = self.loader.membership(domain).reshape(-1)
            if self.bound.membership_form == MembershipForm.RESTRICTED:
                arr = arr[..., guard > 0.5]
            elif universal:
                arr = np.asarray(impl(guard, arr, logic))
            else:
                arr = np.asarray(conj(guard, arr, logic))

        reduce = reduce_forall if universal else reduce_exists
        return np.asarray(reduce(arr, logic, axis=-1)), rest


def reference_evaluate(
    bound: BoundFormula, logic: LogicSystem, scene: SceneBundle
) -> Union[TruthMask, TruthValue]:
    """Evaluate bound by brute force over all pixel pairs."""
    interpreter = ReferenceInterpreter(bound, logic, ChannelLoader(bound, scene, logic))
    arr, vs = interpreter.eval(bound.formula)
    if not vs:
        return TruthValue(float(arr))
    return TruthMask(np.reshape(arr, bound.grid_shape))
