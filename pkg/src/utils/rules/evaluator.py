"""
Plan execution against one scene.
"""

from typing import Dict, Union

import numpy as np

from ..exceptions import BindError
from ..logic import (
    ImplicationStyle,
    LogicSystem,
    TruthValue,
    binarize_values,
    conj,
    disj,
    impl,
    neg,
    reduce_exists,
    reduce_forall,
)
from ..masks import (
    TruthMask,
    close_forall,
    close_forall_all_pairs,
    close_to_a,
    close_to_a_all_pairs,
    denoise,
    rescale,
)
from ..storage.scene import SceneBundle
from .ast import free_vars
from .binder import ChannelLoader
from .plan import EvalPlan, NodeOp, PlanNode
from .reference import ReferenceInterpreter

Value = Union[np.ndarray, float]


class PlanExecutor:
    def __init__(self, plan: EvalPlan, scene: SceneBundle):
        self.plan = plan
        self.logic: LogicSystem = plan.logic
        self.loader = ChannelLoader(plan.bound, scene, plan.logic)
        self.values: Dict[int, Value] = {}

    def _grid(self, value: Value) -> np.ndarray:
        return np.broadcast_to(np.asarray(value, dtype=np.float64), self.plan.bound.grid_shape)

    def _style(self, node: PlanNode):
        style = node.params.get("style")
        return ImplicationStyle(style) if style else None

    def run(self) -> Dict[int, Value]:
        for node in self.plan.nodes:
            self.values[node.id] = self.step(node)
        return self.values

    def step(self, node: PlanNode) -> Value:
        logic = self.logic
        args = [self.values[i] for i in node.inputs]
        match node.op:
            case NodeOp.LOAD_MASK | NodeOp.LOAD_BOXES:
                return self.loader.raw(node.params["channel"]).array
            case NodeOp.SCALE:
                scaled = rescale(TruthMask(args[0]), node.params["shape"], node.params["policy"])
                return scaled.array
            case NodeOp.DENOISE:
                return denoise(TruthMask(args[0]), node.params["threshold"]).array
            case NodeOp.BINARIZE:
                return binarize_values(args[0], node.params["threshold"])
            case NodeOp.MEMBERSHIP:
                return binarize_values(args[0], 0.5)
            case NodeOp.CONST:
                return float(node.params["value"])
            case NodeOp.NOT:
                return neg(args[0], logic)
            case NodeOp.AND:
                return conj(args[0], args[1], logic)
            case NodeOp.OR:
                return disj(args[0], args[1], logic)
            case NodeOp.IMPLIES:
                return impl(args[0], args[1], logic, self._style(node))
            case NodeOp.CLOSE_TO_A:
                q_mask = TruthMask(self._grid(args[0]))
                params = node.params["closeby"]
                if node.params["all_pairs"]:
                    return close_to_a_all_pairs(q_mask, params, logic).array
                return close_to_a(q_mask, params, logic).array
            case NodeOp.CLOSE_FORALL:
                q_mask = TruthMask(self._grid(args[0]))
                params = node.params["closeby"]
                if node.params["all_pairs"]:
                    return close_forall_all_pairs(q_mask, params, logic, self._style(node)).array
                return close_forall(q_mask, params, logic, self._style(node)).array
            case NodeOp.FORALL | NodeOp.EXISTS:
                return self.reduce(node, args)
            case NodeOp.PAIRWISE:
                interpreter = ReferenceInterpreter(self.plan.bound, logic, self.loader)
                arr, vs = interpreter.eval(node.params["formula"])
                if vs:
                    return np.reshape(arr, self.plan.bound.grid_shape)
                return float(arr)
        raise ValueError(f"Unknown plan node {node.op}")

    def reduce(self, node: PlanNode, args) -> float:
        logic = self.logic
        universal = node.op == NodeOp.FORALL
        body = self._grid(args[0]).reshape(-1)
        form = node.params.get("form")
        if form == "restricted":
            body = body[args[1].reshape(-1) > 0.5]
        elif form == "implication":
            guard = args[1].reshape(-1)
            body = impl(guard, body, logic) if universal else conj(guard, body, logic)
        reduce = reduce_forall if universal else reduce_exists
        return float(reduce(body, logic))


def _as_result(plan: EvalPlan, value: Value, open_formula: bool) -> Union[TruthMask, TruthValue]:
    if open_formula:
        return TruthMask(np.array(np.broadcast_to(value, plan.bound.grid_shape)))
    return TruthValue(float(value))


def evaluate(plan: EvalPlan, scene: SceneBundle) -> Union[TruthMask, TruthValue]:
    """
    Run plan on scene: a TruthMask for open rules, a TruthValue for closed ones.

    Raises:
        MissingChannelError: scene lacks a bound channel
        ShapeMismatchError: scene image size differs from the bound one
    """
    values = PlanExecutor(plan, scene).run()
    open_formula = bool(free_vars(plan.bound.formula))
    return _as_result(plan, values[plan.output], open_formula)


def evaluate_pixelwise(plan: EvalPlan, scene: SceneBundle) -> TruthMask:
    """The F(p) mask of a rule forall p in P: F(p); open rules return their own mask."""
    values = PlanExecutor(plan, scene).run()
    if plan.pixel_output is not None:
        return _as_result(plan, values[plan.pixel_output], True)
    if free_vars(plan.bound.formula):
        return _as_result(plan, values[plan.output], True)
    raise BindError("rule is neither 'forall p in P: F(p)' nor open in one pixel variable")
