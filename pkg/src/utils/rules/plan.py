"""
Lowering of bound formulas into evaluation plans.

An EvalPlan is a topologically ordered list of kernel nodes. Every node
value is either a truth mask on the common grid (one free pixel variable)
or a scalar truth value. Two patterns with two free variables lower to a
single windowed kernel:

    exists q in P: X(q) & closeby(p, q, ...)    -> close_to_a(X)
    forall q in P: closeby(p, q, ...) -> X(q)   -> close_forall(X)

Any other subformula with two or more free variables is evaluated by the
reference interpreter inside a pairwise node, with a cost warning.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from ..logging_utils import LogCategory, get_category_logger
from ..logic import LogicSystem
from ..masks import CloseByParams
from ..storage.scene import ChannelKind
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
    Span,
    free_vars,
)
from .binder import BoundFormula

logger = get_category_logger(LogCategory.PLAN)


class NodeOp(str, Enum):
    LOAD_MASK = "load_mask"
    LOAD_BOXES = "load_boxes"
    SCALE = "scale"
    DENOISE = "denoise"
    BINARIZE = "binarize"
    MEMBERSHIP = "membership"
    CONST = "const"
    NOT = "not"
    AND = "and"
    OR = "or"
    IMPLIES = "implies"
    CLOSE_TO_A = "close_to_a"
    CLOSE_FORALL = "close_forall"
    FORALL = "forall"
    EXISTS = "exists"
    PAIRWISE = "pairwise"


ELEMENTWISE = {NodeOp.NOT, NodeOp.AND, NodeOp.OR, NodeOp.IMPLIES}


@dataclass(frozen=True)
class PlanNode:
    id: int
    op: NodeOp
    inputs: Tuple[int, ...] = ()
    params: Dict[str, Any] = field(default_factory=dict)
    is_mask: bool = True
    span: Span = None

    def describe(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params.items() if k != "formula")
        inputs = ", ".join(f"%{i}" for i in self.inputs)
        return f"%{self.id} = {self.op.value}({inputs}{'; ' if inputs and args else ''}{args})"


@dataclass(frozen=True)
class EvalPlan:
    nodes: Tuple[PlanNode, ...]
    output: int
    bound: BoundFormula
    logic: LogicSystem
    pixel_output: Optional[int] = None

    @property
    def output_is_mask(self) -> bool:
        return self.nodes[self.output].is_mask

    def structure(self) -> Tuple[Tuple[str, Tuple[int, ...]], ...]:
        """Node ops and wiring without parameters."""
        return tuple((n.op.value, n.inputs) for n in self.nodes)

    def describe(self) -> str:
        lines = [n.describe() for n in self.nodes]
        lines.append(f"return %{self.output}")
        return "\n".join(lines)


class _Lowerer:
    def __init__(self, bound: BoundFormula, logic: LogicSystem):
        self.bound = bound
        self.logic = logic
        self.nodes: List[PlanNode] = []
        self._cache: Dict[Tuple, int] = {}

    def emit(self, op: NodeOp, inputs=(), params=None, is_mask=True, span=None, key=None) -> int:
        if key is not None and key in self._cache:
            return self._cache[key]
        node = PlanNode(len(self.nodes), op, tuple(inputs), dict(params or {}), is_mask, span)
        self.nodes.append(node)
        if key is not None:
            self._cache[key] = node.id
        return node.id

    def channel(self, name: str, span: Span = None) -> int:
        """Load a channel and bring it to the common grid."""
        spec = self.bound.channels[name]
        op = NodeOp.LOAD_BOXES if spec.kind == ChannelKind.BOXES else NodeOp.LOAD_MASK
        loaded = self.emit(op, params={"channel": name}, span=span, key=("load", name))
        return self.emit(
            NodeOp.SCALE,
            (loaded,),
            {"shape": self.bound.grid_shape, "policy": self.bound.scaling.value},
            span=span,
            key=("scale", name),
        )

    def crisp(self, node: int, span: Span = None) -> int:
        if not self.logic.is_boolean:
            return node
        return self.emit(
            NodeOp.BINARIZE,
            (node,),
            {"threshold": self.logic.bool_threshold},
            span=span,
            key=("binarize", node),
        )

    def membership(self, region: str, span: Span = None) -> int:
        grid = self.channel(region, span)
        return self.emit(NodeOp.MEMBERSHIP, (grid,), span=span, key=("membership", region))

    def pairwise(self, f: Formula) -> int:
        remaining = sorted(free_vars(f))
        logger.warning(
            "Falling back to pairwise evaluation of '{}' at line/col {}: "
            "O(({} pixels)^2) work and memory".format(
                type(f).__name__, f.span, self.bound.n_pixels
            )
        )
        return self.emit(
            NodeOp.PAIRWISE,
            params={"formula": f, "var": remaining[0] if remaining else None},
            is_mask=bool(remaining),
            span=f.span,
        )

    def lower(self, f: Formula) -> Optional[int]:
        """Node id of f, or None when f has two or more free variables."""
        if len(free_vars(f)) > 1:
            return None

        match f:
            case Predicate(name=name):
                return self.crisp(self.channel(name, f.span), f.span)
            case DenoiseGuard(threshold=t, body=Predicate(name=name)):
                grid = self.channel(name, f.span)
                cleaned = self.emit(
                    NodeOp.DENOISE, (grid,), {"threshold": t}, span=f.span, key=("denoise", name, t)
                )
                return self.crisp(cleaned, f.span)
            case MembershipGuard(region=region):
                return self.membership(region, f.span)
            case CloseBy():
                # closeby(p, p): the weight at distance zero
                return self.emit(
                    NodeOp.CONST,
                    params={"value": 1.0},
                    is_mask=False,
                    span=f.span,
                    key=("const", 1.0),
                )
            case Not(body=body):
                child = self.lower(body)
                is_mask = self.nodes[child].is_mask
                return self.emit(NodeOp.NOT, (child,), is_mask=is_mask, span=f.span)
            case And(left=l, right=r) | Or(left=l, right=r) | Implies(left=l, right=r):
                a, b = self.lower(l), self.lower(r)
                op = {And: NodeOp.AND, Or: NodeOp.OR, Implies: NodeOp.IMPLIES}[type(f)]
                params = {"style": f.style.value} if isinstance(f, Implies) and f.style else {}
                is_mask = self.nodes[a].is_mask or self.nodes[b].is_mask
                return self.emit(op, (a, b), params, is_mask=is_mask, span=f.span)
            case ForAll() | Exists():
                return self.quantifier(f)
        raise TypeError(f"Cannot lower {type(f).__name__}")

    def quantifier(self, f: Formula) -> int:
        var, domain, body = f.var, f.domain, f.body
        universal = isinstance(f, ForAll)
        body_vars = free_vars(body)

        if body_vars <= {var}:
            inner = self.lower(body)
            inputs = (inner,)
            params = {"form": None}
            if domain != WHOLE_IMAGE:
                inputs = (inner, self.membership(domain, f.span))
                params = {"form": self.bound.membership_form.value}
            op = NodeOp.FORALL if universal else NodeOp.EXISTS
            return self.emit(op, inputs, params, is_mask=False, span=f.span)

        windowed = self.windowed(f) if domain == WHOLE_IMAGE else None
        if windowed is not None:
            return windowed
        return self.pairwise(f)

    def windowed(self, f: Formula) -> Optional[int]:
        var = f.var
        other = next(iter(free_vars(f)), None)

        def closeby_between(node: Formula) -> Optional[CloseByParams]:
            if not isinstance(node, CloseBy) or var == other:
                return None
            if {node.left, node.right} == {var, other}:
                return node.params
            return None

        if other is None:
            return None
        match f:
            case Exists(body=And(left=a, right=b)):
                candidates = [(a, b), (b, a)]
                op, style = NodeOp.CLOSE_TO_A, None
            case ForAll(body=Implies(left=a, right=b, style=style)):
                candidates = [(b, a)]
                op = NodeOp.CLOSE_FORALL
            case _:
                return None

        for x, c in candidates:
            params = closeby_between(c)
            if params is not None and free_vars(x) <= {var}:
                break
        else:
            return None

        all_pairs = not params.is_bounded
        if all_pairs:
            logger.warning(
                "closeby at line/col {} has no finite support (r unset); evaluating all "
                "pixel pairs, O(({} pixels)^2)".format(f.span, self.bound.n_pixels)
            )
        inner = self.lower(x)
        node_params = {"closeby": params, "all_pairs": all_pairs}
        if op == NodeOp.CLOSE_FORALL and style is not None:
            node_params["style"] = style.value
        return self.emit(op, (inner,), node_params, span=f.span)


def _pixel_body(f: Formula) -> Optional[Formula]:
    if isinstance(f, ForAll) and f.domain == WHOLE_IMAGE and free_vars(f.body) <= {f.var}:
        return f.body
    return None


def lower(bound: BoundFormula, logic: LogicSystem) -> EvalPlan:
    """
    Compile bound into an EvalPlan for logic.

    The plan shape depends on the logic only through the binarize nodes
    inserted for Boolean logic; connective families change node semantics,
    never wiring.
    """
    lowerer = _Lowerer(bound, logic)
    output = lowerer.lower(bound.formula)
    if output is None:
        output = lowerer.pairwise(bound.formula)

    pixel_output = None
    body = _pixel_body(bound.formula)
    if body is not None:
        forall_node = lowerer.nodes[output]
        pixel_output = forall_node.inputs[0]

    plan = EvalPlan(tuple(lowerer.nodes), output, bound, logic, pixel_output)
    logger.debug("Lowered plan:\n{}".format(plan.describe()))
    return plan
