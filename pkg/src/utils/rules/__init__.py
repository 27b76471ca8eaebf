from .ast import (
    WHOLE_IMAGE,
    Formula,
    Predicate,
    CloseBy,
    MembershipGuard,
    DenoiseGuard,
    Not,
    And,
    Or,
    Implies,
    ForAll,
    Exists,
    free_vars,
    predicate_names,
)
from .parser import parse, parse_file
from .printer import print_formula
from .transform import rewrite, rename_predicates
from .binder import BoundFormula, ChannelLoader, MembershipForm, bind
from .plan import EvalPlan, NodeOp, PlanNode, lower
from .evaluator import evaluate, evaluate_pixelwise
from .reference import reference_evaluate
