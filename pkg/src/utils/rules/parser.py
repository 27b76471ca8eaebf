"""
Rule text to AST.

parse() reports lexical and syntax errors with 1-based line and column,
then checks variable binding: every variable must be bound by exactly one
enclosing quantifier or be declared free.
"""

import re
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken, VisitError
from pydantic import ValidationError

from ..exceptions import KernelSizeError, RuleSyntaxError, UnboundVariableError
from ..logging_utils import LogCategory, get_category_logger
from ..logic import ImplicationStyle
from ..masks import CloseByParams
from .ast import (
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
    free_vars,
)
from .grammar import RULE_GRAMMAR

logger = get_category_logger(LogCategory.PARSE)

CLOSEBY = "closeby"
TRIVIAL_FLAG = "trivial"
CLOSEBY_ARGS = {"sigma", "r", "ksize", "low_cut"}
PREDICATE_ARGS = {"denoise"}

_INT = re.compile(r"^\d+$")


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark(RULE_GRAMMAR, parser="lalr", propagate_positions=True, maybe_placeholders=True)


def _number(token: Token) -> Union[int, float]:
    text = str(token)
    return int(text) if _INT.match(text) else float(text)


class _RuleError(Exception):
    """Carries a RuleSyntaxError out of the lark transformer."""

    def __init__(self, error: RuleSyntaxError):
        super().__init__(error.message)
        self.error = error


def _fail(reason: str, line: int, column: int):
    raise _RuleError(RuleSyntaxError(reason, line, column))


class _ToAst(Transformer):
    @v_args(meta=True)
    def forall(self, meta, children):
        var, domain, body = children
        return ForAll(str(var), str(domain), body, span=(meta.line, meta.column))

    @v_args(meta=True)
    def exists(self, meta, children):
        var, domain, body = children
        return Exists(str(var), str(domain), body, span=(meta.line, meta.column))

    @v_args(meta=True)
    def implication(self, meta, children):
        left, arrow, right = children
        style = None
        if str(arrow) != "->":
            style = ImplicationStyle(str(arrow)[3])
        return Implies(left, right, style, span=(meta.line, meta.column))

    @v_args(meta=True)
    def disjunction(self, meta, children):
        left, right = children
        return Or(left, right, span=(meta.line, meta.column))

    @v_args(meta=True)
    def conjunction(self, meta, children):
        left, right = children
        return And(left, right, span=(meta.line, meta.column))

    @v_args(meta=True)
    def negation(self, meta, children):
        (body,) = children
        return Not(body, span=(meta.line, meta.column))

    @v_args(meta=True)
    def membership(self, meta, children):
        var, region = children
        return MembershipGuard(str(var), str(region), span=(meta.line, meta.column))

    def var_arg(self, children):
        (name,) = children
        return ("var", name)

    def named_arg(self, children):
        key, value = children
        return ("named", key, value)

    @v_args(meta=True)
    def application(self, meta, children):
        name, *args = children
        args = [a for a in args if a is not None]
        span = (meta.line, meta.column)
        positional = [str(a[1]) for a in args if a[0] == "var"]
        named = {}
        for arg in args:
            if arg[0] != "named":
                continue
            key = str(arg[1])
            if key in named:
                _fail(f"duplicate argument '{key}'", arg[1].line, arg[1].column)
            named[key] = _number(arg[2])

        if str(name) == CLOSEBY:
            return self._closeby(positional, named, span)
        return self._predicate(str(name), positional, named, span)

    def _closeby(self, positional, named, span) -> CloseBy:
        trivial = TRIVIAL_FLAG in positional[2:]
        variables = [p for p in positional if p != TRIVIAL_FLAG]
        if len(variables) != 2 or (positional[2:] and positional[2:] != [TRIVIAL_FLAG]):
            _fail("closeby expects two pixel variables and optionally 'trivial'", *span)
        unknown = set(named) - CLOSEBY_ARGS
        if unknown:
            _fail(f"unknown closeby argument(s): {', '.join(sorted(unknown))}", *span)

        try:
            if trivial:
                if named:
                    _fail("closeby(..., trivial) takes no further arguments", *span)
                params = CloseByParams.trivial()
            elif "ksize" in named:
                if set(named) != {"ksize"}:
                    _fail("ksize cannot be combined with sigma, r or low_cut", *span)
                params = CloseByParams.l1_window(named["ksize"])
            elif "sigma" in named:
                params = CloseByParams.gaussian(
                    named["sigma"], named.get("r"), named.get("low_cut", 0.1)
                )
            elif named:
                _fail("r and low_cut need sigma", *span)
            else:
                params = CloseByParams.trivial()
        except (ValidationError, KernelSizeError) as e:
            _fail(f"invalid closeby parameters: {e}", *span)
        return CloseBy(variables[0], variables[1], params, span=span)

    def _predicate(self, name, positional, named, span) -> Formula:
        if len(positional) != 1:
            _fail(f"predicate '{name}' expects exactly one pixel variable", *span)
        unknown = set(named) - PREDICATE_ARGS
        if unknown:
            _fail(f"unknown argument(s) for '{name}': {', '.join(sorted(unknown))}", *span)
        pred = Predicate(name, positional[0], span=span)
        if "denoise" in named:
            threshold = float(named["denoise"])
            if not 0.0 <= threshold <= 1.0:
                _fail("denoise threshold must lie in [0, 1]", *span)
            return DenoiseGuard(threshold, pred, span=span)
        return pred


def _syntax_error(e: UnexpectedInput) -> RuleSyntaxError:
    if isinstance(e, UnexpectedCharacters):
        return RuleSyntaxError(f"unexpected character {e.char!r}", e.line, e.column)
    if isinstance(e, UnexpectedToken):
        token = e.token
        if token.type == "$END":
            # end-of-input borrows the last token's position
            column = token.end_column if token.end_column is not None else e.column
            return RuleSyntaxError("unexpected end of input", token.end_line or e.line, column)
        return RuleSyntaxError(f"unexpected token {str(token)!r}", e.line, e.column)
    return RuleSyntaxError(str(e).strip().splitlines()[0], e.line, e.column)


def _check_binding(f: Formula, free: Optional[Iterable[str]]) -> None:
    def visit(node: Formula, bound: tuple) -> None:
        if isinstance(node, (ForAll, Exists)):
            if node.var in bound:
                line, col = node.span or (0, 0)
                raise RuleSyntaxError(f"variable '{node.var}' is bound twice", line, col)
            bound = bound + (node.var,)
        for child in node.children():
            visit(child, bound)

    visit(f, ())
    unbound = sorted(free_vars(f))
    if free is None:
        # an open rule has at most one free pixel variable
        if len(unbound) > 1:
            raise UnboundVariableError(unbound[1], (unbound[0],))
        return
    allowed = tuple(free)
    for var in unbound:
        if var not in allowed:
            raise UnboundVariableError(var, allowed)


def parse(text: str, free: Optional[Iterable[str]] = None) -> Formula:
    """
    Parse rule text into a Formula.

    Args:
        text: Rule source
        free: Variables allowed to stay free; None allows a single one

    Raises:
        RuleSyntaxError: lexical or syntax error, with line and column
        UnboundVariableError: a variable that is neither bound nor declared free
    """
    try:
        tree = _parser().parse(text)
    except UnexpectedInput as e:
        raise _syntax_error(e) from None

    try:
        formula = _ToAst().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, _RuleError):
            raise e.orig_exc.error from None
        raise

    _check_binding(formula, free)
    logger.debug("Parsed rule with free variables {}".format(sorted(free_vars(formula))))
    return formula


def parse_file(path: Union[str, Path], free: Optional[Iterable[str]] = None) -> Formula:
    text = Path(path).read_text(encoding="utf-8")
    return parse(text, free)
