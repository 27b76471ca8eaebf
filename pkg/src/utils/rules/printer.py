"""
Canonical rule printing with minimal parentheses; parse(print_formula(f)) == f.
"""

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
)

_QUANT, _IMPL, _OR, _AND, _NOT, _ATOM = range(6)


def _precedence(f: Formula) -> int:
    match f:
        case ForAll() | Exists():
            return _QUANT
        case Implies():
            return _IMPL
        case Or():
            return _OR
        case And():
            return _AND
        case Not():
            return _NOT
        case _:
            return _ATOM


def _number(value) -> str:
    return repr(value)


def _operand(f: Formula, min_prec: int, tail: bool) -> str:
    """Print f as an operand; quantifiers stay bare only in tail position."""
    prec = _precedence(f)
    if prec == _QUANT:
        return _fmt(f, True) if tail else f"({_fmt(f, True)})"
    if prec < min_prec:
        return f"({_fmt(f, True)})"
    return _fmt(f, tail)


def _fmt(f: Formula, tail: bool) -> str:
    match f:
        case Predicate(name=name, var=var):
            return f"{name}({var})"
        case DenoiseGuard(threshold=t, body=Predicate(name=name, var=var)):
            return f"{name}({var}, denoise={_number(float(t))})"
        case CloseBy(left=left, right=right, params=params):
            args = params.as_args()
            if not args:
                return f"closeby({left}, {right}, trivial)"
            rendered = ", ".join(f"{k}={_number(v)}" for k, v in args.items())
            return f"closeby({left}, {right}, {rendered})"
        case MembershipGuard(var=var, region=region):
            return f"{var} in {region}"
        case Not(body=body):
            return "!" + _operand(body, _NOT, tail)
        case And(left=left, right=right):
            return f"{_operand(left, _AND, False)} & {_operand(right, _NOT, tail)}"
        case Or(left=left, right=right):
            return f"{_operand(left, _OR, False)} | {_operand(right, _AND, tail)}"
        case Implies(left=left, right=right, style=style):
            arrow = "->" if style is None else f"->[{style.value}]"
            return f"{_operand(left, _OR, False)} {arrow} {_operand(right, _IMPL, tail)}"
        case ForAll(var=var, domain=domain, body=body):
            return f"forall {var} in {domain}: {_fmt(body, True)}"
        case Exists(var=var, domain=domain, body=body):
            return f"exists {var} in {domain}: {_fmt(body, True)}"
    raise TypeError(f"Cannot print {type(f).__name__}")


def print_formula(f: Formula) -> str:
    return _fmt(f, True)
