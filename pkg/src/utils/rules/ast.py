"""
Rule AST. Node equality is structural; source spans are carried for
diagnostics but never compared.
"""

from dataclasses import dataclass, field
from typing import FrozenSet, Iterator, Optional, Tuple

from ..logic import ImplicationStyle
from ..masks import CloseByParams

Span = Optional[Tuple[int, int]]

# region literal for the whole image
WHOLE_IMAGE = "P"


@dataclass(frozen=True)
class Formula:
    def children(self) -> Tuple["Formula", ...]:
        return ()

    def walk(self) -> Iterator["Formula"]:
        yield self
        for child in self.children():
            yield from child.walk()


@dataclass(frozen=True)
class Predicate(Formula):
    name: str
    var: str
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class CloseBy(Formula):
    left: str
    right: str
    params: CloseByParams
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class MembershipGuard(Formula):
    var: str
    region: str
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class DenoiseGuard(Formula):
    threshold: float
    body: Predicate
    span: Span = field(default=None, compare=False, repr=False)

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Not(Formula):
    body: Formula
    span: Span = field(default=None, compare=False, repr=False)

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula
    span: Span = field(default=None, compare=False, repr=False)

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula
    span: Span = field(default=None, compare=False, repr=False)

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula
    style: Optional[ImplicationStyle] = None
    span: Span = field(default=None, compare=False, repr=False)

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class ForAll(Formula):
    var: str
    domain: str
    body: Formula
    span: Span = field(default=None, compare=False, repr=False)

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    domain: str
    body: Formula
    span: Span = field(default=None, compare=False, repr=False)

    def children(self):
        return (self.body,)


Quantifier = (ForAll, Exists)


def free_vars(f: Formula) -> FrozenSet[str]:
    match f:
        case Predicate(var=v) | MembershipGuard(var=v):
            return frozenset({v})
        case CloseBy(left=a, right=b):
            return frozenset({a, b})
        case ForAll(var=v, body=body) | Exists(var=v, body=body):
            return free_vars(body) - {v}
        case _:
            out = frozenset()
            for child in f.children():
                out |= free_vars(child)
            return out


def predicate_names(f: Formula) -> FrozenSet[str]:
    """Channel names referenced by predicates, membership guards and quantifier domains."""
    names = set()
    for node in f.walk():
        match node:
            case Predicate(name=name):
                names.add(name)
            case MembershipGuard(region=region):
                names.add(region)
            case ForAll(domain=domain) | Exists(domain=domain) if domain != WHOLE_IMAGE:
                names.add(domain)
    return frozenset(names)
