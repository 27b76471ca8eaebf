from dataclasses import fields, replace
from typing import Callable, Mapping, Tuple, Type

from .ast import Formula, Predicate


def rewrite(
    f: Formula,
    fn: Callable[[Formula], Formula],
    skip: Tuple[Type[Formula], ...] = (),
) -> Formula:
    """Bottom-up rewrite; subtrees rooted at a `skip` type are left untouched."""
    if skip and isinstance(f, skip):
        return f
    changes = {}
    for fld in fields(f):
        value = getattr(f, fld.name)
        if isinstance(value, Formula):
            new = rewrite(value, fn, skip)
            if new is not value:
                changes[fld.name] = new
    if changes:
        f = replace(f, **changes)
    return fn(f)


def rename_predicates(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Point predicates at other channels; names missing from mapping stay."""

    def rename(node: Formula) -> Formula:
        if isinstance(node, Predicate) and node.name in mapping:
            return replace(node, name=mapping[node.name])
        return node

    return rewrite(f, rename)
