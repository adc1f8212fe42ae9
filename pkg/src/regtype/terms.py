"""Terms, functors and selectors of the analyzed logic language."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Union


class Functor(NamedTuple):
    name: str
    arity: int

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


CONS = Functor(".", 2)
NIL = Functor("[]", 0)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Number:
    value: Union[int, float]

    def __str__(self) -> str:
        return repr(self.value)


@dataclass(frozen=True)
class Struct:
    name: str
    args: tuple["Term", ...] = ()

    @property
    def functor(self) -> Functor:
        return Functor(self.name, len(self.args))

    def __str__(self) -> str:
        return format_term(self)


Term = Union[Var, Number, Struct]


class Step(NamedTuple):
    """One selector step: argument ``index`` (1-based) of ``functor``."""

    functor: Functor
    index: int

    def __str__(self) -> str:
        return f"({self.functor}).{self.index}"


# A selector is a tuple of steps; () is the empty selector and + concatenates.
Selector = tuple[Step, ...]
EPSILON: Selector = ()


def format_selector(sel: Selector) -> str:
    if not sel:
        return "ε"
    return "·".join(str(step) for step in sel)


def atom(name: str) -> Struct:
    return Struct(name, ())


def mklist(items, tail: Term | None = None) -> Term:
    result: Term = tail if tail is not None else atom("[]")
    for item in reversed(list(items)):
        result = Struct(".", (item, result))
    return result


def subterm_at(t: Term, sel: Selector) -> Term | None:
    """Return the subterm of ``t`` addressed by ``sel``, or None if the path
    does not exist in ``t``."""
    for functor, index in sel:
        if not isinstance(t, Struct) or t.functor != functor:
            return None
        if not 1 <= index <= functor.arity:
            return None
        t = t.args[index - 1]
    return t


def term_vars(t: Term) -> list[Var]:
    """Variables of ``t`` in first-occurrence order, without repetitions."""
    seen: dict[Var, None] = {}
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            seen.setdefault(u)
        elif isinstance(u, Struct):
            stack.extend(reversed(u.args))
    return list(seen)


def var_occurrences(t: Term, prefix: Selector = EPSILON) -> Iterator[tuple[Var, Selector]]:
    if isinstance(t, Var):
        yield t, prefix
    elif isinstance(t, Struct):
        f = t.functor
        for i, arg in enumerate(t.args, 1):
            yield from var_occurrences(arg, prefix + (Step(f, i),))


def term_depth(t: Term) -> int:
    if isinstance(t, Struct) and t.args:
        return 1 + max(term_depth(a) for a in t.args)
    return 1


def is_ground(t: Term) -> bool:
    return not term_vars(t)


_fresh = itertools.count()


def rename_apart(t: Term, mapping: dict[Var, Var]) -> Term:
    if isinstance(t, Var):
        if t not in mapping:
            mapping[t] = Var(f"_R{next(_fresh)}")
        return mapping[t]
    if isinstance(t, Struct):
        return Struct(t.name, tuple(rename_apart(a, mapping) for a in t.args))
    return t


def _needs_quotes(name: str) -> bool:
    if name in ("[]", ".", "{}"):
        return False
    if name[:1].islower() and all(c.isalnum() or c == "_" for c in name):
        return False
    if all(c in "+-*/\\^<>=~:.?@#&$" for c in name):
        return False
    return True


def format_atom(name: str) -> str:
    if _needs_quotes(name):
        return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"
    return name


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Number):
        return repr(t.value)
    if not t.args:
        return format_atom(t.name)
    if t.functor == CONS:
        items = []
        while isinstance(t, Struct) and t.functor == CONS:
            items.append(format_term(t.args[0]))
            t = t.args[1]
        if isinstance(t, Struct) and t.functor == NIL:
            return "[" + ",".join(items) + "]"
        return "[" + ",".join(items) + "|" + format_term(t) + "]"
    return format_atom(t.name) + "(" + ",".join(format_term(a) for a in t.args) + ")"
