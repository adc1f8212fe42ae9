"""Abstract substitutions and abstract unification.

An abstract substitution maps the variables of interest to types; every
entry is either a :class:`~regtype.grammar.TypeGrammar` or, for the
structural analysis, a :class:`~regtype.structural.TypeDescriptor`.  A tuple
with an empty entry collapses to :data:`BOTTOM`.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, NamedTuple, Union

from .grammar import ANY, NUM, Ref, TypeGrammar, Workspace, restrict
from .lattice import includes, intersect, union
from .structural import (
    LABEL_DEPTH,
    Label,
    TypeDescriptor,
    desc_intersect,
    desc_leq,
    desc_union,
    labels_below,
    valid_labels,
)
from .terms import Number, Struct, Term, Var, term_vars, var_occurrences

Entry = Union[TypeGrammar, TypeDescriptor]


class DomainError(ValueError):
    pass


class SolveError(ValueError):
    """The term's shape is not described by the type."""


def entry_type(e: Entry) -> TypeGrammar:
    return e.ty if isinstance(e, TypeDescriptor) else e


class AbstractSub:
    """Immutable tuple of per-variable types, or the bottom substitution."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[Var, Entry] | Iterable[tuple[Var, Entry]] | None = None):
        if entries is None:
            object.__setattr__(self, "_entries", None)
            return
        items = dict(entries)
        if any(entry_type(e).is_bottom for e in items.values()):
            items = None  # type: ignore[assignment]
        object.__setattr__(self, "_entries", items)

    def __setattr__(self, name, value):
        raise AttributeError("AbstractSub is immutable")

    @property
    def is_bottom(self) -> bool:
        return self._entries is None

    @property
    def vars(self) -> tuple[Var, ...]:
        return tuple(self._entries or ())

    def __getitem__(self, v: Var) -> Entry:
        if self._entries is None:
            raise DomainError("bottom substitution has no entries")
        try:
            return self._entries[v]
        except KeyError:
            raise DomainError(f"no entry for variable {v}") from None

    def __contains__(self, v: object) -> bool:
        return self._entries is not None and v in self._entries

    def items(self) -> Iterator[tuple[Var, Entry]]:
        return iter((self._entries or {}).items())

    def types(self) -> tuple[TypeGrammar, ...]:
        return tuple(entry_type(e) for _, e in self.items())

    def update(self, changes: Mapping[Var, Entry]) -> "AbstractSub":
        if self._entries is None:
            return self
        new = dict(self._entries)
        new.update(changes)
        return AbstractSub(new)

    def project(self, variables: Iterable[Var]) -> "AbstractSub":
        if self._entries is None:
            return self
        return AbstractSub((v, self._entries[v]) for v in variables)

    def without(self, variables: Iterable[Var]) -> "AbstractSub":
        if self._entries is None:
            return self
        drop = set(variables)
        return AbstractSub((v, e) for v, e in self._entries.items() if v not in drop)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AbstractSub) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(None if self._entries is None else tuple(self._entries.items()))

    def __repr__(self) -> str:
        if self._entries is None:
            return "BOTTOM"
        inner = ", ".join(f"{v}: {e}" for v, e in self._entries.items())
        return "{" + inner + "}"


BOTTOM = AbstractSub(None)


def _check_vars(a1: AbstractSub, a2: AbstractSub) -> None:
    if a1.vars != a2.vars and set(a1.vars) != set(a2.vars):
        raise DomainError(f"variable sets differ: {a1.vars} vs {a2.vars}")


def entry_leq(e1: Entry, e2: Entry) -> bool:
    if isinstance(e1, TypeDescriptor) and isinstance(e2, TypeDescriptor):
        return desc_leq(e1, e2)
    return includes(entry_type(e1), entry_type(e2))


def entry_lub(e1: Entry, e2: Entry) -> Entry:
    if isinstance(e1, TypeDescriptor):
        return desc_union(e1, e2)  # type: ignore[arg-type]
    return union(e1, e2)  # type: ignore[arg-type]


def entry_glb(e1: Entry, e2: Entry) -> Entry:
    if isinstance(e1, TypeDescriptor):
        return desc_intersect(e1, e2)  # type: ignore[arg-type]
    return intersect(e1, e2)  # type: ignore[arg-type]


def asub_leq(a1: AbstractSub, a2: AbstractSub) -> bool:
    if a1.is_bottom:
        return True
    if a2.is_bottom:
        return False
    _check_vars(a1, a2)
    return all(entry_leq(e, a2[v]) for v, e in a1.items())


def asub_lub(a1: AbstractSub, a2: AbstractSub) -> AbstractSub:
    if a1.is_bottom:
        return a2
    if a2.is_bottom:
        return a1
    _check_vars(a1, a2)
    return AbstractSub((v, entry_lub(e, a2[v])) for v, e in a1.items())


def asub_glb(a1: AbstractSub, a2: AbstractSub) -> AbstractSub:
    if a1.is_bottom or a2.is_bottom:
        return BOTTOM
    _check_vars(a1, a2)
    return AbstractSub((v, entry_glb(e, a2[v])) for v, e in a1.items())


def term_to_type(t: Term, a: AbstractSub) -> TypeGrammar:
    """The type of ``t`` with every variable replaced by its type in ``a``."""
    if a.is_bottom:
        raise DomainError("term_to_type on bottom substitution")
    ws = Workspace()
    var_refs: dict[Var, Ref] = {}

    def build(u: Term) -> Ref:
        if isinstance(u, Var):
            if u not in var_refs:
                var_refs[u] = ws.add(entry_type(a[u]))
            return var_refs[u]
        if isinstance(u, Number):
            return NUM
        return ws.new_key(False, {u.functor: tuple(build(x) for x in u.args)})

    return ws.freeze(build(t))


def term_labels(t: Term, a: AbstractSub, depth: int = LABEL_DEPTH) -> set[Label]:
    """Labels a descriptor built from ``t`` receives: the name of every
    variable of ``t`` at the position where it occurs."""
    out: set[Label] = set()
    for y, sel in var_occurrences(t):
        d = a[y]
        if isinstance(d, TypeDescriptor) and len(sel) <= depth:
            out.add(Label(sel, d.name))
    return out


class TypeEquation(NamedTuple):
    var: Var
    type: TypeGrammar


def solve(t: Term, ty: TypeGrammar) -> list[TypeEquation]:
    """Types of the variables of ``t`` for ``t`` to be a term of ``ty``.

    Descends through the unique production for each functor of ``t``; a
    variable occurring several times gets the intersection of its types.
    """
    refs: dict[Var, list[Ref]] = {}
    stack: list[tuple[Term, Ref]] = [(t, ty.root)]
    while stack:
        u, r = stack.pop()
        if isinstance(u, Var):
            refs.setdefault(u, []).append(r)
        elif isinstance(u, Number):
            continue
        elif r == ANY:
            for y in term_vars(u):
                refs.setdefault(y, []).append(ANY)
        elif isinstance(r, int) and (children := ty.node(r).get(u.functor)) is not None:
            stack.extend(zip(u.args, children))
        else:
            raise SolveError(f"{u} has no production in {ty}")
    out = []
    for y in term_vars(t):
        types = [restrict(ty, r) for r in dict.fromkeys(refs[y])]
        acc = types[0]
        for other in types[1:]:
            acc = intersect(acc, other)
        out.append(TypeEquation(y, acc))
    return out


def amgu(a: AbstractSub, x: Var, t: Term, label_depth: int = LABEL_DEPTH) -> AbstractSub:
    """Abstract unification of ``x = t`` over ``a``; failure is BOTTOM."""
    if a.is_bottom:
        return a
    missing = [y for y in [x, *term_vars(t)] if y not in a]
    if missing:
        raise DomainError(f"no entry for {', '.join(map(str, missing))}")
    ex = a[x]
    tx = intersect(entry_type(ex), term_to_type(t, a))
    if tx.is_bottom:
        return BOTTOM
    try:
        eqs = solve(t, tx)
    except SolveError:
        return BOTTOM

    if not isinstance(ex, TypeDescriptor):
        changes: dict[Var, Entry] = {x: tx}
        for y, ty in eqs:
            changes[y] = intersect(entry_type(changes.get(y, a[y])), ty)
        return a.update(changes)

    x_labels = (ex.labels | term_labels(t, a, label_depth)) - {Label((), ex.name)}
    new_x = TypeDescriptor(ex.name, valid_labels(x_labels, tx), tx)
    occurrences: dict[Var, list] = {}
    for y, sel in var_occurrences(t):
        occurrences.setdefault(y, []).append(sel)
    dchanges: dict[Var, Entry] = {x: new_x}
    for y, ty in eqs:
        dy = dchanges.get(y, a[y])
        assert isinstance(dy, TypeDescriptor)
        ty = intersect(dy.ty, ty)
        labels = set(dy.labels)
        for sel in occurrences[y]:
            labels |= labels_below(new_x.labels, sel)
        labels.discard(Label((), dy.name))
        dchanges[y] = TypeDescriptor(dy.name, valid_labels(labels, ty), ty)
    return a.update(dchanges)


def unify_terms(a: AbstractSub, t1: Term, t2: Term, label_depth: int = LABEL_DEPTH) -> AbstractSub:
    """Abstract unification of two arbitrary terms."""
    stack = [(t1, t2)]
    while stack and not a.is_bottom:
        u, w = stack.pop()
        if isinstance(u, Var):
            a = amgu(a, u, w, label_depth)
        elif isinstance(w, Var):
            a = amgu(a, w, u, label_depth)
        elif isinstance(u, Number) or isinstance(w, Number):
            if not (isinstance(u, Number) and isinstance(w, Number)):
                return BOTTOM
            if u.value != w.value:
                return BOTTOM
        else:
            assert isinstance(u, Struct) and isinstance(w, Struct)
            if u.functor != w.functor:
                return BOTTOM
            stack.extend(zip(u.args, w.args))
    return a
