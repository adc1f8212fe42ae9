"""Inclusion, union and intersection of deterministic grammars."""

from __future__ import annotations

from typing import Iterable, Mapping

from .grammar import (
    ANY,
    BOT,
    NUM,
    BOTTOM_TYPE,
    Ref,
    TypeGrammar,
    Workspace,
)


def includes_refs(g1: TypeGrammar, r1: Ref, g2: TypeGrammar, r2: Ref) -> bool:
    """Coinductive simulation of ``r1`` (in ``g1``) by ``r2`` (in ``g2``).

    Sound and complete because both grammars are deterministic and have no
    empty nonterminals.
    """
    assumed: set[tuple[Ref, Ref]] = set()
    stack = [(r1, r2)]
    while stack:
        a, b = stack.pop()
        if a == BOT or b == ANY or (a, b) in assumed:
            continue
        assumed.add((a, b))
        if a == ANY or b == BOT:
            return False
        if a == NUM:
            if b == NUM or g2.node(b).has_num:
                continue
            return False
        if b == NUM:
            return False
        na, nb = g1.node(a), g2.node(b)
        if na.has_num and not nb.has_num:
            return False
        for f, children in na.alts:
            other = nb.get(f)
            if other is None:
                return False
            stack.extend(zip(children, other))
    return True


def includes(t1: TypeGrammar, t2: TypeGrammar) -> bool:
    """True iff every term of ``t1`` is a term of ``t2``."""
    return includes_refs(t1, t1.root, t2, t2.root)


def equiv(t1: TypeGrammar, t2: TypeGrammar) -> bool:
    return includes(t1, t2) and includes(t2, t1)


def union(t1: TypeGrammar, t2: TypeGrammar) -> TypeGrammar:
    if t1.is_bottom:
        return t2
    if t2.is_bottom or t1 == t2:
        return t1
    ws = Workspace()
    return ws.freeze(ws.join([ws.add(t1), ws.add(t2)]))


def union_all(types: Iterable[TypeGrammar]) -> TypeGrammar:
    ws = Workspace()
    return ws.freeze(ws.join([ws.add(t) for t in types]))


def intersect(t1: TypeGrammar, t2: TypeGrammar) -> TypeGrammar:
    if t1.is_any:
        return t2
    if t2.is_any or t1 == t2:
        return t1
    if t1.is_bottom or t2.is_bottom:
        return BOTTOM_TYPE
    ws = Workspace()
    return ws.freeze(ws.meet(ws.add(t1), ws.add(t2)))


def is_empty(t: TypeGrammar | Mapping) -> bool:
    """True iff the type denotes no term.

    Accepts a grammar or a raw production table (see
    :func:`regtype.grammar.normalize`); for the latter the productive
    nonterminal fixpoint is run during normalization.
    """
    if isinstance(t, TypeGrammar):
        return productive_root(t)
    from .grammar import normalize

    return normalize(t).is_bottom


def productive_root(t: TypeGrammar) -> bool:
    if isinstance(t.root, str):
        return t.root == BOT
    productive: set[int] = set()
    changed = True
    while changed:
        changed = False
        for i, node in enumerate(t.nodes):
            if i in productive:
                continue
            if node.has_num or any(
                all(c in (ANY, NUM) or c in productive for c in ch) for _, ch in node.alts
            ):
                productive.add(i)
                changed = True
    return t.root not in productive


def simplify_types(
    env: Mapping[str, TypeGrammar],
) -> tuple[dict[str, TypeGrammar], dict[str, str]]:
    """Identify equivalent named types.

    Returns the representatives (lexicographically smallest name of each
    class) and a map sending every original name to its representative.
    """
    reps: dict[str, TypeGrammar] = {}
    renaming: dict[str, str] = {}
    for name in sorted(env):
        t = env[name]
        for rname, rtype in reps.items():
            if equiv(t, rtype):
                renaming[name] = rname
                break
        else:
            reps[name] = t
            renaming[name] = name
    return reps, renaming
