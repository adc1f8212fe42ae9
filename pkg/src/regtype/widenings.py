"""Widening operators over deterministic grammars.

Unary operators (functor, jungle, shortening, restricted shortening,
depth-k) transform a single grammar; :func:`widen` feeds them the union of
the previous and the candidate approximation.  Topological clash looks at
both approximations.  Structural widening works on type descriptors and
lives in :mod:`regtype.structural`.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .grammar import ANY, BOT, NUM, Ref, TypeGrammar, Workspace, normalize, restrict
from .lattice import includes, includes_refs, union

# safety net for the merge loops; none of them needs more than a handful of
# rounds on realistic grammars
MAX_MERGES = 500


class WideningKind(enum.Enum):
    FUNCTOR = "functor"
    JUNGLE = "jungle"
    SHORTEN = "shorten"
    RSHORTEN = "rshorten"
    DEPTHK = "depthk"
    CLASH = "clash"
    STRUCT = "struct"

    @classmethod
    def parse(cls, text: str) -> "WideningKind":
        if text == "structural":
            return cls.STRUCT
        return cls(text)

    @property
    def binary(self) -> bool:
        return self in (WideningKind.CLASH, WideningKind.STRUCT)


def widen_functor(t: TypeGrammar) -> TypeGrammar:
    """Collapse ``t`` into a single nonterminal over all of its functors."""
    if isinstance(t.root, str):
        return t
    if any(ANY in ch for node in t.nodes for _, ch in node.alts):
        return TypeGrammar(ANY)
    has_num = any(node.has_num for node in t.nodes) or any(
        NUM in ch for node in t.nodes for _, ch in node.alts
    )
    ws = Workspace()
    star = ws.new_key(has_num)
    ws.defs[star] = (has_num, {f: (star,) * f.arity for f in t.functors()})
    return ws.freeze(star)


def widen_jungle(t: TypeGrammar) -> TypeGrammar:
    """Give every functor one shared nonterminal per argument position."""
    if isinstance(t.root, str):
        return t
    members: dict[tuple, set[Ref]] = {}
    for node in t.nodes:
        for f, ch in node.alts:
            for i, c in enumerate(ch):
                members.setdefault((f, i), set()).add(c)

    ws = Workspace()
    slot_key: dict[tuple, Ref] = {}
    for slot, refs in members.items():
        slot_key[slot] = ANY if ANY in refs else ws.new_key()

    def args(f) -> tuple:
        return tuple(slot_key[(f, i)] for i in range(f.arity))

    for slot, refs in members.items():
        k = slot_key[slot]
        if k == ANY:
            continue
        has_num = NUM in refs
        alts = {}
        for r in refs:
            if isinstance(r, int):
                node = t.node(r)
                has_num = has_num or node.has_num
                for f, _ in node.alts:
                    alts[f] = args(f)
        ws.defs[k] = (has_num, alts)  # type: ignore[index]
    root = t.node(t.root)
    top = ws.new_key(root.has_num, {f: args(f) for f, _ in root.alts})
    return ws.freeze(top)


def _merge(ws: Workspace, a: int, b: int, root: int) -> int:
    """Replace ``a`` and ``b`` everywhere by a fresh node for their lub."""
    u = ws.merge(a, b)
    return u if root in (a, b) else root


def _bfs(t: TypeGrammar) -> list[int]:
    order, seen = [], {t.root}
    queue = deque([t.root])
    while queue:
        r = queue.popleft()
        if not isinstance(r, int):
            continue
        order.append(r)
        for c in t.successors(r):
            if c not in seen:
                seen.add(c)
                queue.append(c)
    return order


def _same_functor_pair(t: TypeGrammar, restricted: bool) -> Optional[tuple[int, int]]:
    for n in _bfs(t):
        fs = t.principal_functors(n)
        below = t.reachable(n) - {n}
        for m in sorted(below):
            if t.principal_functors(m) != fs:
                continue
            if not restricted or includes_refs(t, m, t, n):
                return n, m
    return None


def _replace_by_lub(t: TypeGrammar, n: int, m: int) -> TypeGrammar:
    """Replace or-nodes ``n`` and ``m`` of ``t`` by one node for their lub.

    The lub is built by subset construction over the original nodes.  A
    set of nodes becomes the new node when it only holds ``n``, ``m`` and
    nodes already included in the lub; any other set stays a node of its
    own, so argument positions that are not recursive keep their shape.
    """
    lub = union(restrict(t, n), restrict(t, m))
    pair = frozenset((n, m))
    names: dict[frozenset, str] = {}
    raw: dict[str, list] = {}
    todo: list[tuple[frozenset, str]] = []

    def state(refs: frozenset) -> str:
        refs = refs - {BOT}
        if ANY in refs:
            return ANY
        if not refs:
            return BOT
        if refs == {NUM}:
            return NUM
        if refs & pair and all(r in pair or includes(restrict(t, r), lub) for r in refs):
            refs = pair
        name = names.get(refs)
        if name is None:
            name = names[refs] = f"S{len(names)}"
            todo.append((refs, name))
        return name

    root = state(frozenset({t.root}))
    while todo:
        refs, name = todo.pop()
        has_num = NUM in refs
        grouped: dict = {}
        for r in sorted(refs - {NUM}):
            node = t.node(r)
            has_num = has_num or node.has_num
            for f, children in node.alts:
                grouped.setdefault(f, []).append(children)
        raw[name] = (["num"] if has_num else []) + [
            (f, [state(frozenset(col)) for col in zip(*chs)]) for f, chs in grouped.items()
        ]
    return normalize(raw, root)


def widen_shorten(t: TypeGrammar) -> TypeGrammar:
    """Replace path-connected or-nodes with equal principal functors by
    their least upper bound."""
    for _ in range(MAX_MERGES):
        pair = _same_functor_pair(t, restricted=False)
        if pair is None:
            return t
        t = _replace_by_lub(t, *pair)
    return widen_functor(t)


def widen_rshorten(t: TypeGrammar) -> TypeGrammar:
    """Shortening restricted to descendants included in their ancestor;
    the descendant is replaced by the ancestor."""
    for _ in range(MAX_MERGES):
        pair = _same_functor_pair(t, restricted=True)
        if pair is None:
            return t
        n, m = pair
        ws = Workspace()
        base = ws.add(t)
        ws.redirect({base + m: base + n})  # type: ignore[operator]
        t = ws.freeze(base)
    return widen_functor(t)


def _depth_violation(t: TypeGrammar, k: int) -> Optional[tuple[int, int]]:
    """First (ancestor, node) pair where some functor occurs more than k
    times on a simple path from the root; the ancestor is the k-th
    shallowest node on the path carrying that functor."""
    if not isinstance(t.root, int):
        return None
    # depth-first over simple paths; back edges do not count as depth
    stack: list[tuple[int, tuple[int, ...]]] = [(t.root, ())]
    while stack:
        r, path = stack.pop()
        path = path + (r,)
        for f, _ in t.node(r).alts:
            if f.arity == 0:
                continue
            carriers = [p for p in path if t.node(p).get(f) is not None]
            if len(carriers) > k:
                return carriers[k - 1], r
        for c in reversed(list(dict.fromkeys(t.successors(r)))):
            if isinstance(c, int) and c not in path:
                stack.append((c, path))
    return None


def widen_depthk(t: TypeGrammar, k: int) -> TypeGrammar:
    """Bound to ``k`` the in-depth occurrences of every compound functor."""
    if k < 1:
        raise ValueError("depth-k widening needs k >= 1")
    for _ in range(MAX_MERGES):
        pair = _depth_violation(t, k)
        if pair is None:
            return t
        ws = Workspace()
        base = ws.add(t)
        root = _merge(ws, base + pair[0], base + pair[1], base)  # type: ignore[operator]
        t = ws.freeze(root)
    # the bound was not reached; fall back to the coarsest operator
    return widen_functor(t)


def widen_clash(prev: Optional[TypeGrammar], new: TypeGrammar) -> TypeGrammar:
    """Topological clash widening of ``new`` against ``prev``."""
    if prev is None or prev.is_bottom:
        return new
    u = union(prev, new)
    if not isinstance(u.root, int):
        return u

    clashes: list[tuple[int, int]] = []
    seen: set[tuple[Ref, Ref]] = set()

    def walk(a: Ref, p: Ref, ancestors: tuple[int, ...]) -> None:
        if not isinstance(a, int) or (a, p) in seen or p == ANY:
            return
        seen.add((a, p))
        fs = u.principal_functors(a)
        pfs = frozenset() if p == BOT else (frozenset({NUM}) if p == NUM else prev.node(p).functors())
        if fs != pfs:
            for anc in reversed(ancestors):
                if anc != a and u.principal_functors(anc) >= fs:
                    clashes.append((anc, a))
                    break
            return
        pnode = prev.node(p)
        for f, children in u.node(a).alts:
            for c, d in zip(children, pnode.get(f) or ()):
                walk(c, d, ancestors + (a,))

    walk(u.root, prev.root, ())
    if not clashes:
        return u
    ws = Workspace()
    base = ws.add(u)
    alias: dict[Ref, Ref] = {}

    def find(r: Ref) -> Ref:
        while r in alias:
            r = alias[r]
        return r

    root: Ref = base
    for anc, node in clashes:
        a, b = find(base + anc), find(base + node)  # type: ignore[operator]
        if a == b:
            continue
        w = ws.merge(a, b)  # type: ignore[arg-type]
        alias[a] = alias[b] = w
        root = find(root)
    return ws.freeze(root)


def widen(
    kind: WideningKind,
    previous: Optional[TypeGrammar],
    candidate: TypeGrammar,
    k: int = 2,
) -> TypeGrammar:
    """Widen ``candidate`` against ``previous`` (None on first approximation)."""
    if kind is WideningKind.STRUCT:
        raise TypeError("structural widening works on descriptors; see regtype.structural")
    if kind is WideningKind.CLASH:
        return widen_clash(previous, candidate)
    joined = candidate if previous is None else union(previous, candidate)
    if kind is WideningKind.FUNCTOR:
        return widen_functor(joined)
    if kind is WideningKind.JUNGLE:
        return widen_jungle(joined)
    if kind is WideningKind.SHORTEN:
        return widen_shorten(joined)
    if kind is WideningKind.RSHORTEN:
        return widen_rshorten(joined)
    if kind is WideningKind.DEPTHK:
        return widen_depthk(joined, k)
    raise ValueError(kind)


@dataclass(frozen=True)
class WideningRequest:
    candidate: TypeGrammar
    previous: Optional[TypeGrammar] = None


def widen_request(kind: WideningKind, req: WideningRequest, k: int = 2) -> TypeGrammar:
    return widen(kind, req.previous, req.candidate, k)
