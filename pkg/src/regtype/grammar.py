"""Deterministic regular term grammars.

A :class:`TypeGrammar` is an immutable value.  Plain nonterminals are the
integers ``0..n-1`` indexing ``nodes``; the distinguished nonterminals are the
strings :data:`ANY`, :data:`NUM` and :data:`BOT`.  Every grammar handed out by
this module is *finalized*: unproductive and unreachable nonterminals are
gone, nonterminals denoting the same set are merged, and the remaining ones
are numbered breadth-first from the root.  Two finalized grammars are
therefore equal as Python values exactly when they denote the same set.

Each plain node may carry a ``num`` alternative next to its functor
alternatives (``T -> [] | num | .(T,T)``); ``num`` and ``any`` count as
terminals for the determinism condition.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence, Union

from .terms import Functor, Number, Selector, Struct, Term, Var

ANY = "any"
NUM = "num"
BOT = "$bot"
SPECIALS = (ANY, NUM, BOT)

Ref = Union[int, str]


class GrammarError(ValueError):
    pass


def functor_key(f: Functor) -> tuple:
    # constants first, then compound functors; num is printed between them
    return (f.arity > 0, f.name, f.arity)


@dataclass(frozen=True)
class Node:
    has_num: bool
    alts: tuple[tuple[Functor, tuple[Ref, ...]], ...]

    def get(self, f: Functor) -> tuple[Ref, ...] | None:
        for g, children in self.alts:
            if g == f:
                return children
        return None

    def functors(self) -> frozenset:
        """Principal functors, with ``num`` as a pseudo-functor."""
        fs = {f for f, _ in self.alts}
        if self.has_num:
            fs.add(NUM)
        return frozenset(fs)


@dataclass(frozen=True)
class TypeGrammar:
    root: Ref
    nodes: tuple[Node, ...] = ()

    def node(self, ref: Ref) -> Node:
        return self.nodes[ref]  # type: ignore[index]

    @property
    def is_any(self) -> bool:
        return self.root == ANY

    @property
    def is_num(self) -> bool:
        return self.root == NUM

    @property
    def is_bottom(self) -> bool:
        return self.root == BOT

    def refs(self) -> Iterator[Ref]:
        return iter(range(len(self.nodes)))

    def principal_functors(self, ref: Ref) -> frozenset:
        if ref == ANY:
            return frozenset({ANY})
        if ref == NUM:
            return frozenset({NUM})
        if ref == BOT:
            return frozenset()
        return self.node(ref).functors()

    def successors(self, ref: Ref) -> Iterator[Ref]:
        if isinstance(ref, int):
            for _, children in self.node(ref).alts:
                yield from children

    def reachable(self, ref: Ref) -> set[Ref]:
        """Plain nonterminals reachable from ``ref`` (including itself)."""
        seen: set[Ref] = set()
        stack = [ref]
        while stack:
            r = stack.pop()
            if isinstance(r, int) and r not in seen:
                seen.add(r)
                stack.extend(self.successors(r))
        return seen

    def functors(self) -> set[Functor]:
        return {f for node in self.nodes for f, _ in node.alts}

    def __str__(self) -> str:
        return format_grammar(self)

    def __repr__(self) -> str:
        return f"TypeGrammar({format_grammar(self)!r})"


ANY_TYPE = TypeGrammar(ANY)
NUM_TYPE = TypeGrammar(NUM)
BOTTOM_TYPE = TypeGrammar(BOT)


def special(ref: str) -> TypeGrammar:
    return {ANY: ANY_TYPE, NUM: NUM_TYPE, BOT: BOTTOM_TYPE}[ref]


# --------------------------------------------------------------------------
# finalization

Defs = Mapping[Hashable, tuple[bool, Mapping[Functor, Sequence[Ref]]]]


def _finalize(root: Ref, defs: Defs) -> TypeGrammar:
    """Build a finalized grammar from a deterministic production table.

    ``defs`` maps non-string keys to ``(has_num, {functor: children})``;
    children are keys of ``defs`` or one of the special strings.
    """
    if isinstance(root, str):
        return special(root)

    reach: list = []
    seen = {root}
    queue = deque([root])
    while queue:
        k = queue.popleft()
        reach.append(k)
        for children in defs[k][1].values():
            for c in children:
                if not isinstance(c, str) and c not in seen:
                    seen.add(c)
                    queue.append(c)

    # productive nonterminals (least fixpoint)
    productive: set = set()
    changed = True
    while changed:
        changed = False
        for k in reach:
            if k in productive:
                continue
            has_num, alts = defs[k]
            if has_num or any(
                all(c in (ANY, NUM) or c in productive for c in children)
                for children in alts.values()
            ):
                productive.add(k)
                changed = True
    if root not in productive:
        return BOTTOM_TYPE

    def ok(c: Ref) -> bool:
        return c in (ANY, NUM) or c in productive

    cleaned: dict = {}
    for k in reach:
        if k in productive:
            has_num, alts = defs[k]
            cleaned[k] = (
                has_num,
                {f: tuple(ch) for f, ch in alts.items() if all(ok(c) for c in ch)},
            )
    num_only = {k for k, (has_num, alts) in cleaned.items() if not alts}

    def fix(c: Ref) -> Ref:
        return NUM if c in num_only else c

    if root in num_only:
        return NUM_TYPE
    table = {
        k: (has_num, {f: tuple(fix(c) for c in ch) for f, ch in alts.items()})
        for k, (has_num, alts) in cleaned.items()
        if k not in num_only
    }

    # Moore-style partition refinement; all states are non-empty so equal
    # languages coincide with bisimilarity.
    keys = list(table)
    block = {k: (table[k][0], tuple(sorted(table[k][1], key=functor_key))) for k in keys}
    n_blocks = len(set(block.values()))
    while True:
        def bl(c: Ref):
            return c if isinstance(c, str) else block[c]

        refined = {
            k: (
                block[k],
                tuple(
                    (f, tuple(bl(c) for c in table[k][1][f]))
                    for f in sorted(table[k][1], key=functor_key)
                ),
            )
            for k in keys
        }
        ids: dict = {}
        new_block = {k: ids.setdefault(sig, len(ids)) for k, sig in refined.items()}
        if len(ids) == n_blocks:
            break
        block, n_blocks = new_block, len(ids)
    rep: dict = {}
    for k in keys:
        rep.setdefault(block[k], k)

    # canonical breadth-first numbering over block representatives
    number: dict = {}
    order: list = []
    queue = deque([block[root]])
    number[block[root]] = 0
    while queue:
        b = queue.popleft()
        order.append(b)
        has_num, alts = table[rep[b]]
        for f in sorted(alts, key=functor_key):
            for c in alts[f]:
                if not isinstance(c, str) and block[c] not in number:
                    number[block[c]] = len(number)
                    queue.append(block[c])

    def out(c: Ref) -> Ref:
        return c if isinstance(c, str) else number[block[c]]

    nodes = []
    for b in order:
        has_num, alts = table[rep[b]]
        nodes.append(
            Node(
                has_num,
                tuple((f, tuple(out(c) for c in alts[f])) for f in sorted(alts, key=functor_key)),
            )
        )
    return TypeGrammar(0, tuple(nodes))


class Workspace:
    """Mutable production table used to build and transform grammars.

    Plain keys are integers allocated by the workspace.  ``join`` and
    ``meet`` add nodes for least upper bounds / greatest lower bounds of
    existing keys; ``freeze`` turns a key into a finalized grammar.
    """

    def __init__(self) -> None:
        self.defs: dict[int, tuple[bool, dict[Functor, tuple[Ref, ...]]]] = {}
        self._ids = itertools.count()
        self._join_memo: dict[frozenset, Ref] = {}
        self._join_sets: dict[int, frozenset] = {}
        self._meet_memo: dict[frozenset, Ref] = {}
        self._pending: list = []

    def new_key(self, has_num: bool = False, alts: dict | None = None) -> int:
        k = next(self._ids)
        self.defs[k] = (has_num, dict(alts or {}))
        return k

    def add(self, g: TypeGrammar) -> Ref:
        if isinstance(g.root, str):
            return g.root
        base = next(self._ids)
        for _ in range(len(g.nodes) - 1):
            next(self._ids)

        def m(c: Ref) -> Ref:
            return c if isinstance(c, str) else base + c

        for i, node in enumerate(g.nodes):
            self.defs[base + i] = (node.has_num, {f: tuple(m(c) for c in ch) for f, ch in node.alts})
        return base + g.root  # type: ignore[operator]

    def functors_of(self, ref: Ref) -> frozenset:
        if isinstance(ref, str):
            return frozenset() if ref == BOT else frozenset({ref})
        has_num, alts = self.defs[ref]
        return frozenset(alts) | ({NUM} if has_num else set())

    # least upper bound by subset construction (tuple-distributive closure)
    def join(self, refs: Iterable[Ref]) -> Ref:
        key = self._join_alloc(refs)
        self._drain_joins()
        return key

    def _join_alloc(self, refs: Iterable[Ref]) -> Ref:
        # a key that stands for a join is replaced by the keys it joins, so
        # that sets never mention a key whose productions are still pending
        s = frozenset(
            x for r in refs for x in self._join_sets.get(r, (r,))  # type: ignore[arg-type]
        ) - {BOT}
        if ANY in s:
            return ANY
        if not s:
            return BOT
        if len(s) == 1:
            return next(iter(s))
        if s == {NUM}:
            return NUM
        k = self._join_memo.get(s)
        if k is None:
            k = next(self._ids)
            self._join_memo[s] = k
            self._join_sets[k] = s
            self._pending.append((s, k))
        return k

    def _drain_joins(self) -> None:
        while self._pending:
            s, k = self._pending.pop()
            has_num = False
            grouped: dict[Functor, list] = {}
            for r in sorted(s, key=str):
                if r == NUM:
                    has_num = True
                    continue
                hn, alts = self.defs[r]
                has_num = has_num or hn
                for f, ch in alts.items():
                    grouped.setdefault(f, []).append(ch)
            self.defs[k] = (
                has_num,
                {f: tuple(self._join_alloc(col) for col in zip(*chs)) for f, chs in grouped.items()},
            )

    # greatest lower bound by product construction
    def meet(self, a: Ref, b: Ref) -> Ref:
        pending: list = []

        def alloc(x: Ref, y: Ref) -> Ref:
            if x == BOT or y == BOT:
                return BOT
            if x == ANY:
                return y
            if y == ANY or x == y:
                return x
            if x == NUM or y == NUM:
                other = y if x == NUM else x
                if other == NUM or (isinstance(other, int) and self.defs[other][0]):
                    return NUM
                return BOT
            pair = frozenset((x, y))
            k = self._meet_memo.get(pair)
            if k is None:
                k = next(self._ids)
                self._meet_memo[pair] = k
                pending.append((x, y, k))
            return k

        key = alloc(a, b)
        while pending:
            x, y, k = pending.pop()
            hx, ax = self.defs[x]
            hy, ay = self.defs[y]
            self.defs[k] = (
                hx and hy,
                {f: tuple(alloc(c, d) for c, d in zip(ax[f], ay[f])) for f in ax if f in ay},
            )
        return key

    def merge(self, a: int, b: int) -> int:
        """Identify keys ``a`` and ``b``: every reference to either goes to a
        new key whose productions are the union of both, made deterministic
        again by subset construction."""
        u = next(self._ids)
        self.defs[u] = (False, {})
        self.redirect({a: u, b: u})
        (ha, aa), (hb, ab) = self.defs[a], self.defs[b]
        alts = dict(aa)
        for f, ch in ab.items():
            alts[f] = tuple(self._join_alloc(col) for col in zip(alts[f], ch)) if f in alts else ch
        self.defs[u] = (ha or hb, alts)
        self._drain_joins()
        return u

    def redirect(self, mapping: Mapping[Ref, Ref]) -> None:
        """Replace every reference to a key in ``mapping`` by its image."""

        def m(c: Ref) -> Ref:
            while c in mapping:
                c = mapping[c]
            return c

        for k, (has_num, alts) in list(self.defs.items()):
            self.defs[k] = (has_num, {f: tuple(m(c) for c in ch) for f, ch in alts.items()})
        self._join_memo.clear()
        self._join_sets.clear()
        self._meet_memo.clear()

    def freeze(self, root: Ref) -> TypeGrammar:
        return _finalize(root, self.defs)


# --------------------------------------------------------------------------
# normalization of raw (possibly non-deterministic) productions

RawRhs = Union[str, tuple]


def normalize(raw: Mapping[str, Sequence[RawRhs]], root: str | None = None) -> TypeGrammar:
    """Normalize raw productions into a finalized deterministic grammar.

    ``raw`` maps nonterminal names to lists of right-hand sides.  A rhs is a
    nonterminal name, one of ``any``/``num``/``$bot``, or a pair
    ``(functor, children)`` where ``functor`` is a :class:`Functor` or a bare
    name and ``children`` is a sequence of names.  Chain productions are
    inlined and alternatives sharing a functor are merged argument-wise.
    """
    if root is None:
        if not raw:
            raise GrammarError("empty production set")
        root = next(iter(raw))
    if root in SPECIALS:
        return special(root)

    chains: dict[str, set[str]] = {}
    alts: dict[str, list[tuple[Functor, tuple[str, ...]]]] = {}
    for name, rhss in raw.items():
        if name in SPECIALS:
            raise GrammarError(f"productions for reserved nonterminal {name!r}")
        chains[name] = set()
        alts[name] = []
        for rhs in rhss:
            if isinstance(rhs, str):
                chains[name].add(rhs)
                continue
            f, children = rhs
            children = tuple(children)
            if not isinstance(f, Functor):
                f = Functor(f, len(children))
            if f.arity != len(children):
                raise GrammarError(
                    f"production {name} -> {f} has {len(children)} argument(s)"
                )
            alts[name].append((f, children))
    for name in raw:
        for used in itertools.chain(chains[name], *(ch for _, ch in alts[name])):
            if used not in raw and used not in SPECIALS:
                raise GrammarError(f"undefined nonterminal {used!r}")
    if root not in raw:
        raise GrammarError(f"undefined nonterminal {root!r}")

    closure_memo: dict[str, frozenset] = {}

    def closure(name: str) -> frozenset:
        if name not in closure_memo:
            seen = {name}
            stack = [name]
            while stack:
                n = stack.pop()
                if n in SPECIALS:
                    continue
                for m in chains[n]:
                    if m not in seen:
                        seen.add(m)
                        stack.append(m)
            closure_memo[name] = frozenset(seen)
        return closure_memo[name]

    defs: dict = {}
    pending: list = []

    def state(names: Iterable[str]) -> Ref:
        s = frozenset(itertools.chain.from_iterable(closure(n) for n in names))
        if ANY in s:
            return ANY
        s = s - {BOT}
        plain = s - {NUM}
        if not plain:
            return NUM if NUM in s else BOT
        key = ("n", s)
        if key not in defs:
            defs[key] = None
            pending.append((key, s))
        return key

    start = state([root])
    while pending:
        key, s = pending.pop()
        grouped: dict[Functor, list] = {}
        for n in sorted(s - {NUM}):
            for f, ch in alts[n]:
                grouped.setdefault(f, []).append(ch)
        defs[key] = (
            NUM in s,
            {f: tuple(state(col) for col in zip(*chs)) for f, chs in grouped.items()},
        )
    return _finalize(start, defs)


def restrict(g: TypeGrammar, ref: Ref) -> TypeGrammar:
    """The grammar rooted at nonterminal ``ref`` of ``g``, renamed apart."""
    if isinstance(ref, str):
        if ref not in SPECIALS:
            raise GrammarError(f"unknown nonterminal {ref!r}")
        return special(ref)
    if not 0 <= ref < len(g.nodes):
        raise GrammarError(f"nonterminal {ref!r} not in grammar")
    defs = {i: (n.has_num, dict(n.alts)) for i, n in enumerate(g.nodes)}
    return _finalize(ref, defs)


def ref_at(g: TypeGrammar, sel: Selector, start: Ref | None = None) -> Ref | None:
    ref = g.root if start is None else start
    for f, i in sel:
        if ref == ANY:
            return ANY
        if isinstance(ref, str):
            return None
        children = g.node(ref).get(f)
        if children is None or not 1 <= i <= len(children):
            return None
        ref = children[i - 1]
    return ref


def subtype_at(g: TypeGrammar, sel: Selector) -> TypeGrammar | None:
    """The type at position ``sel`` inside ``g``, or None on a dead path."""
    ref = ref_at(g, sel)
    if ref is None:
        return None
    return restrict(g, ref)


def member(t: Term, g: TypeGrammar, ref: Ref | None = None) -> bool:
    stack = [(t, g.root if ref is None else ref)]
    while stack:
        u, r = stack.pop()
        if r == ANY:
            continue
        if r == BOT or isinstance(u, Var):
            return False
        if isinstance(u, Number):
            if r == NUM or (isinstance(r, int) and g.node(r).has_num):
                continue
            return False
        if r == NUM:
            return False
        children = g.node(r).get(u.functor)
        if children is None:
            return False
        stack.extend(zip(u.args, children))
    return True


def all_terms(
    alphabet: Iterable[Functor], depth: int, numbers: Sequence = (0,)
) -> list[Term]:
    """Every ground term over ``alphabet`` (plus ``numbers``) of depth <= depth."""
    alphabet = sorted(set(alphabet), key=functor_key)
    levels: list[list[Term]] = []
    for d in range(1, depth + 1):
        terms: list[Term] = [Number(n) for n in numbers]
        for f in alphabet:
            if f.arity == 0:
                terms.append(Struct(f.name))
            elif d > 1:
                for args in itertools.product(levels[-1], repeat=f.arity):
                    terms.append(Struct(f.name, args))
        levels.append(terms)
    return levels[-1] if levels else []


def enumerate_terms(
    g: TypeGrammar,
    depth: int,
    alphabet: Iterable[Functor] | None = None,
    numbers: Sequence = (0,),
) -> set[Term]:
    """Generate the ground terms of depth <= ``depth`` derivable from ``g``.

    ``any`` expands to every term over ``alphabet`` (default: the grammar's
    own functors) and ``num`` to ``numbers``.
    """
    if alphabet is None:
        alphabet = g.functors()
    alphabet = list(alphabet)
    memo: dict = {}
    universe: dict[int, list[Term]] = {}

    def gen(ref: Ref, d: int) -> frozenset:
        if d <= 0 or ref == BOT:
            return frozenset()
        if ref == ANY:
            if d not in universe:
                universe[d] = all_terms(alphabet, d, numbers)
            return frozenset(universe[d])
        if ref == NUM:
            return frozenset(Number(n) for n in numbers)
        if (ref, d) in memo:
            return memo[ref, d]
        node = g.node(ref)
        out: set[Term] = set(Number(n) for n in numbers) if node.has_num else set()
        for f, children in node.alts:
            if not children:
                out.add(Struct(f.name))
            elif d > 1:
                for args in itertools.product(*(sorted(gen(c, d - 1), key=str) for c in children)):
                    out.add(Struct(f.name, args))
        memo[ref, d] = frozenset(out)
        return memo[ref, d]

    return set(gen(g.root, depth))


def check_grammar(g: TypeGrammar) -> None:
    """Assert the structural invariants of a finalized grammar."""
    if isinstance(g.root, str):
        assert not g.nodes, "special grammar with productions"
        return
    assert g.reachable(g.root) == set(range(len(g.nodes))), "unreachable nonterminal"
    for node in g.nodes:
        fs = [f for f, _ in node.alts]
        assert len(fs) == len(set(fs)), "non-deterministic node"
        assert node.alts, "num-only node should be num"
        for f, ch in node.alts:
            assert len(ch) == f.arity
            assert BOT not in ch, "bottom argument"


# --------------------------------------------------------------------------
# textual notation:  T -> [] | .(num,T) ; any, num, $bot are reserved

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<arrow>->)
  | (?P<punct>[|;(),=])
  | (?P<nil>\[\])
  | (?P<bot>\$bot)
  | (?P<nt>[A-Z_][A-Za-z0-9_']*)
  | (?P<atom>[a-z][A-Za-z0-9_]*)
  | (?P<quoted>'(?:[^'\\]|\\.)*')
  | (?P<sym>[+\-*/\\^<>=~:.?@#&]+)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise GrammarError(f"unexpected character {text[pos]!r} at offset {pos}")
        kind = m.lastgroup
        if kind == "quoted":
            tokens.append(("atom", re.sub(r"\\(.)", r"\1", m.group()[1:-1]), pos))
        elif kind == "nl":
            tokens.append((";", ";", pos))
        elif kind in ("punct",):
            tokens.append((m.group(), m.group(), pos))
        elif kind == "sym":
            tokens.append(("atom", m.group(), pos))
        elif kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", pos))
    return tokens


class _GrammarParser:
    def __init__(self, text: str) -> None:
        self.toks = _tokenize(text)
        self.i = 0
        self.raw: dict[str, list] = {}
        self.anon = itertools.count(1)

    def peek(self) -> str:
        return self.toks[self.i][0]

    def take(self, kind: str | None = None) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise GrammarError(f"expected {kind!r}, found {tok[1]!r} at offset {tok[2]}")
        self.i += 1
        return tok

    def skip_separators(self) -> None:
        while self.peek() == ";":
            self.take()

    def parse(self) -> TypeGrammar:
        self.skip_separators()
        if self.peek() == "eof":
            raise GrammarError("empty grammar text")
        # a rule starts with "Name ->"; otherwise the text is a bare type
        if not (self.peek() == "nt" and self.toks[self.i + 1][0] == "arrow"):
            name = f"#{next(self.anon)}"
            self.raw[name] = self.alternatives()
            self.skip_separators()
            self.take("eof")
            return normalize(self.raw, name)
        root = None
        while self.peek() != "eof":
            name = self.take("nt")[1]
            self.take("arrow")
            root = root or name
            self.raw.setdefault(name, []).extend(self.alternatives())
            if self.peek() not in (";", "eof"):
                tok = self.toks[self.i]
                raise GrammarError(f"unexpected {tok[1]!r} at offset {tok[2]}")
            self.skip_separators()
        return normalize(self.raw, root)

    def alternatives(self) -> list:
        alts = [self.alternative()]
        while self.peek() == "|":
            self.take()
            alts.append(self.alternative())
        return alts

    def alternative(self):
        kind, value, pos = self.toks[self.i]
        if kind == "bot":
            self.take()
            return BOT
        if kind == "nt":
            self.take()
            return value
        if kind in ("atom", "nil"):
            self.take()
            if value in (ANY, NUM) and self.peek() != "(":
                return value
            args: list[str] = []
            if self.peek() == "(":
                self.take()
                args.append(self.argument())
                while self.peek() == ",":
                    self.take()
                    args.append(self.argument())
                self.take(")")
            return (Functor(value, len(args)), tuple(args))
        raise GrammarError(f"unexpected {value!r} at offset {pos}")

    def argument(self) -> str:
        alt = self.alternative()
        if isinstance(alt, str):
            return alt
        name = f"#{next(self.anon)}"
        self.raw[name] = [alt]
        return name


def parse_grammar(text: str) -> TypeGrammar:
    """Parse grammar notation; the first rule's left-hand side is the root.

    Rules are separated by ``;`` or newlines.  Text without ``->`` is read as
    a single anonymous type expression such as ``[] | .(num,[])``.
    """
    return _GrammarParser(text).parse()


def _inlinable(g: TypeGrammar) -> set[int]:
    out = set()
    for i, node in enumerate(g.nodes):
        if i == g.root or node.has_num or len(node.alts) != 1:
            continue
        if not any(i in g.reachable(c) for c in g.successors(i)):
            out.add(i)
    return out


def _alt_strings(
    g: TypeGrammar, ref: int, name_of: Callable[[Ref], str]
) -> list[str]:
    from .terms import format_atom

    node = g.node(ref)
    parts = []
    alts = list(node.alts)
    consts = [a for a in alts if not a[1]]
    compounds = [a for a in alts if a[1]]
    for f, _ in consts:
        parts.append(format_atom(f.name))
    if node.has_num:
        parts.append(NUM)
    for f, ch in compounds:
        parts.append(format_atom(f.name) + "(" + ",".join(name_of(c) for c in ch) + ")")
    return parts


def grammar_rules(g: TypeGrammar, allocate: Callable[[], str]) -> tuple[str, list[str]]:
    """Render ``g`` as ``(root_text, rules)``.

    ``allocate`` hands out nonterminal names in first-use order.  Acyclic
    single-production nonterminals are inlined into their use sites.
    """
    if isinstance(g.root, str):
        return g.root, []
    inline = _inlinable(g)
    names: dict[int, str] = {}
    todo: deque[int] = deque()

    def name_of(ref: Ref) -> str:
        if isinstance(ref, str):
            return ref
        if ref in inline:
            return _alt_strings(g, ref, name_of)[0]
        if ref not in names:
            names[ref] = allocate()
            todo.append(ref)
        return names[ref]

    root_name = name_of(g.root)
    rules = []
    while todo:
        ref = todo.popleft()
        rules.append(f"{names[ref]} -> " + " | ".join(_alt_strings(g, ref, name_of)))
    return root_name, rules


def format_grammar(g: TypeGrammar, root_name: str = "T", sep: str = "; ") -> str:
    counter = itertools.count(1)
    first = [True]

    def allocate() -> str:
        if first[0]:
            first[0] = False
            return root_name
        return f"{root_name}{next(counter)}"

    root, rules = grammar_rules(g, allocate)
    return sep.join(rules) if rules else root
