"""Independent oracles for the test suite.

Random deterministic grammars, a depth-bounded concrete resolution
interpreter and ground term samplers.  Nothing here reuses the
package's lattice or domain code.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterator, Optional

from regtype.grammar import normalize
from regtype.program import Clause, Program, pred_key
from regtype.terms import Functor, Number, Struct, Term, Var

ALPHABET = (Functor("a", 0), Functor("b", 0), Functor("f", 1), Functor("g", 2), Functor("h", 2))


def random_raw(rng: random.Random, max_nodes: int = 4) -> dict:
    """Random productions over ALPHABET (plus num) rooted at ``N0``; each
    functor appears at most once per nonterminal and there are no chains."""
    n = rng.randint(1, max_nodes)
    names = [f"N{i}" for i in range(n)]
    targets = names + ["any", "num"]
    weights = [4] * n + [1, 1]
    raw = {}
    for name in names:
        alts: list = []
        if rng.random() < 0.2:
            alts.append("num")
        for f in ALPHABET:
            if rng.random() < 0.45:
                alts.append((f, [rng.choices(targets, weights)[0] for _ in range(f.arity)]))
        if not alts:
            alts.append((Functor("a", 0), []))
        raw[name] = alts
    return raw


def random_grammar(rng: random.Random, max_nodes: int = 4):
    raw = random_raw(rng, max_nodes)
    return raw, normalize(raw, "N0")


def raw_member(t: Term, raw: dict, name: str = "N0") -> bool:
    if name == "any":
        return True
    if name == "num":
        return isinstance(t, Number)
    for alt in raw[name]:
        if alt == "num":
            if isinstance(t, Number):
                return True
        elif isinstance(t, Struct) and t.functor == alt[0]:
            if all(raw_member(u, raw, c) for u, c in zip(t.args, alt[1])):
                return True
    return False


def _productive(raw: dict) -> set[str]:
    good = {"any", "num"}
    changed = True
    while changed:
        changed = False
        for name, alts in raw.items():
            if name not in good and any(a == "num" or all(c in good for c in a[1]) for a in alts):
                good.add(name)
                changed = True
    return good


def raw_includes(raw1: dict, raw2: dict, n1: str = "N0", n2: str = "N0") -> bool:
    """Inclusion of raw deterministic productions by greatest fixpoint
    over nonterminal pairs; ``any`` is only included in ``any``."""
    good1, good2 = _productive(raw1), _productive(raw2)
    if n1 not in good1:
        return True

    def alts(raw, good, name):
        if name == "num":
            return {"num": ()}
        out = {}
        for a in raw[name]:
            if a == "num":
                out["num"] = ()
            elif all(c in good for c in a[1]):
                out[a[0]] = tuple(a[1])
        return out

    assumed: set = set()

    def incl(a: str, b: str) -> bool:
        if b == "any":
            return True
        if a == "any" or b not in good2:
            return False
        if (a, b) in assumed:
            return True
        assumed.add((a, b))
        lhs, rhs = alts(raw1, good1, a), alts(raw2, good2, b)
        for f, children in lhs.items():
            if f not in rhs:
                return False
            if not all(incl(c, d) for c, d in zip(children, rhs[f])):
                return False
        return True

    return incl(n1, n2)


def ground_terms(depth: int) -> list[Term]:
    """Every ground term over ALPHABET plus the number 0 up to ``depth``."""
    levels: list[list[Term]] = []
    for d in range(1, depth + 1):
        out: list[Term] = [Number(0)]
        for f in ALPHABET:
            if f.arity == 0:
                out.append(Struct(f.name))
            elif d > 1:
                for args in itertools.product(levels[-1], repeat=f.arity):
                    out.append(Struct(f.name, args))
        levels.append(out)
    return levels[-1]


# ---------------------------------------------------------------- resolution


class Subst(dict):
    def walk(self, t: Term) -> Term:
        while isinstance(t, Var) and t in self:
            t = self[t]
        return t

    def resolve(self, t: Term) -> Term:
        t = self.walk(t)
        if isinstance(t, Struct) and t.args:
            return Struct(t.name, tuple(self.resolve(a) for a in t.args))
        return t


def _occurs(v: Var, t: Term, s: Subst) -> bool:
    t = s.walk(t)
    if t == v:
        return True
    return isinstance(t, Struct) and any(_occurs(v, a, s) for a in t.args)


def unify(t1: Term, t2: Term, s: Subst) -> Optional[Subst]:
    s = Subst(s)
    stack = [(t1, t2)]
    while stack:
        u, w = stack.pop()
        u, w = s.walk(u), s.walk(w)
        if u == w:
            continue
        if isinstance(u, Var):
            if _occurs(u, w, s):
                return None
            s[u] = w
        elif isinstance(w, Var):
            if _occurs(w, u, s):
                return None
            s[w] = u
        elif isinstance(u, Struct) and isinstance(w, Struct):
            if u.functor != w.functor:
                return None
            stack.extend(zip(u.args, w.args))
        else:
            return None
    return s


class Interpreter:
    """Depth-bounded SLD resolution with the four supported builtins.

    ``successes`` collects every solved user goal, fully instantiated by
    the answer that solved it.
    """

    def __init__(self, program: Program, depth: int = 6, max_answers: int = 50):
        self.program = program
        self.depth = depth
        self.max_answers = max_answers
        self.successes: set[Term] = set()
        self._fresh = itertools.count()

    def rename(self, clause: Clause) -> Clause:
        n = next(self._fresh)
        mapping: dict = {}

        def ren(t: Term) -> Term:
            if isinstance(t, Var):
                return mapping.setdefault(t, Var(f"{t.name}#{n}"))
            if isinstance(t, Struct) and t.args:
                return Struct(t.name, tuple(ren(a) for a in t.args))
            return t

        return Clause(ren(clause.head), tuple(ren(b) for b in clause.body))  # type: ignore[arg-type]

    def solve(self, goal: Struct, s: Subst, depth: int) -> Iterator[Subst]:
        key = pred_key(goal)
        if key == ("true", 0):
            yield s
        elif key == ("=", 2):
            r = unify(goal.args[0], goal.args[1], s)
            if r is not None:
                yield r
        elif key == ("number", 1):
            if isinstance(s.walk(goal.args[0]), Number):
                yield s
        elif key == ("=<", 2):
            x, y = (s.resolve(a) for a in goal.args)
            if isinstance(x, Number) and isinstance(y, Number) and x.value <= y.value:
                yield s
        elif depth > 0:
            count = 0
            for clause in self.program.clauses(key):
                c = self.rename(clause)
                r = unify(goal, c.head, s)
                if r is None:
                    continue
                for answer in self.body(list(c.body), r, depth - 1):
                    self.successes.add(answer.resolve(goal))
                    yield answer
                    count += 1
                    if count >= self.max_answers:
                        return

    def body(self, goals: list[Struct], s: Subst, depth: int) -> Iterator[Subst]:
        if not goals:
            yield s
            return
        for r in self.solve(goals[0], s, depth):
            yield from self.body(goals[1:], r, depth)

    def run(self, goal: Struct) -> list[Term]:
        return [a.resolve(goal) for a in self.solve(goal, Subst(), self.depth)]


SAMPLE_ARGS: tuple[Term, ...] = (
    Number(0),
    Number(1),
    Number(2),
    Struct("a"),
    Struct("[]"),
    Struct("nil"),
    Struct(".", (Number(1), Struct("[]"))),
    Struct(".", (Number(2), Struct(".", (Number(1), Struct("[]"))))),
    Struct(".", (Number(1), Struct(".", (Number(2), Struct("[]"))))),
    Struct(".", (Struct(".", (Number(0), Struct("[]"))), Struct("[]"))),
    Struct("node", (Struct("nil"), Number(1), Struct("nil"))),
    Struct("plus", (Number(0), Number(1))),
    Struct("neg", (Struct("neg", (Number(3),)),)),
    Struct("s", (Struct("0"),)),
)


def sample_goals(key, rng: random.Random, count: int) -> list[Struct]:
    """The most general goal for ``key`` plus ``count`` partly ground ones."""
    name, arity = key
    goals = [Struct(name, tuple(Var(f"Q{i}") for i in range(arity)))]
    for _ in range(count if arity else 0):
        args = tuple(
            Var(f"Q{i}") if rng.random() < 0.4 else rng.choice(SAMPLE_ARGS) for i in range(arity)
        )
        goals.append(Struct(name, args))
    return goals


def groundings(t: Term) -> list[Term]:
    """Two ground instances of ``t``: variables bound to ``a`` and to 0."""

    def ground(u: Term, filler: Term) -> Term:
        if isinstance(u, Var):
            return filler
        if isinstance(u, Struct) and u.args:
            return Struct(u.name, tuple(ground(a, filler) for a in u.args))
        return u

    return [ground(t, Struct("a")), ground(t, Number(0))]
