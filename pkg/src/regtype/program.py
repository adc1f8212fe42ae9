"""Programs of the analyzed logic language."""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import Struct, Term, Var, format_term, term_vars

PredKey = tuple[str, int]

# builtins the analyzer knows how to abstract
BUILTINS: frozenset[PredKey] = frozenset({("number", 1), ("=<", 2), ("=", 2), ("true", 0)})


def pred_key(t: Struct) -> PredKey:
    return (t.name, len(t.args))


def format_key(key: PredKey) -> str:
    return f"{key[0]}/{key[1]}"


def parse_key(text: str) -> PredKey:
    name, sep, arity = text.rpartition("/")
    if not sep or not arity.isdigit():
        raise ValueError(f"expected name/arity, got {text!r}")
    return (name, int(arity))


@dataclass(frozen=True)
class Clause:
    head: Struct
    body: tuple[Struct, ...] = ()

    def variables(self) -> list[Var]:
        seen: dict[Var, None] = {}
        for t in (self.head, *self.body):
            for v in term_vars(t):
                seen.setdefault(v)
        return list(seen)

    def __str__(self) -> str:
        if not self.body:
            return format_term(self.head) + "."
        return format_term(self.head) + " :- " + ", ".join(format_literal(b) for b in self.body) + "."


_INFIX = {"=", "=<", "<", ">", ">=", "==", "\\=", "is", "=:=", "=\\=", "+", "-", "*", "/"}


def format_literal(t: Term) -> str:
    if isinstance(t, Struct) and len(t.args) == 2 and t.name in _INFIX:
        return f"{format_term(t.args[0])} {t.name} {format_term(t.args[1])}"
    return format_term(t)


@dataclass
class Program:
    predicates: dict[PredKey, list[Clause]] = field(default_factory=dict)

    def add(self, clause: Clause) -> None:
        self.predicates.setdefault(pred_key(clause.head), []).append(clause)

    def clauses(self, key: PredKey) -> list[Clause]:
        return self.predicates.get(key, [])

    def is_builtin(self, lit: Struct) -> bool:
        key = pred_key(lit)
        return key not in self.predicates and key in BUILTINS

    def called(self) -> set[PredKey]:
        out = set()
        for key, clauses in self.predicates.items():
            for clause in clauses:
                for lit in clause.body:
                    k = pred_key(lit)
                    if k != key:
                        out.add(k)
        return out

    def default_entries(self) -> list[PredKey]:
        """Predicates no other predicate calls; all of them if none qualify."""
        called = self.called()
        roots = [k for k in self.predicates if k not in called]
        return roots or list(self.predicates)

    def __len__(self) -> int:
        return sum(len(c) for c in self.predicates.values())

    def __str__(self) -> str:
        return "\n".join(str(c) for cs in self.predicates.values() for c in cs)
