"""Rendering of analysis results as grammar text or JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .analyzer import AnalysisResult, PredicateTypes
from .grammar import BOT, TypeGrammar, grammar_rules, parse_grammar
from .lattice import simplify_types
from .program import format_key
from .terms import format_atom


@dataclass
class TypeTable:
    """Named types of one rendering, in first-use order.

    ``rules`` maps every nonterminal name to its alternatives; ``roots``
    maps each root name to the grammar it stands for and ``aliases`` sends
    names identified by simplification to their representative.
    """

    rules: dict[str, list[str]] = field(default_factory=dict)
    roots: dict[str, TypeGrammar] = field(default_factory=dict)
    aliases: dict[str, str] = field(default_factory=dict)
    owner: dict[str, str] = field(default_factory=dict)
    _count: int = 0

    def allocate(self) -> str:
        self._count += 1
        return f"T{self._count}"

    def add(self, g: TypeGrammar) -> str:
        """Name of ``g`` in the table; any, num and $bot stay inline."""
        if isinstance(g.root, str):
            return g.root
        name = self.allocate()
        first = [True]

        def allocate() -> str:
            if first[0]:
                first[0] = False
                return name
            return self.allocate()

        _, rules = grammar_rules(g, allocate)
        for rule in rules:
            lhs, rhs = rule.split(" -> ", 1)
            self.rules[lhs] = rhs.split(" | ")
            self.owner[lhs] = name
        self.roots[name] = g
        return name

    def text(self, name: str) -> str:
        """Grammar notation for the type named ``name``, rooted there."""
        if name in self.aliases:
            return self.text(self.aliases[name])
        if name not in self.rules:
            return name
        order, todo = [], [name]
        while todo:
            n = todo.pop(0)
            if n in order:
                continue
            order.append(n)
            for alt in self.rules[n]:
                todo.extend(r for r in _mentions(alt) if r in self.rules and r not in order)
        return "; ".join(f"{n} -> {' | '.join(self.rules[n])}" for n in order)

    def grammar(self, name: str) -> TypeGrammar:
        return parse_grammar(self.text(name))


def _mentions(alt: str) -> list[str]:
    out, cur = [], ""
    for ch in alt + ",":
        if ch.isalnum() or ch == "_":
            cur += ch
        else:
            if cur[:1] == "T" and cur[1:].isdigit():
                out.append(cur)
            cur = ""
    return out


@dataclass
class RenderedPredicate:
    pred: PredicateTypes
    call: Optional[list[str]]
    success: Optional[list[str]]


def render(result: AnalysisResult, simplify: bool = False) -> tuple[list[RenderedPredicate], TypeTable]:
    """Name every call and success type of ``result``.

    Without simplification each type gets its own name; with it,
    equivalent types share one definition and the other names become
    aliases of it.
    """
    table = TypeTable()
    rendered = []
    for key in sorted(result.predicates):
        pt = result.predicates[key]
        call = [table.add(t) for t in pt.call_types] if pt.called else None
        success = [table.add(t) for t in pt.success_types] if pt.succeeds else None
        rendered.append(RenderedPredicate(pt, call, success))
    if simplify and table.roots:
        # zero-padded keys make the smallest name also the first used one
        padded = {f"{int(n[1:]):09d}": g for n, g in table.roots.items()}
        _, renaming = simplify_types(padded)
        for key, rep in sorted(renaming.items()):
            if key != rep:
                table.aliases[f"T{int(key)}"] = f"T{int(rep)}"
    return rendered, table


def _atom_text(name: str, args: Optional[list[str]]) -> str:
    if args is None:
        return BOT
    if not args:
        return format_atom(name)
    return f"{format_atom(name)}({', '.join(args)})"


def _defined(table: TypeTable) -> list[str]:
    """Nonterminals still defined after dropping aliased roots."""
    return [n for n in table.rules if table.owner[n] not in table.aliases]


def format_result(result: AnalysisResult, simplify: bool = False) -> str:
    rendered, table = render(result, simplify)
    lines = [f"% widening: {result.kind.value}"]
    lines.append("% entry: " + ", ".join(format_key(k) for k in result.entries))
    for r in rendered:
        name = r.pred.pred[0]
        lines.append(f"{format_key(r.pred.pred)}:")
        lines.append(f"  call:    {_atom_text(name, r.call)}")
        lines.append(f"  success: {_atom_text(name, r.success)}")
    if table.rules:
        lines.append("")
    for name in _defined(table):
        lines.append(f"{name} -> {' | '.join(table.rules[name])}")
    for name, rep in table.aliases.items():
        lines.append(f"{name} = {rep}")
    return "\n".join(lines) + "\n"


def result_to_json(result: AnalysisResult, program: str = "", simplify: bool = False) -> dict:
    rendered, table = render(result, simplify)
    types = [{"name": n, "productions": table.rules[n]} for n in _defined(table)]
    types += [{"name": n, "productions": [rep]} for n, rep in table.aliases.items()]
    return {
        "program": program,
        "widening": result.kind.value,
        "entry": [format_key(k) for k in result.entries],
        "predicates": [
            {
                "name": r.pred.pred[0],
                "arity": r.pred.pred[1],
                "call_types": r.call,
                "success_types": r.success,
            }
            for r in rendered
        ],
        "types": types,
        "stats": {
            "iterations": result.stats.iterations,
            "table_size": result.stats.table_size,
        },
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
