"""Goal-dependent top-down fixpoint over call and success types.

The table maps a predicate together with a call pattern (one type per
argument) to the success types of that pattern.  Entries are evaluated
from a worklist: every clause is run on the call pattern, the clause
successes are joined, widened against the previous success and, if that
grew, every entry that looked the success up is evaluated again.
Recursive lookups of entries still being computed see BOTTOM.

With the structural widening every abstract value is a type descriptor
and the analysis additionally widens, after each body call, the type of
every variable of the call against its type at the same program site in
the previous iteration.  This is where recursion gets introduced.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional, Sequence, Union

from .domain import (
    BOTTOM,
    AbstractSub,
    Entry,
    amgu,
    asub_leq,
    asub_lub,
    entry_type,
    term_labels,
    term_to_type,
    unify_terms,
)
from .grammar import ANY_TYPE, BOTTOM_TYPE, NUM_TYPE, TypeGrammar
from .lattice import union
from .program import BUILTINS, Clause, PredKey, Program, format_key, format_literal, pred_key
from .structural import (
    DEFAULT_WIDEN_BOUND,
    LABEL_DEPTH,
    NameRegistry,
    TypeDescriptor,
    guard_widen,
    rename,
)
from .terms import Number, Struct, Term, Var, term_vars
from .widenings import WideningKind, widen

log = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 20000

# evaluable functors allowed inside arithmetic comparisons
_ARITH = {("+", 2), ("-", 2), ("*", 2), ("/", 2), ("//", 2), ("mod", 2), ("-", 1)}

_SCRATCH = Var("$s")


class AnalysisError(Exception):
    pass


def formal(i: int) -> Var:
    return Var(f"$A{i + 1}")


def formals(arity: int) -> tuple[Var, ...]:
    return tuple(formal(i) for i in range(arity))


@dataclass
class AnalysisConfig:
    kind: WideningKind = WideningKind.STRUCT
    depth_k: int = 2
    widen_bound: int = DEFAULT_WIDEN_BOUND
    permissive: bool = False
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    label_depth: int = LABEL_DEPTH

    @property
    def structural(self) -> bool:
        return self.kind is WideningKind.STRUCT


@dataclass
class TableEntry:
    id: int
    pred: PredKey
    call: AbstractSub
    success: AbstractSub = BOTTOM
    dependents: set[int] = field(default_factory=set)
    updates: int = 0

    @property
    def key(self) -> tuple:
        return (self.pred, self.call.types())


@dataclass
class AnalysisStats:
    iterations: int = 0
    table_size: int = 0
    wall_time: float = 0.0


@dataclass
class PredicateTypes:
    pred: PredKey
    call_types: tuple[TypeGrammar, ...]
    success_types: tuple[TypeGrammar, ...]
    # False when no call pattern ever succeeds; arity 0 needs it spelled out
    succeeds: bool = True
    called: bool = True

    @property
    def call(self) -> AbstractSub:
        return _sub_of(self.call_types) if self.called else BOTTOM

    @property
    def success(self) -> AbstractSub:
        return _sub_of(self.success_types) if self.succeeds else BOTTOM


def _sub_of(types: Sequence[TypeGrammar]) -> AbstractSub:
    return AbstractSub(zip(formals(len(types)), types))


@dataclass
class AnalysisResult:
    kind: WideningKind
    entries: list[PredKey]
    predicates: dict[PredKey, PredicateTypes]
    table: list[TableEntry]
    stats: AnalysisStats
    warnings: list[str] = field(default_factory=list)

    def success(self, pred: PredKey) -> AbstractSub:
        return self.predicates[pred].success

    def call(self, pred: PredKey) -> AbstractSub:
        return self.predicates[pred].call

    def success_type(self, pred: PredKey, i: int = 0) -> TypeGrammar:
        return self.predicates[pred].success_types[i]

    def call_type(self, pred: PredKey, i: int = 0) -> TypeGrammar:
        return self.predicates[pred].call_types[i]


class Analyzer:
    def __init__(self, program: Program, config: AnalysisConfig | None = None):
        self.program = program
        self.config = config or AnalysisConfig()
        self.registry = NameRegistry()
        self.table: list[TableEntry] = []
        self.index: dict[tuple, int] = {}
        self.worklist: deque[int] = deque()
        self.queued: set[int] = set()
        self.last_call: dict[PredKey, tuple] = {}
        self.call_updates: dict[PredKey, int] = {}
        self.warnings: list[str] = []
        self.stats = AnalysisStats()

    # values ---------------------------------------------------------------

    def value(self, ty: TypeGrammar, site: Hashable, labels: Iterable = ()) -> Entry:
        """An abstract value of the configured domain."""
        if not self.config.structural:
            return ty
        return TypeDescriptor(self.registry.name_for(site), frozenset(labels), ty)

    def _named(self, e: Entry, site: Hashable) -> Entry:
        if isinstance(e, TypeDescriptor):
            return rename(e, self.registry.name_for(site))
        return e

    # table ----------------------------------------------------------------

    def schedule(self, eid: int) -> None:
        if eid not in self.queued:
            self.queued.add(eid)
            self.worklist.append(eid)

    def add_entry(self, pred: PredKey, call_values: Sequence[Entry]) -> TableEntry:
        eid = len(self.table)
        call = AbstractSub(
            (formal(i), self._named(v, ("call", eid, i))) for i, v in enumerate(call_values)
        )
        entry = TableEntry(eid, pred, call)
        self.table.append(entry)
        self.index[entry.key] = eid
        self.last_call[pred] = tuple(call_values)
        self.schedule(eid)
        return entry

    def entry_for_call(self, pred: PredKey, args: Sequence[Term], a: AbstractSub) -> TableEntry:
        """The table entry serving a call to ``pred`` with ``args`` under ``a``,
        created after call widening when no exact match exists."""
        types = tuple(term_to_type(t, a) for t in args)
        found = self.index.get((pred, types))
        if found is not None:
            return self.table[found]
        previous = self.last_call.get(pred)
        if self.config.structural:
            cands = [
                self.value(ty, ("slot", pred, i), term_labels(t, a, self.config.label_depth))
                for i, (t, ty) in enumerate(zip(args, types))
            ]
            widened = [
                guard_widen(None if previous is None else previous[i], c, self.config.widen_bound)
                for i, c in enumerate(cands)
            ]
        else:
            kind = self._kind(self.call_updates.get(pred, 0))
            widened = [
                widen(kind, None if previous is None else previous[i], ty, self.config.depth_k)
                for i, ty in enumerate(types)
            ]
        self.call_updates[pred] = self.call_updates.get(pred, 0) + 1
        key = (pred, tuple(entry_type(w) for w in widened))
        found = self.index.get(key)
        if found is not None:
            self.last_call[pred] = tuple(widened)
            return self.table[found]
        return self.add_entry(pred, widened)

    def _kind(self, updates: int) -> WideningKind:
        """Restricted shortening and clash widening alone need not
        terminate; past the bound they give way to plain shortening."""
        guarded = (WideningKind.RSHORTEN, WideningKind.CLASH)
        if self.config.kind in guarded and updates >= self.config.widen_bound:
            return WideningKind.SHORTEN
        return self.config.kind

    # fixpoint -------------------------------------------------------------

    def evaluate(self, entry: TableEntry) -> None:
        arity = entry.pred[1]
        cand = BOTTOM
        for ci, clause in enumerate(self.program.clauses(entry.pred)):
            out = self.run_clause(clause, entry.call, entry.id, ci)
            if out.is_bottom:
                continue
            out = AbstractSub(
                (v, self._named(out[v], ("succ", entry.id, i))) for i, v in enumerate(formals(arity))
            )
            cand = asub_lub(cand, out)
        if cand.is_bottom:
            return
        old = entry.success
        if self.config.structural:
            new = AbstractSub(
                (v, guard_widen(None if old.is_bottom else old[v], e, self.config.widen_bound))  # type: ignore[arg-type]
                for v, e in cand.items()
            )
        else:
            kind = self._kind(entry.updates)
            new = AbstractSub(
                (v, widen(kind, None if old.is_bottom else old[v], e, self.config.depth_k))  # type: ignore[arg-type]
                for v, e in cand.items()
            )
        if asub_leq(new, old):
            return
        if not old.is_bottom:
            # keep the table monotone even if a widening drops information
            new = asub_lub(old, new)
        entry.success = new
        entry.updates += 1
        for d in sorted(entry.dependents):
            self.schedule(d)

    def run(self, entries: Iterable[tuple[PredKey, Optional[Sequence[TypeGrammar]]]]) -> None:
        start = time.perf_counter()
        for pred, types in entries:
            if pred not in self.program.predicates:
                raise AnalysisError(f"entry predicate {format_key(pred)} is not defined")
            types = types or [ANY_TYPE] * pred[1]
            key = (pred, tuple(types))
            if key not in self.index:
                self.add_entry(pred, [self.value(t, ("slot", pred, i)) for i, t in enumerate(types)])
        while self.worklist:
            eid = self.worklist.popleft()
            self.queued.discard(eid)
            self.stats.iterations += 1
            if self.stats.iterations > self.config.max_iterations:
                raise AnalysisError(
                    f"no fixpoint after {self.config.max_iterations} iterations"
                )
            self.evaluate(self.table[eid])
        self.stats.table_size = len(self.table)
        self.stats.wall_time = time.perf_counter() - start

    # clauses --------------------------------------------------------------

    def run_clause(
        self, clause: Clause, call: AbstractSub, entry_id: int = 0, clause_index: int = 0
    ) -> AbstractSub:
        """Success substitution over the head formals of ``clause`` for the
        call substitution ``call`` (over the same formals)."""
        if call.is_bottom:
            return BOTTOM
        head_formals = formals(len(clause.head.args))
        a = AbstractSub(
            [(v, call[v]) for v in head_formals]
            + [
                (v, self.value(ANY_TYPE, ("var", entry_id, clause_index, v.name)))
                for v in clause.variables()
            ]
        )
        depth = self.config.label_depth
        for x, t in zip(head_formals, clause.head.args):
            a = amgu(a, x, t, depth)
        for li, lit in enumerate(clause.body):
            if a.is_bottom:
                return BOTTOM
            a = self.literal(a, lit, (entry_id, clause_index, li))
        if a.is_bottom:
            return BOTTOM
        for x, t in zip(head_formals, clause.head.args):
            a = amgu(a, x, t, depth)
        return a.project(head_formals)

    def literal(self, a: AbstractSub, lit: Struct, site: tuple) -> AbstractSub:
        key = pred_key(lit)
        if key in self.program.predicates:
            return self.call(a, lit, site)
        if key in BUILTINS:
            return self.builtin_transfer(key, a, lit.args)
        message = f"unknown predicate {format_key(key)} in literal {format_literal(lit)}"
        if not self.config.permissive:
            raise AnalysisError(message)
        if message not in self.warnings:
            self.warnings.append(message)
            log.warning("%s; treated as true", message)
        return a

    def call(self, a: AbstractSub, lit: Struct, site: tuple) -> AbstractSub:
        caller = self.table[site[0]]
        callee = self.entry_for_call(pred_key(lit), lit.args, a)
        callee.dependents.add(caller.id)
        if callee.success.is_bottom:
            return BOTTOM
        depth = self.config.label_depth
        for i, t in enumerate(lit.args):
            a = a.update({_SCRATCH: callee.success[formal(i)]})
            a = amgu(a, _SCRATCH, t, depth).without([_SCRATCH])
            if a.is_bottom:
                return BOTTOM
        if not self.config.structural:
            return a
        # widen each variable against the same site of the last iteration
        changes = {}
        for ai, t in enumerate(lit.args):
            for v in dict.fromkeys(term_vars(t)):
                name = self.registry.name_for((*site, ai, v.name))
                d = rename(changes.get(v, a[v]), name)  # type: ignore[arg-type]
                w = guard_widen(self.registry.latest.get(name), d, self.config.widen_bound)
                self.registry.latest[name] = w
                changes[v] = w
        return a.update(changes)

    def builtin_transfer(self, key: PredKey, a: AbstractSub, args: Sequence[Term]) -> AbstractSub:
        """Abstract effect of a builtin goal on ``a``."""
        name, arity = key
        if key == ("true", 0):
            return a
        if key == ("=", 2):
            return unify_terms(a, args[0], args[1], self.config.label_depth)
        if key == ("number", 1):
            return self._numeric(a, args[0])
        if key == ("=<", 2):
            for t in args:
                a = self._arith(a, t)
            return a
        raise AnalysisError(f"no transfer function for builtin {name}/{arity}")

    def _numeric(self, a: AbstractSub, t: Term) -> AbstractSub:
        if a.is_bottom:
            return a
        a = a.update({_SCRATCH: self.value(NUM_TYPE, ("num",))})
        return amgu(a, _SCRATCH, t, self.config.label_depth).without([_SCRATCH])

    def _arith(self, a: AbstractSub, t: Term) -> AbstractSub:
        """Variables of an evaluated expression must be numbers for the
        comparison to succeed."""
        if isinstance(t, (Var, Number)):
            return self._numeric(a, t)
        if (t.name, len(t.args)) not in _ARITH:
            return BOTTOM
        for u in t.args:
            a = self._arith(a, u)
        return a

    # results --------------------------------------------------------------

    def result(self, entries: list[PredKey]) -> AnalysisResult:
        preds: dict[PredKey, PredicateTypes] = {}
        for pred in sorted(self.program.predicates):
            arity = pred[1]
            calls = [BOTTOM_TYPE] * arity
            succs = [BOTTOM_TYPE] * arity
            succeeds = called = False
            for e in self.table:
                if e.pred != pred:
                    continue
                called = True
                calls = [union(c, t) for c, t in zip(calls, e.call.types())]
                if not e.success.is_bottom:
                    succeeds = True
                    succs = [union(s, t) for s, t in zip(succs, e.success.types())]
            preds[pred] = PredicateTypes(pred, tuple(calls), tuple(succs), succeeds, called)
        return AnalysisResult(
            self.config.kind, entries, preds, self.table, self.stats, list(self.warnings)
        )


EntrySpec = Union[PredKey, tuple[PredKey, Sequence[TypeGrammar]]]


def analyze(
    program: Program,
    entry: EntrySpec | Sequence[EntrySpec] | None = None,
    kind: WideningKind | str = WideningKind.STRUCT,
    bound: int = DEFAULT_WIDEN_BOUND,
    *,
    depth_k: int = 2,
    permissive: bool = False,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> AnalysisResult:
    """Analyze ``program`` from ``entry`` (a predicate key, optionally with
    call types, or a list of those); by default from every predicate no
    other predicate calls, with all arguments of type any."""
    if isinstance(kind, str):
        kind = WideningKind.parse(kind)
    config = AnalysisConfig(kind, depth_k, bound, permissive, max_iterations)
    specs: list[tuple[PredKey, Optional[Sequence[TypeGrammar]]]] = []
    if entry is None:
        specs = [(k, None) for k in program.default_entries()]
    elif _is_key(entry):
        specs = [(entry, None)]  # type: ignore[list-item]
    elif isinstance(entry, tuple) and len(entry) == 2 and _is_key(entry[0]):
        specs = [entry]  # type: ignore[list-item]
    else:
        for e in entry:  # type: ignore[union-attr]
            specs.append((e, None) if _is_key(e) else e)  # type: ignore[arg-type]
    analyzer = Analyzer(program, config)
    analyzer.run(specs)
    return analyzer.result([p for p, _ in specs])


def _is_key(x: object) -> bool:
    return isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], str) and isinstance(x[1], int)

