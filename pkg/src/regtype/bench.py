"""Timing and precision comparison of the widenings over a corpus.

Precision is compared per predicate by inclusion of the success
substitutions, so a cell reads ``=``, ``<`` (row kind more precise),
``>`` (row kind less precise) or ``<>`` (incomparable).  This is an
inclusion-based comparison, not a count of "types with a more precise
definition".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Optional

from .analyzer import AnalysisError, AnalysisResult, analyze
from .domain import asub_leq
from .grammar import format_grammar
from .parser import ParseError, read_program
from .program import PredKey, format_key
from .widenings import WideningKind

ALL_KINDS = tuple(WideningKind)

EQUAL, MORE, LESS, INCOMPARABLE = "=", "<", ">", "<>"


def compare(r1: AnalysisResult, r2: AnalysisResult, pred: PredKey) -> str:
    """Relation between the successes of ``pred`` in two results; ``<``
    when the first is strictly more precise."""
    a, b = r1.success(pred), r2.success(pred)
    le, ge = asub_leq(a, b), asub_leq(b, a)
    if le and ge:
        return EQUAL
    if le:
        return MORE
    if ge:
        return LESS
    return INCOMPARABLE


@dataclass
class BenchRow:
    program: str
    kind: WideningKind
    wall_time: float = 0.0
    iterations: int = 0
    table_size: int = 0
    types: dict[str, list[str]] = field(default_factory=dict)
    error: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "program": self.program,
            "widening": self.kind.value,
            "wall_time": self.wall_time,
            "iterations": self.iterations,
            "table_size": self.table_size,
            "success_types": self.types,
            "error": self.error,
        }


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    # (program, predicate, kind a, kind b) -> relation of a to b
    precision: dict[tuple[str, str, str, str], str] = field(default_factory=dict)
    results: dict[tuple[str, WideningKind], AnalysisResult] = field(default_factory=dict, repr=False)

    @property
    def programs(self) -> list[str]:
        return list(dict.fromkeys(r.program for r in self.rows))

    @property
    def total_time(self) -> float:
        return sum(r.wall_time for r in self.rows)

    def relation(self, program: str, pred: str, a: WideningKind, b: WideningKind) -> Optional[str]:
        return self.precision.get((program, pred, a.value, b.value))

    def never_worse(self, a: WideningKind, b: WideningKind) -> bool:
        """Whether kind ``a`` is at least as precise as ``b`` on every
        predicate where both analyses ran."""
        rels = [v for (_, _, x, y), v in self.precision.items() if x == a.value and y == b.value]
        return all(v in (EQUAL, MORE) for v in rels)

    def to_json(self) -> dict:
        return {
            "rows": [r.to_json() for r in self.rows],
            "precision": [
                {"program": p, "predicate": pred, "a": a, "b": b, "relation": rel}
                for (p, pred, a, b), rel in sorted(self.precision.items())
            ],
        }


def bench_program(
    path: Path, kinds: Iterable[WideningKind], report: BenchReport, **options
) -> None:
    name = path.name
    try:
        program = read_program(path).program
    except ParseError as exc:
        for kind in kinds:
            report.rows.append(BenchRow(name, kind, error=f"parse error: {exc}"))
        return
    done: dict[WideningKind, AnalysisResult] = {}
    for kind in kinds:
        row = BenchRow(name, kind)
        try:
            result = analyze(program, kind=kind, **options)
        except AnalysisError as exc:
            row.error = str(exc)
        else:
            done[kind] = result
            report.results[(name, kind)] = result
            row.wall_time = result.stats.wall_time
            row.iterations = result.stats.iterations
            row.table_size = result.stats.table_size
            row.types = {
                format_key(k): [format_grammar(t) for t in p.success_types] if p.succeeds else ["$bot"]
                for k, p in result.predicates.items()
            }
        report.rows.append(row)
    for a, b in combinations(done, 2):
        for pred in sorted(program.predicates):
            rel = compare(done[a], done[b], pred)
            report.precision[(name, format_key(pred), a.value, b.value)] = rel
            report.precision[(name, format_key(pred), b.value, a.value)] = _flip(rel)


def _flip(rel: str) -> str:
    return {MORE: LESS, LESS: MORE}.get(rel, rel)


def corpus_files(directory: str | Path) -> list[Path]:
    return sorted(Path(directory).glob("*.pl"))


def bench(
    directory: str | Path, kinds: Iterable[WideningKind] = ALL_KINDS, **options
) -> BenchReport:
    """Analyze every ``*.pl`` file of ``directory`` with every kind."""
    kinds = list(kinds)
    report = BenchReport()
    for path in corpus_files(directory):
        bench_program(path, kinds, report, **options)
    return report


def _table(header: list[str], body: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    fmt = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()  # noqa: E731
    return [fmt(header), fmt(["-" * w for w in widths]), *(fmt(r) for r in body)]


def format_report(report: BenchReport, baseline: WideningKind = WideningKind.STRUCT) -> str:
    kinds = list(dict.fromkeys(r.kind for r in report.rows))
    cells = {(r.program, r.kind): r for r in report.rows}
    lines = ["Timing (ms, iterations)"]
    body = []
    for prog in report.programs:
        row = [prog]
        for k in kinds:
            r = cells.get((prog, k))
            row.append("error" if r is None or r.error else f"{r.wall_time * 1000:.1f} ({r.iterations})")
        body.append(row)
    lines += _table(["program", *(k.value for k in kinds)], body)
    others = [k for k in kinds if k is not baseline]
    if baseline in kinds and others:
        lines += ["", f"Precision of {baseline.value} against each kind (predicates: more/equal/less/incomparable)"]
        body = []
        for prog in report.programs:
            row = [prog]
            for k in others:
                rels = [
                    v for (p, _, a, b), v in report.precision.items()
                    if p == prog and a == baseline.value and b == k.value
                ]
                counts = [rels.count(x) for x in (MORE, EQUAL, LESS, INCOMPARABLE)]
                row.append("/".join(map(str, counts)) if rels else "-")
            body.append(row)
        lines += _table(["program", *(k.value for k in others)], body)
    errors = [r for r in report.rows if r.error]
    if errors:
        lines += ["", "Failures"]
        lines += [f"{r.program} [{r.kind.value}]: {r.error}" for r in errors]
    return "\n".join(lines) + "\n"


def report_json(report: BenchReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
