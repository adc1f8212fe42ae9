"""Regular type inference for pure logic programs.

Types are deterministic regular term grammars.  The analyzer computes, for
every predicate, the types of its arguments on call and on success, and
uses one of seven widening operators to reach a fixpoint.
"""

from .analyzer import AnalysisConfig, AnalysisError, AnalysisResult, Analyzer, analyze
from .domain import BOTTOM, AbstractSub, amgu, asub_leq, asub_lub, solve
from .grammar import (
    ANY,
    ANY_TYPE,
    BOTTOM_TYPE,
    NUM,
    NUM_TYPE,
    GrammarError,
    TypeGrammar,
    enumerate_terms,
    format_grammar,
    member,
    normalize,
    parse_grammar,
)
from .lattice import equiv, includes, intersect, simplify_types, union
from .output import format_result, result_to_json
from .parser import ParseError, parse_program, read_program
from .program import Clause, Program
from .structural import TypeDescriptor, TypeName, guard_widen, widen_structural
from .widenings import WideningKind, widen

__all__ = [
    "ANY",
    "ANY_TYPE",
    "BOTTOM",
    "BOTTOM_TYPE",
    "NUM",
    "NUM_TYPE",
    "AbstractSub",
    "AnalysisConfig",
    "AnalysisError",
    "AnalysisResult",
    "Analyzer",
    "Clause",
    "GrammarError",
    "ParseError",
    "Program",
    "TypeDescriptor",
    "TypeGrammar",
    "TypeName",
    "WideningKind",
    "amgu",
    "analyze",
    "asub_leq",
    "asub_lub",
    "enumerate_terms",
    "equiv",
    "format_grammar",
    "format_result",
    "guard_widen",
    "includes",
    "intersect",
    "member",
    "normalize",
    "parse_grammar",
    "parse_program",
    "read_program",
    "result_to_json",
    "simplify_types",
    "solve",
    "union",
    "widen",
    "widen_structural",
]
