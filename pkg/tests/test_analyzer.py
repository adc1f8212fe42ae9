import pytest

from regtype.analyzer import AnalysisConfig, AnalysisError, Analyzer, analyze, formals
from regtype.domain import AbstractSub, asub_leq
from regtype.grammar import ANY_TYPE, NUM_TYPE, format_grammar, parse_grammar
from regtype.lattice import includes
from regtype.parser import parse_program
from regtype.terms import Struct, Var
from regtype.widenings import WideningKind

G = parse_grammar
T_LL = G("T -> [] | .(T1,T); T1 -> [] | .(num,T1)")
A1, A2 = formals(2)


def test_list_of_lists_struct(corpus_program):
    r = analyze(corpus_program("list_of_lists.pl"), ("list_of_lists", 1), WideningKind.STRUCT, 4)
    assert r.success_type(("list_of_lists", 1)) == T_LL
    assert r.success_type(("num_list", 1)) == G("T -> [] | .(num,T)")


def test_list_of_lists_functor(corpus_program):
    r = analyze(corpus_program("list_of_lists.pl"), kind=WideningKind.FUNCTOR)
    assert r.success_type(("list_of_lists", 1)) == G("T -> [] | num | .(T,T)")


def test_sorted_struct_vs_shorten(corpus_program):
    program = corpus_program("sorted.pl")
    t3 = analyze(program, ("sorted", 1), "struct").success_type(("sorted", 1))
    t6 = analyze(program, ("sorted", 1), "shorten").success_type(("sorted", 1))
    assert t3 == G("T3 -> [] | .(any,T1); T1 -> [] | .(num,T1)")
    assert t6 == G("T6 -> [] | .(any,T6)")
    assert includes(t3, t6) and not includes(t6, t3)


def test_sorted_bound_does_not_matter(corpus_program):
    program = corpus_program("sorted.pl")
    ref = analyze(program, kind="struct", bound=2).success(("sorted", 1))
    for bound in (3, 4, 8):
        assert analyze(program, kind="struct", bound=bound).success(("sorted", 1)) == ref


def test_pq_terminates_with_sound_call(corpus_program):
    r = analyze(corpus_program("pq.pl"), kind="struct", bound=4)
    call = r.call_type(("p", 1))
    assert includes(G("T -> a | f(a) | f(f(a)) | f(f(f(a)))"), call)
    assert r.success_type(("p", 1)) == G("T -> a")


def test_bound_zero_still_terminates(corpus_program):
    r = analyze(corpus_program("list_of_lists.pl"), kind="struct", bound=0)
    assert includes(T_LL, r.success_type(("list_of_lists", 1)))


def run_clause(text: str, call_types, kind=WideningKind.SHORTEN):
    program = parse_program(text)
    an = Analyzer(program, AnalysisConfig(kind))
    key = next(iter(program.predicates))
    an.add_entry(key, call_types)
    clause = program.clauses(key)[0]
    return an.run_clause(clause, an.table[0].call)


def test_run_clause_fact():
    out = run_clause("num_list([]).", [ANY_TYPE])
    assert out == AbstractSub({formals(1)[0]: G("T -> []")})


def test_run_clause_failing_body():
    out = run_clause("p(X) :- X = a, number(X).", [ANY_TYPE])
    assert out.is_bottom


def test_run_clause_number_builtin():
    out = run_clause("p(N, M) :- number(N), M = f(N).", [ANY_TYPE, ANY_TYPE])
    assert out == AbstractSub({A1: NUM_TYPE, A2: G("T -> f(num)")})


def builtin(goal: Struct, entries: dict):
    an = Analyzer(parse_program(""), AnalysisConfig(WideningKind.SHORTEN))
    key = (goal.name, len(goal.args))
    return an.builtin_transfer(key, AbstractSub(entries), goal.args)


def test_builtins():
    n, x, y = Var("N"), Var("X"), Var("Y")
    assert builtin(Struct("number", (n,)), {n: ANY_TYPE})[n] == NUM_TYPE
    assert builtin(Struct("number", (n,)), {n: G("T -> []")}).is_bottom
    out = builtin(Struct("=<", (x, y)), {x: NUM_TYPE, y: ANY_TYPE})
    assert (out[x], out[y]) == (NUM_TYPE, NUM_TYPE)
    out = builtin(Struct("=<", (Struct("+", (x, Struct("a"))), y)), {x: ANY_TYPE, y: ANY_TYPE})
    assert out.is_bottom
    assert builtin(Struct("true"), {x: ANY_TYPE}) == AbstractSub({x: ANY_TYPE})


def test_unknown_predicate():
    program = parse_program("p(X) :- q(X).")
    with pytest.raises(AnalysisError, match="q/1"):
        analyze(program)
    r = analyze(program, permissive=True)
    assert r.warnings and "q/1" in r.warnings[0]
    assert r.success_type(("p", 1)) == ANY_TYPE


def test_iteration_limit(corpus_program):
    with pytest.raises(AnalysisError):
        analyze(corpus_program("tree.pl"), kind="struct", max_iterations=3)


def test_entry_with_call_types(corpus_program):
    program = corpus_program("append.pl")
    lst = G("T -> [] | .(num,T)")
    r = analyze(program, (("append", 3), [lst, lst, ANY_TYPE]), "shorten")
    assert r.success_type(("append", 3), 2) == lst
    assert r.entries == [("append", 3)]


def test_default_entries(corpus_program):
    r = analyze(corpus_program("list_of_lists.pl"))
    assert r.entries == [("list_of_lists", 1)]


def test_unreached_predicate_is_bottom():
    program = parse_program("p(a).\nq(X) :- X = b, p(X).")
    r = analyze(program, ("q", 1))
    assert not r.predicates[("q", 1)].succeeds
    assert r.success(("q", 1)).is_bottom
    assert not r.predicates[("p", 1)].succeeds


@pytest.mark.parametrize("kind", list(WideningKind), ids=lambda k: k.value)
def test_deterministic_and_stable(corpus_program, kind):
    program = corpus_program("qsort.pl")
    r1, r2 = analyze(program, kind=kind), analyze(program, kind=kind)
    for pred in program.predicates:
        assert r1.success(pred) == r2.success(pred)
        assert r1.call(pred) == r2.call(pred)
        # success types never exceed what the call allows plus any
        assert asub_leq(r1.success(pred), AbstractSub(zip(formals(pred[1]), [ANY_TYPE] * pred[1])))
    assert [format_grammar(t) for t in r1.predicates[("qsort", 2)].success_types] == [
        format_grammar(t) for t in r2.predicates[("qsort", 2)].success_types
    ]
