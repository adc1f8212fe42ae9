import pytest

from regtype.grammar import ANY_TYPE, BOTTOM_TYPE, NUM_TYPE, parse_grammar, ref_at
from regtype.lattice import includes, union
from regtype.structural import (
    DuplicateSite,
    Label,
    NameRegistry,
    TypeDescriptor,
    desc_intersect,
    desc_leq,
    desc_union,
    describe,
    guard_widen,
    labels_valid,
    restrict_descriptor,
    widen_structural,
)
from regtype.terms import CONS, Step

G = parse_grammar
HEAD, TAIL = (Step(CONS, 1),), (Step(CONS, 2),)


@pytest.fixture
def names():
    reg = NameRegistry()
    return reg, reg.fresh_name("n13"), reg.fresh_name("n14")


def test_registry():
    reg = NameRegistry()
    site = (("sorted", 1), 2, 1, 0, "Y")
    n = reg.fresh_name(site)
    assert n.widen_count == 0
    assert reg.fresh_name("other").id != n.id
    assert reg.name_for(site) is n
    with pytest.raises(DuplicateSite):
        reg.fresh_name(site)
    assert len(reg) == 2


def test_union_of_first_approximations(names):
    _, n13, n14 = names
    e14 = frozenset({Label(HEAD, n13), Label(TAIL, n14)})
    d = desc_union(TypeDescriptor(n14, frozenset(), G("T -> []")), TypeDescriptor(n14, e14, G("T -> .(num,[])")))
    assert d.ty == G("T -> [] | .(num,[])")
    assert d.labels == e14
    assert desc_leq(d, d)


def test_intersect_drops_invalid_labels(names):
    _, n13, n14 = names
    d = TypeDescriptor(n14, frozenset({Label(HEAD, n13)}), ANY_TYPE)
    out = desc_intersect(d, TypeDescriptor(n14, frozenset(), NUM_TYPE))
    assert out.ty == NUM_TYPE
    assert out.labels == frozenset()


def test_name_mismatch(names):
    _, n13, n14 = names
    with pytest.raises(ValueError):
        desc_union(describe(NUM_TYPE, n13), describe(NUM_TYPE, n14))


def test_widen_structural_introduces_recursion(names):
    _, n13, n14 = names
    e14 = frozenset({Label(HEAD, n13), Label(TAIL, n14)})
    prev = TypeDescriptor(n14, e14, G("T -> [] | .(num,[])"))
    out = widen_structural(prev, TypeDescriptor(n14, frozenset(), G("T -> .(num,[])")))
    assert out.ty == G("T -> [] | .(num,T)")
    assert out.labels == e14
    assert n14.widen_count == 1
    assert labels_valid(out)


def test_widen_structural_without_self_label(names):
    _, n13, n14 = names
    prev = TypeDescriptor(n14, frozenset({Label(HEAD, n13)}), G("T -> []"))
    cand = TypeDescriptor(n14, frozenset(), G("T -> .(num,[])"))
    assert widen_structural(prev, cand).ty == union(prev.ty, cand.ty)
    first = TypeDescriptor(n14, frozenset(), BOTTOM_TYPE)
    assert widen_structural(first, cand) is cand
    assert widen_structural(None, cand) is cand


def test_guard_bound_zero_shortens(names):
    _, n13, n14 = names
    e14 = frozenset({Label(TAIL, n14)})
    prev = TypeDescriptor(n14, e14, G("T -> [] | .(num,T1); T1 -> [] | .(num,[])"))
    cand = TypeDescriptor(n14, frozenset(), G("T -> .(any,[])"))
    out = guard_widen(prev, cand, bound=0)
    assert out.ty == G("T -> [] | .(any,T)")
    assert includes(union(prev.ty, cand.ty), out.ty)
    # nothing new once the bound is reached: the previous type is kept
    same = guard_widen(prev, TypeDescriptor(n14, frozenset(), G("T -> []")), bound=0)
    assert same.ty == prev.ty


def test_guard_below_bound_matches_structural(names):
    _, n13, n14 = names
    e14 = frozenset({Label(TAIL, n14)})
    prev = TypeDescriptor(n14, e14, G("T -> [] | .(num,[])"))
    cand = TypeDescriptor(n14, frozenset(), G("T -> .(num,[])"))
    assert guard_widen(prev, cand, bound=4).ty == G("T -> [] | .(num,T)")


def test_restrict_descriptor_keeps_suffixes(names):
    _, n13, n14 = names
    ty = G("T -> [] | .(num,T1); T1 -> [] | .(num,[])")
    d = TypeDescriptor(n14, frozenset({Label(HEAD, n13), Label(TAIL + HEAD, n13)}), ty)
    tail = restrict_descriptor(d, ref_at(ty, TAIL))
    assert tail.ty == G("T -> [] | .(num,[])")
    assert tail.labels == frozenset({Label(HEAD, n13)})
    root = restrict_descriptor(d, ty.root)
    assert root.labels == d.labels and root.name is not d.name
    assert restrict_descriptor(describe(ty, n14), ty.root).labels == frozenset()
