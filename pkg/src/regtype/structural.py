"""Type names, labels and type descriptors, and the structural widening.

A descriptor ``(name, labels, ty)`` denotes the same terms as ``ty``.  The
labels record at which positions of ``ty`` other named types were plugged
in while the analysis built it.  A label pointing back at the descriptor's
own name marks a position where the type grows out of its previous
approximation, which is exactly where the structural widening introduces
recursion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Hashable, Iterable, NamedTuple, Optional

from .grammar import ANY, BOT, Ref, TypeGrammar, normalize, ref_at, restrict
from .lattice import includes, intersect, union
from .terms import Selector, Step, format_selector
from .widenings import widen_shorten

# labels with longer selectors are not recorded
LABEL_DEPTH = 8
DEFAULT_WIDEN_BOUND = 4

_anonymous = itertools.count(1)


@dataclass(eq=False)
class TypeName:
    """Identity of the type at one program site.  Compared by identity."""

    id: int
    site: Hashable = None
    widen_count: int = 0

    def __repr__(self) -> str:
        return f"N{self.id}"


def anonymous_name() -> TypeName:
    return TypeName(-next(_anonymous))


class DuplicateSite(KeyError):
    pass


class NameRegistry:
    """Type names of one analysis run, one per site, plus the latest
    descriptor recorded for each name."""

    def __init__(self) -> None:
        self._names: dict[Hashable, TypeName] = {}
        self._ids = itertools.count(1)
        self.latest: dict[TypeName, "TypeDescriptor"] = {}

    def fresh_name(self, site: Hashable) -> TypeName:
        if site in self._names:
            raise DuplicateSite(site)
        name = TypeName(next(self._ids), site)
        self._names[site] = name
        return name

    def name_for(self, site: Hashable) -> TypeName:
        name = self._names.get(site)
        return name if name is not None else self.fresh_name(site)

    def __len__(self) -> int:
        return len(self._names)

    def __iter__(self):
        return iter(self._names.values())


class Label(NamedTuple):
    selector: Selector
    name: TypeName

    def __str__(self) -> str:
        return f"<{format_selector(self.selector)},{self.name!r}>"


def _label_key(label: Label) -> tuple:
    return (len(label.selector), label.selector, label.name.id)


@dataclass(frozen=True)
class TypeDescriptor:
    name: TypeName
    labels: frozenset = field(default_factory=frozenset)
    ty: TypeGrammar = TypeGrammar(ANY)

    def __str__(self) -> str:
        labels = ",".join(str(l) for l in sorted(self.labels, key=_label_key))
        return f"({self.name!r},{{{labels}}},{self.ty})"

    def sorted_labels(self) -> list[Label]:
        return sorted(self.labels, key=_label_key)


def valid_labels(labels: Iterable[Label], ty: TypeGrammar) -> frozenset:
    """Labels whose selector still addresses a (non-empty) position of ty."""
    out = set()
    for label in labels:
        ref = ref_at(ty, label.selector)
        if ref is not None and ref != BOT and len(label.selector) <= LABEL_DEPTH:
            out.add(label)
    return frozenset(out)


def labels_valid(d: TypeDescriptor) -> bool:
    return valid_labels(d.labels, d.ty) == d.labels


def shift_labels(labels: Iterable[Label], prefix: Selector, depth: int = LABEL_DEPTH) -> set[Label]:
    """Labels re-rooted under ``prefix``; the result drops selectors
    longer than ``depth``."""
    return {
        Label(prefix + l.selector, l.name)
        for l in labels
        if len(prefix) + len(l.selector) <= depth
    }


def labels_below(labels: Iterable[Label], prefix: Selector) -> set[Label]:
    """Labels ``<p,N>`` such that ``<prefix·p,N>`` is in ``labels``."""
    n = len(prefix)
    return {Label(l.selector[n:], l.name) for l in labels if l.selector[:n] == prefix}


def desc_leq(d1: TypeDescriptor, d2: TypeDescriptor) -> bool:
    return includes(d1.ty, d2.ty) and d1.labels <= d2.labels


def _same_name(d1: TypeDescriptor, d2: TypeDescriptor) -> None:
    if d1.name is not d2.name:
        raise ValueError(f"descriptors of different names {d1.name!r} and {d2.name!r}")


def desc_union(d1: TypeDescriptor, d2: TypeDescriptor) -> TypeDescriptor:
    _same_name(d1, d2)
    ty = union(d1.ty, d2.ty)
    return TypeDescriptor(d1.name, valid_labels(d1.labels | d2.labels, ty), ty)


def desc_intersect(d1: TypeDescriptor, d2: TypeDescriptor) -> TypeDescriptor:
    _same_name(d1, d2)
    ty = intersect(d1.ty, d2.ty)
    return TypeDescriptor(d1.name, valid_labels(d1.labels | d2.labels, ty), ty)


def restrict_descriptor(
    d: TypeDescriptor, ref: Ref, name: Optional[TypeName] = None
) -> TypeDescriptor:
    """The descriptor of nonterminal ``ref`` inside ``d.ty``.

    Keeps the suffix ``p`` of every label ``<s·p,N'>`` whose prefix ``s``
    lands on ``ref``.
    """
    ty = restrict(d.ty, ref)
    labels = set()
    for label in d.labels:
        sel = label.selector
        for cut in range(len(sel) + 1):
            if ref_at(d.ty, sel[:cut]) == ref:
                labels.add(Label(sel[cut:], label.name))
    return TypeDescriptor(name or anonymous_name(), valid_labels(labels, ty), ty)


def widen_structural(prev: Optional[TypeDescriptor], cand: TypeDescriptor) -> TypeDescriptor:
    """Structural widening of ``cand`` against ``prev`` (same type name).

    Starts from the union of both types and adds a production back to the
    new root at every position whose selector carries a label naming the
    descriptor itself.
    """
    if prev is None or prev.ty.is_bottom:
        return cand
    _same_name(prev, cand)
    name = prev.name
    joined = union(prev.ty, cand.ty)
    labels = prev.labels | cand.labels
    self_selectors = {l.selector for l in labels if l.name is name}
    if isinstance(joined.root, str) or not self_selectors:
        ty = joined
    else:
        ty = _rebuild(joined, self_selectors)
    if ty != prev.ty:
        name.widen_count += 1
    return TypeDescriptor(name, valid_labels(labels, ty), ty)


def _rebuild(t: TypeGrammar, self_selectors: set[Selector]) -> TypeGrammar:
    raw: dict[str, list] = {}
    seen: dict[tuple, str] = {}
    fresh = itertools.count(1)

    def productions(ref: int, sel: Selector) -> list:
        node = t.node(ref)
        out: list = ["num"] if node.has_num else []
        for f, children in node.alts:
            out.append((f, [walk(c, sel + (Step(f, i),)) for i, c in enumerate(children, 1)]))
        return out

    def walk(ref: Ref, sel: Selector) -> str:
        if isinstance(ref, str):
            # any, num and bottom carry no productions
            return ref
        # minimized grammars share equal subtrees, so positions that lead
        # to a self reference are unfolded per selector
        key = (ref, sel) if any(s[: len(sel)] == sel for s in self_selectors) else (ref, None)
        if key in seen:
            return seen[key]
        m = f"M{next(fresh)}"
        seen[key] = m
        raw[m] = []
        raw[m].extend(productions(ref, sel))
        if sel in self_selectors:
            raw[m].append("R")
        return m

    raw["R"] = []
    raw["R"].extend(productions(t.root, ()))  # type: ignore[arg-type]
    return normalize(raw, "R")


def guard_widen(
    prev: Optional[TypeDescriptor],
    cand: TypeDescriptor,
    bound: int = DEFAULT_WIDEN_BOUND,
) -> TypeDescriptor:
    """Structural widening while the name's counter is below ``bound``;
    shortening of the union afterwards."""
    if prev is None or prev.ty.is_bottom:
        return cand
    if prev.name.widen_count < bound:
        return widen_structural(prev, cand)
    _same_name(prev, cand)
    if includes(cand.ty, prev.ty):
        # nothing new: keep the previous type, no widening needed
        return TypeDescriptor(prev.name, valid_labels(prev.labels | cand.labels, prev.ty), prev.ty)
    ty = widen_shorten(union(prev.ty, cand.ty))
    return TypeDescriptor(prev.name, valid_labels(prev.labels | cand.labels, ty), ty)


def rename(d: TypeDescriptor, name: TypeName) -> TypeDescriptor:
    return replace(d, name=name)


def top_descriptor(name: TypeName) -> TypeDescriptor:
    return TypeDescriptor(name, frozenset(), TypeGrammar(ANY))


def describe(ty: TypeGrammar, name: Optional[TypeName] = None, labels: Iterable[Label] = ()) -> TypeDescriptor:
    name = name or anonymous_name()
    return TypeDescriptor(name, valid_labels(labels, ty), ty)


__all__ = [
    "DEFAULT_WIDEN_BOUND",
    "DuplicateSite",
    "LABEL_DEPTH",
    "Label",
    "NameRegistry",
    "TypeDescriptor",
    "TypeName",
    "desc_intersect",
    "desc_leq",
    "desc_union",
    "guard_widen",
    "labels_below",
    "labels_valid",
    "restrict_descriptor",
    "shift_labels",
    "valid_labels",
    "widen_structural",
]
