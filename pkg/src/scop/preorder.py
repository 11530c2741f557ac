"""
State and property implication.

Properties are ordered by inclusion of the states that make them actual,
``a < b  iff  kappa(a) <= kappa(b)``; states by reverse inclusion of their
actual properties, ``p < q  iff  xi(q) <= xi(p)``.  Both are pre-orders.
This module computes bounds and equivalence classes in such pre-orders,
meet properties and join states, and the two completeness
conditions together with the property-state / state-property maps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .core import ScopSystem
from .errors import NotComplete

__all__ = [
    "PreorderView",
    "state_view",
    "property_view",
    "property_implies",
    "state_implies",
    "equivalence_classes",
    "infimum_set",
    "supremum_set",
    "hasse_edges",
    "preorder_failures",
    "meet_properties",
    "join_states",
    "CompletenessReport",
    "check_property_completeness",
    "check_state_completeness",
    "property_state",
    "state_property",
    "classify_proper",
]


@dataclass(frozen=True)
class PreorderView:
    """A finite pre-order given by, for each element, the set of elements above it."""

    carrier: Tuple[str, ...]
    up: Mapping[str, FrozenSet[str]]

    def leq(self, x: str, y: str) -> bool:
        return y in self.up[x]

    @cached_property
    def down(self) -> Dict[str, FrozenSet[str]]:
        acc = {x: set() for x in self.carrier}
        for x in self.carrier:
            for y in self.up[x]:
                acc[y].add(x)
        return {x: frozenset(s) for x, s in acc.items()}

    def equivalent(self, x: str, y: str) -> bool:
        return self.leq(x, y) and self.leq(y, x)

    def representative(self, elements: Iterable[str]) -> Optional[str]:
        elements = list(elements)
        return min(elements) if elements else None


def _view_from(carrier, sets: Mapping[str, FrozenSet], reverse: bool) -> PreorderView:
    up = {}
    for x in carrier:
        sx = sets[x]
        if reverse:
            up[x] = frozenset(y for y in carrier if sets[y] <= sx)
        else:
            up[x] = frozenset(y for y in carrier if sx <= sets[y])
    return PreorderView(tuple(carrier), up)


def state_view(sys: ScopSystem) -> PreorderView:
    return _view_from(sys.states, sys.xi_table, reverse=True)


def property_view(sys: ScopSystem) -> PreorderView:
    return _view_from(sys.properties, sys.kappa_table, reverse=False)


def property_implies(sys: ScopSystem, a: str, b: str) -> bool:
    """``a < b``: every state making ``a`` actual makes ``b`` actual."""
    return sys.kappa(a) <= sys.kappa(b)


def state_implies(sys: ScopSystem, p: str, q: str) -> bool:
    """``p < q``: every property actual in ``q`` is actual in ``p``."""
    return sys.xi(q) <= sys.xi(p)


def equivalence_classes(view: PreorderView) -> List[Tuple[str, ...]]:
    """Classes of mutually implying elements, each sorted, ordered by least member."""
    seen, classes = set(), []
    for x in sorted(view.carrier):
        if x in seen:
            continue
        cls = tuple(sorted(y for y in view.up[x] if view.leq(y, x)))
        seen.update(cls)
        classes.append(cls)
    return classes


def infimum_set(view: PreorderView, subset: Iterable[str]) -> FrozenSet[str]:
    """All greatest lower bounds of ``subset`` (one equivalence class, or empty).

    For the empty subset every element is a lower bound, so the result is
    the class of elements above everything.
    """
    subset = list(subset)
    lower = set(view.carrier)
    for x in subset:
        lower &= view.down[x]
    return frozenset(z for z in lower if lower <= view.down[z])


def supremum_set(view: PreorderView, subset: Iterable[str]) -> FrozenSet[str]:
    subset = list(subset)
    upper = set(view.carrier)
    for x in subset:
        upper &= view.up[x]
    return frozenset(z for z in upper if upper <= view.up[z])


def hasse_edges(view: PreorderView) -> List[Tuple[str, str]]:
    """Covering pairs ``(lower, upper)`` of the quotient order, by class representative."""
    classes = equivalence_classes(view)
    reps = [c[0] for c in classes]
    strict = {
        (x, y) for x in reps for y in reps if x != y and view.leq(x, y)
    }
    edges = []
    for x, y in sorted(strict):
        if not any((x, z) in strict and (z, y) in strict for z in reps):
            edges.append((x, y))
    return edges


def preorder_failures(view: PreorderView) -> List[str]:
    """Exhaustive reflexivity and transitivity check; empty when ``view`` is a pre-order."""
    out = [f"not reflexive at {x!r}" for x in view.carrier if not view.leq(x, x)]
    for x in view.carrier:
        for y in view.up[x]:
            for z in view.up[y]:
                if not view.leq(x, z):
                    out.append(f"{x!r} < {y!r} < {z!r} but not {x!r} < {z!r}")
    return out


def meet_properties(sys: ScopSystem, props: Iterable[str]) -> FrozenSet[str]:
    """Properties actual exactly where every property of ``props`` is actual."""
    target = frozenset(sys.states)
    for a in props:
        target &= sys.kappa(a)
    return frozenset(c for c in sys.properties if sys.kappa_table[c] == target)


def join_states(sys: ScopSystem, states: Iterable[str]) -> FrozenSet[str]:
    """States whose actual properties are exactly those common to ``states``."""
    target = frozenset(sys.properties)
    for p in states:
        target &= sys.xi(p)
    return frozenset(s for s in sys.states if sys.xi_table[s] & sys.property_set == target)


@dataclass
class CompletenessReport:
    complete: bool
    missing: List[Tuple[str, ...]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"complete": self.complete, "missing": [list(w) for w in self.missing]}


def _closure_report(universe_mask: int, members: Mapping[str, int]) -> CompletenessReport:
    family = set(members.values())
    missing: List[Tuple[str, ...]] = []
    if universe_mask not in family:
        missing.append(())
    # one witness pair per unrepresented intersection
    seen = set()
    by_mask: Dict[int, str] = {}
    for ident in sorted(members):
        by_mask.setdefault(members[ident], ident)
    masks = sorted(by_mask.items(), key=lambda kv: kv[1])
    for (m1, x), (m2, y) in combinations(masks, 2):
        meet = m1 & m2
        if meet not in family and meet not in seen:
            seen.add(meet)
            missing.append((x, y))
    return CompletenessReport(not missing, missing)


def _masks(universe: Tuple[str, ...], sets: Mapping[str, Iterable[str]], ids) -> Dict[str, int]:
    bit = {u: 1 << i for i, u in enumerate(universe)}
    return {i: sum(bit[u] for u in sets[i] if u in bit) for i in ids}


def check_property_completeness(sys: ScopSystem) -> CompletenessReport:
    """Every family of properties has a meet property.

    On a finite system this holds iff the sets ``kappa(a)`` include the
    whole state set (meet of the empty family) and are closed under
    pairwise intersection.  ``missing`` lists ``()`` when the empty meet is
    absent and one property pair per unrepresented intersection.
    """
    members = _masks(sys.states, sys.kappa_table, sys.properties)
    return _closure_report((1 << len(sys.states)) - 1, members)


def check_state_completeness(sys: ScopSystem) -> CompletenessReport:
    """Every family of states has a join state (dual of the property check)."""
    members = _masks(sys.properties, sys.xi_table, sys.states)
    return _closure_report((1 << len(sys.properties)) - 1, members)


def _require_complete(sys: ScopSystem):
    if not (check_property_completeness(sys).complete and check_state_completeness(sys).complete):
        raise NotComplete("system is not both property and state complete")


def property_state(sys: ScopSystem, p: str, *, checked: bool = False) -> str:
    """The meet of all properties actual in ``p`` (least id of its class)."""
    if not checked:
        _require_complete(sys)
    return min(meet_properties(sys, sys.xi(p)))


def state_property(sys: ScopSystem, a: str, *, checked: bool = False) -> str:
    """The join of all states making ``a`` actual (least id of its class)."""
    if not checked:
        _require_complete(sys)
    return min(join_states(sys, sys.kappa(a)))


def classify_proper(sys: ScopSystem) -> Dict[str, List[str]]:
    return {
        "proper_states": [p for p in sys.states if sys.xi_table[p] & sys.property_set],
        "improper_states": [p for p in sys.states if not sys.xi_table[p] & sys.property_set],
        "proper_properties": [a for a in sys.properties if sys.kappa_table[a]],
        "improper_properties": [a for a in sys.properties if not sys.kappa_table[a]],
    }
