"""
Finite state-context-property systems.

A :class:`ScopSystem` bundles the state set, the context set, the property
set, a sparse transition table ``mu`` and the actual-property map ``xi``.
The state map ``kappa`` is always derived from ``xi``.  Contexts may carry
an :class:`ExperimentSpec`, and contexts/states built as products keep
their factors as provenance.

Everything here is immutable after construction.  Construction is lenient
(dangling ids are kept so that :func:`validate` can report them); queries
on unknown ids raise :class:`~scop.errors.UnknownId`.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

from .errors import UnknownId
from .subset_prob import ZERO, SubsetProb

Label = Union[str, FrozenSet[str]]
MuKey = Tuple[str, str, str, str]  # (f, q, e, p): (e, p) changes to (f, q)
Couple = Tuple[str, str]  # (context, state)
OutcomeKey = Tuple[str, str, str]  # (f, q, p) for a fixed experiment e

__all__ = [
    "Label",
    "ExperimentSpec",
    "ScopSystem",
    "ValidationReport",
    "validate",
    "label_text",
]


def label_text(label: Label) -> str:
    """Stable text form of an outcome label (subsets as ``a+b``)."""
    if isinstance(label, frozenset):
        return "+".join(sorted(label))
    return label


def _label_sort_key(label: Label):
    return (isinstance(label, frozenset), label_text(label))


@dataclass(frozen=True)
class ExperimentSpec:
    """Outcome structure attached to one context.

    ``outcomes`` maps ``(f, q, p)`` to the outcome observed when the
    context, applied to state ``p``, ends in couple ``(f, q)``.  For
    cascade experiments ``spectrum`` is set and every label is a
    ``frozenset`` of spectrum elements.
    """

    context: str
    outcomes: Mapping[OutcomeKey, Label]
    spectrum: Optional[FrozenSet[str]] = None

    def __post_init__(self):
        object.__setattr__(self, "outcomes", dict(self.outcomes))
        if self.spectrum is not None:
            object.__setattr__(self, "spectrum", frozenset(self.spectrum))

    @cached_property
    def by_state(self) -> Dict[str, Dict[Couple, Label]]:
        rows: Dict[str, Dict[Couple, Label]] = defaultdict(dict)
        for (f, q, p), label in self.outcomes.items():
            rows[p][(f, q)] = label
        return dict(rows)

    def row(self, p: str) -> Dict[Couple, Label]:
        return self.by_state.get(p, {})

    def labels(self) -> List[Label]:
        return sorted(set(self.outcomes.values()), key=_label_sort_key)

    def relabel(self, mapping) -> "ExperimentSpec":
        return ExperimentSpec(
            self.context,
            {key: mapping(label) for key, label in self.outcomes.items()},
            None,
        )


def _normalize_products(raw) -> Dict[str, Tuple[Tuple[str, Fraction], ...]]:
    out = {}
    for cid, factors in (raw or {}).items():
        items = []
        for entry in factors:
            if isinstance(entry, (tuple, list)):
                items.append((entry[0], Fraction(entry[1])))
            else:
                items.append((entry, None))
        if any(w is None for _, w in items):
            weight = Fraction(1, len(items))
            items = [(f, weight) for f, _ in items]
        out[cid] = tuple(items)
    return out


@dataclass(frozen=True)
class ScopSystem:
    """A finite state-context-property system.

    Parameters
    ----------
    states, contexts, properties : sequences of str
        The three id sets, in declaration order.
    mu : mapping ``(f, q, e, p) -> SubsetProb``
        Sparse transition table; absent keys mean ``{0}``.  Explicit
        ``{0}`` entries are dropped.
    xi : mapping ``state -> iterable of property ids``
        Actual properties; states not listed get the empty set.
    destruction : str, optional
        The state representing the destroyed entity.
    experiments : mapping ``context -> ExperimentSpec``
    context_products : mapping ``context -> ((factor, weight), ...)``
        Provenance of product contexts.  Weights drive the hidden choice
        of factor when sampling; ``None`` weights mean uniform.
    state_products : mapping ``state -> (factor, ...)``
    """

    states: Tuple[str, ...]
    contexts: Tuple[str, ...]
    properties: Tuple[str, ...]
    mu_table: Mapping[MuKey, SubsetProb] = field(default_factory=dict)
    xi_table: Mapping[str, FrozenSet[str]] = field(default_factory=dict)
    destruction: Optional[str] = None
    experiments: Mapping[str, ExperimentSpec] = field(default_factory=dict)
    context_products: Mapping[str, Tuple[Tuple[str, Fraction], ...]] = field(default_factory=dict)
    state_products: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "states", tuple(self.states))
        set_(self, "contexts", tuple(self.contexts))
        set_(self, "properties", tuple(self.properties))
        mu = {}
        for key, value in self.mu_table.items():
            if not isinstance(value, SubsetProb):
                value = SubsetProb.from_json(value)
            if not value.is_null:
                mu[tuple(key)] = value
        set_(self, "mu_table", mu)
        xi = {p: frozenset(self.xi_table.get(p, ())) for p in self.states}
        for p, props in self.xi_table.items():
            xi.setdefault(p, frozenset(props))
        set_(self, "xi_table", xi)
        set_(self, "experiments", dict(self.experiments))
        set_(self, "context_products", _normalize_products(self.context_products))
        set_(self, "state_products", {k: tuple(v) for k, v in self.state_products.items()})

    # id bookkeeping --------------------------------------------------
    @cached_property
    def state_set(self) -> FrozenSet[str]:
        return frozenset(self.states)

    @cached_property
    def context_set(self) -> FrozenSet[str]:
        return frozenset(self.contexts)

    @cached_property
    def property_set(self) -> FrozenSet[str]:
        return frozenset(self.properties)

    def _need_state(self, p):
        if p not in self.state_set:
            raise UnknownId(f"unknown state {p!r}")

    def _need_context(self, e):
        if e not in self.context_set:
            raise UnknownId(f"unknown context {e!r}")

    def _need_property(self, a):
        if a not in self.property_set:
            raise UnknownId(f"unknown property {a!r}")

    # transition table ------------------------------------------------
    @cached_property
    def rows(self) -> Dict[Couple, Dict[Couple, SubsetProb]]:
        """``(e, p) -> {(f, q): mu(f, q, e, p)}`` over non-null entries."""
        out: Dict[Couple, Dict[Couple, SubsetProb]] = defaultdict(dict)
        for (f, q, e, p), value in self.mu_table.items():
            out[(e, p)][(f, q)] = value
        return dict(out)

    def row(self, e: str, p: str) -> Dict[Couple, SubsetProb]:
        self._need_context(e)
        self._need_state(p)
        return self.rows.get((e, p), {})

    def mu(self, f: str, q: str, e: str, p: str) -> SubsetProb:
        """Probability that couple ``(e, p)`` changes to ``(f, q)``."""
        self._need_context(f)
        self._need_state(q)
        self._need_context(e)
        self._need_state(p)
        return self.mu_table.get((f, q, e, p), ZERO)

    # state / property duality ----------------------------------------
    def xi(self, p: str) -> FrozenSet[str]:
        self._need_state(p)
        return self.xi_table[p]

    @cached_property
    def kappa_table(self) -> Dict[str, FrozenSet[str]]:
        acc: Dict[str, set] = {a: set() for a in self.properties}
        for p in self.states:
            for a in self.xi_table[p]:
                if a in acc:
                    acc[a].add(p)
        return {a: frozenset(s) for a, s in acc.items()}

    def kappa(self, a: str) -> FrozenSet[str]:
        self._need_property(a)
        return self.kappa_table[a]

    # misc -------------------------------------------------------------
    @property
    def proper_states(self) -> Tuple[str, ...]:
        """States other than the destruction state."""
        return tuple(p for p in self.states if p != self.destruction)

    def is_experiment(self, e: str) -> bool:
        return e in self.experiments

    @cached_property
    def all_singleton(self) -> bool:
        return all(v.is_singleton for v in self.mu_table.values())

    def replace(self, **changes) -> "ScopSystem":
        fields = dict(
            states=self.states,
            contexts=self.contexts,
            properties=self.properties,
            mu_table=self.mu_table,
            xi_table=self.xi_table,
            destruction=self.destruction,
            experiments=self.experiments,
            context_products=self.context_products,
            state_products=self.state_products,
        )
        fields.update(changes)
        return ScopSystem(**fields)


@dataclass
class ValidationReport:
    unknown_ids: List[str] = field(default_factory=list)
    duplicate_ids: List[str] = field(default_factory=list)
    no_reachable_couple: List[Couple] = field(default_factory=list)
    singleton_sum: List[Tuple[str, str, Fraction]] = field(default_factory=list)
    experiments: List[str] = field(default_factory=list)
    exempt_rows: int = 0

    @property
    def ok(self) -> bool:
        return not (
            self.unknown_ids
            or self.duplicate_ids
            or self.no_reachable_couple
            or self.singleton_sum
            or self.experiments
        )

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "unknown_ids": list(self.unknown_ids),
            "duplicate_ids": list(self.duplicate_ids),
            "no_reachable_couple": [
                {"e": e, "p": p, "violation": "no reachable couple"}
                for e, p in self.no_reachable_couple
            ],
            "singleton_sum": [
                {"e": e, "p": p, "sum": str(total), "violation": "singleton sum != 1"}
                for e, p, total in self.singleton_sum
            ],
            "experiments": list(self.experiments),
            "exempt_rows": self.exempt_rows,
        }


def _duplicates(kind: str, ids: Iterable[str]) -> List[str]:
    return [f"{kind} {i!r} declared {n} times" for i, n in Counter(ids).items() if n > 1]


def experiment_violations(sys: ScopSystem, e: str) -> List[str]:
    """Structural problems of the experiment attached to ``e``.

    Checks that outcomes sit exactly on the possible transitions (the
    destruction state yields no outcome), that within one row an outcome
    leads to a single state, and that an outcome leads to the same state
    from every state in which it can occur.
    """
    spec = sys.experiments[e]
    out = []
    if e not in sys.context_set:
        return [f"experiment on unknown context {e!r}"]
    target_of: Dict[Label, Tuple[str, str]] = {}
    for (f, q, p), label in sorted(spec.outcomes.items(), key=lambda kv: kv[0]):
        if (f, q, e, p) not in sys.mu_table:
            out.append(f"{e}: outcome {label_text(label)!r} on impossible transition ({e},{p})->({f},{q})")
        if spec.spectrum is not None:
            if not isinstance(label, frozenset) or not label <= spec.spectrum:
                out.append(f"{e}: outcome {label_text(label)!r} is not a subset of the spectrum")
        if p == sys.destruction:
            continue
        seen = target_of.get(label)
        if seen is None:
            target_of[label] = (q, p)
        elif seen[0] != q:
            out.append(
                f"{e}: outcome {label_text(label)!r} leads to {seen[0]!r} from {seen[1]!r} "
                f"but to {q!r} from {p!r}"
            )
    for p in sys.states:
        if p == sys.destruction:
            continue
        labelled = spec.row(p)
        for fq in sys.rows.get((e, p), {}):
            if fq not in labelled:
                out.append(f"{e}: possible transition ({e},{p})->{fq} has no outcome")
    return out


def validate(sys: ScopSystem) -> ValidationReport:
    """Report, never raise, on the basic constraints of ``sys``.

    The weak sum rule (every couple changes to some couple) is checked
    for every ``(e, p)``.  The numeric sum rule is only checked when every
    stored value is a singleton.  Rows of products and of cascade
    experiments are skipped and counted in ``exempt_rows``.
    """
    rep = ValidationReport()
    rep.duplicate_ids += _duplicates("state", sys.states)
    rep.duplicate_ids += _duplicates("context", sys.contexts)
    rep.duplicate_ids += _duplicates("property", sys.properties)
    S, M, L = sys.state_set, sys.context_set, sys.property_set
    for f, q, e, p in sorted(sys.mu_table):
        for kind, ident, pool in (("context", f, M), ("state", q, S), ("context", e, M), ("state", p, S)):
            if ident not in pool:
                rep.unknown_ids.append(f"mu({f},{q},{e},{p}): unknown {kind} {ident!r}")
    for p in sorted(sys.xi_table):
        if p not in S:
            rep.unknown_ids.append(f"xi: unknown state {p!r}")
        for a in sorted(sys.xi_table[p]):
            if a not in L:
                rep.unknown_ids.append(f"xi({p}): unknown property {a!r}")
    if sys.destruction is not None and sys.destruction not in S:
        rep.unknown_ids.append(f"destruction state {sys.destruction!r} is not a state")
    for c, factors in sorted(sys.context_products.items()):
        for ident in [c] + [f for f, _ in factors]:
            if ident not in M:
                rep.unknown_ids.append(f"product context {c!r}: unknown context {ident!r}")
    for s, factors in sorted(sys.state_products.items()):
        for ident in (s,) + factors:
            if ident not in S:
                rep.unknown_ids.append(f"product state {s!r}: unknown state {ident!r}")

    cascade = {e for e, spec in sys.experiments.items() if spec.spectrum is not None}
    check_sums = sys.all_singleton
    for e in sys.contexts:
        for p in sys.states:
            row = sys.rows.get((e, p), {})
            if not row:
                rep.no_reachable_couple.append((e, p))
                continue
            if not check_sums:
                continue
            if e in sys.context_products or p in sys.state_products or e in cascade:
                rep.exempt_rows += 1
                continue
            total = sum((v.value for v in row.values()), Fraction(0))
            if total != 1:
                rep.singleton_sum.append((e, p, total))
    for e in sorted(sys.experiments):
        rep.experiments += experiment_violations(sys, e)
    return rep
