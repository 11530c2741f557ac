"""
Experiments: outcomes, collapse, tests of properties and operational entities.

An experiment is a context ``e`` with an outcome map ``x(f, q, e, p)``.
``O(e, p)`` is the set of outcomes that can occur from state ``p`` and
``P_x(p)`` is the state reached with outcome ``x``.  On top of that this
module checks first-kind and cascade structure, forms product
experiments, and builds the state-context-property system of a system of
experiments (``sco_to_scop``), whose properties are pairs ``(e, A)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import chain, combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .core import ExperimentSpec, Label, ScopSystem, label_text, _label_sort_key
from .dynamics import product_context, range_of_context_for_state
from .errors import CapExceeded, NoSpectrum, NotAnExperiment, OutcomeClash, OutcomeNotPossible
from .subset_prob import ONE, SubsetProb

__all__ = [
    "outcomes",
    "outcomes_total",
    "collapse",
    "outcome_probability",
    "is_test",
    "find_test",
    "OperationalReport",
    "is_operational_entity",
    "FirstKindReport",
    "is_first_kind",
    "is_first_kind_experiment",
    "CascadeReport",
    "is_cascade_experiment",
    "product_experiment",
    "property_id",
    "label_namespace",
    "sco_to_scop",
    "property_table",
]


def _spec(sys: ScopSystem, e: str) -> ExperimentSpec:
    sys._need_context(e)
    try:
        return sys.experiments[e]
    except KeyError:
        raise NotAnExperiment(f"context {e!r} is not an experiment") from None


def outcomes(sys: ScopSystem, e: str, p: str) -> FrozenSet[Label]:
    """O(e, p)."""
    spec = _spec(sys, e)
    sys._need_state(p)
    return frozenset(spec.row(p).values())


def outcomes_total(sys: ScopSystem, e: str) -> FrozenSet[Label]:
    """O(e), the union of O(e, p) over all states."""
    return frozenset(_spec(sys, e).outcomes.values())


def _target(sys: ScopSystem, e: str, p: str, x: Label) -> Tuple[str, str]:
    for fq, label in _spec(sys, e).row(p).items():
        if label == x:
            return fq
    raise OutcomeNotPossible(f"outcome {label_text(x)!r} cannot occur for {e!r} in state {p!r}")


def collapse(sys: ScopSystem, e: str, p: str, x: Label) -> str:
    """P_x(p): the state the entity is left in when ``e`` gives ``x``."""
    sys._need_state(p)
    return _target(sys, e, p, x)[1]


def outcome_probability(sys: ScopSystem, e: str, p: str, x: Label) -> SubsetProb:
    """Probability of outcome ``x``: the value on the couple that ``x`` labels."""
    sys._need_state(p)
    f, q = _target(sys, e, p, x)
    return sys.mu_table[(f, q, e, p)]


# -- tests of properties ---------------------------------------------------

def is_test(sys: ScopSystem, a: str, e: str, A: Iterable[Label]) -> bool:
    """``a`` is actual in ``p`` iff ``O(e, p)`` is contained in ``A``, for every state."""
    A = frozenset(A)
    spec = _spec(sys, e)
    actual = sys.kappa(a)
    return all(
        (p in actual) == (frozenset(spec.row(p).values()) <= A) for p in sys.states
    )


def find_test(sys: ScopSystem, a: str, e: str) -> Optional[FrozenSet[Label]]:
    """The outcome set with which ``e`` tests ``a``, or ``None``.

    The candidate is the union of ``O(e, p)`` over the states where ``a``
    is actual.  Any valid outcome set contains it, and if some set works
    this one works too, so a single check decides testability.
    """
    spec = _spec(sys, e)
    actual = sys.kappa(a)
    rows = {p: frozenset(spec.row(p).values()) for p in sys.states}
    candidate = frozenset(chain.from_iterable(rows[p] for p in actual))
    for p in sys.states:
        if p not in actual and rows[p] <= candidate:
            return None
    return candidate


@dataclass
class OperationalReport:
    operational: bool
    witness: Dict[str, Tuple[str, FrozenSet[Label]]] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "operational": self.operational,
            "witness": {
                a: {"experiment": e, "outcomes": sorted(map(label_text, A))}
                for a, (e, A) in sorted(self.witness.items())
            },
            "failures": list(self.failures),
        }


def is_operational_entity(sys: ScopSystem, *, strict: bool = False) -> OperationalReport:
    """Every property has a test, and any two properties have compatible tests.

    For each pair of distinct properties ``a, b`` there must be an
    experiment testing ``a`` and one testing ``b`` whose total outcome sets
    are disjoint.  By default a single experiment testing both also
    satisfies the pair clause; ``strict=True`` demands disjoint outcome
    sets even then, so that a lone experiment never suffices.
    """
    exps = [e for e in sys.contexts if e in sys.experiments]
    bit = {e: 1 << i for i, e in enumerate(exps)}
    totals = {e: outcomes_total(sys, e) for e in exps}
    disjoint = {}
    for e in exps:
        mask = 0
        for f in exps:
            if not totals[e] & totals[f]:
                mask |= bit[f]
        if not strict:
            mask |= bit[e]
        disjoint[e] = mask
    rep = OperationalReport(True)
    testers: Dict[str, int] = {}
    for a in sys.properties:
        mask = 0
        for e in exps:
            A = find_test(sys, a, e)
            if A is not None:
                mask |= bit[e]
                rep.witness.setdefault(a, (e, A))
        testers[a] = mask
        if not mask:
            rep.failures.append(f"property {a!r} has no test")
    # reach[a]: experiments compatible with some test of a
    reach = {}
    for a, mask in testers.items():
        acc = 0
        for e in exps:
            if mask & bit[e]:
                acc |= disjoint[e]
        reach[a] = acc
    for a, b in combinations(sys.properties, 2):
        if testers[a] and testers[b] and not reach[a] & testers[b]:
            rep.failures.append(f"no tests with disjoint outcome sets for {a!r} and {b!r}")
    rep.operational = not rep.failures
    return rep


# -- first kind and cascade ------------------------------------------------

@dataclass
class FirstKindReport:
    ok: bool
    failures: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {"first_kind": self.ok, "failures": list(self.failures)}


def is_first_kind(sys: ScopSystem, e: str) -> FirstKindReport:
    """Every couple ``(f, q)`` reachable from ``(e, p)`` has ``q`` an eigenstate of ``f``."""
    sys._need_context(e)
    failures = []
    for p in sys.states:
        for f, q in sorted(sys.rows.get((e, p), {})):
            r = range_of_context_for_state(sys, f, q)
            if r != {q}:
                failures.append(f"({e},{p}) -> ({f},{q}) but R({f},{q}) = {sorted(r)}")
    return FirstKindReport(not failures, failures)


def is_first_kind_experiment(sys: ScopSystem, e: str) -> FirstKindReport:
    """Every collapsed state ``q = P_x(p)`` has ``mu(e, q, e, q) = {1}``."""
    spec = _spec(sys, e)
    failures = []
    for (f, q, p), label in sorted(spec.outcomes.items()):
        value = sys.mu_table.get((e, q, e, q))
        if value != ONE:
            failures.append(
                f"outcome {label_text(label)!r} from {p!r} leaves {q!r} with "
                f"mu({e},{q},{e},{q}) = {value if value is not None else '{0}'}"
            )
    return FirstKindReport(not failures, failures)


@dataclass
class CascadeReport:
    """Failed instances of the four cascade laws, plus instance counts.

    ``skipped_nesting`` counts pairs ``x < y`` for which ``y`` cannot occur
    from ``P_x(p)``, so ``P_y(P_x(p))`` is undefined.
    """

    nesting: List[str] = field(default_factory=list)
    idempotent: List[str] = field(default_factory=list)
    multiplicative: List[str] = field(default_factory=list)
    complement: List[str] = field(default_factory=list)
    checked: Dict[str, int] = field(default_factory=dict)
    skipped_nesting: int = 0

    @property
    def ok(self) -> bool:
        return not (self.nesting or self.idempotent or self.multiplicative or self.complement)

    @property
    def violations(self) -> int:
        return len(self.nesting) + len(self.idempotent) + len(self.multiplicative) + len(self.complement)

    def to_dict(self) -> dict:
        return {
            "cascade": self.ok,
            "violations": {
                "nesting": list(self.nesting),
                "idempotent": list(self.idempotent),
                "multiplicative": list(self.multiplicative),
                "complement": list(self.complement),
            },
            "checked": dict(self.checked),
            "skipped_nesting": self.skipped_nesting,
        }


def is_cascade_experiment(sys: ScopSystem, e: str) -> CascadeReport:
    """Check the cascade laws of ``e`` over every state and outcome pair.

    Each law is checked where its collapsed states are defined, i.e. for
    outcomes that can occur from ``p``.  All comparisons are exact.
    """
    spec = _spec(sys, e)
    if spec.spectrum is None:
        raise NoSpectrum(f"experiment {e!r} has no spectrum")
    E = spec.spectrum
    rep = CascadeReport(checked={"nesting": 0, "idempotent": 0, "multiplicative": 0, "complement": 0})

    def mu(q, p):
        return sys.mu_table.get((e, q, e, p), SubsetProb.ZERO)

    for p in sys.states:
        row = {label: q for (f, q), label in spec.row(p).items()}
        labels = sorted(row, key=_label_sort_key)
        for x in labels:
            qx = row[x]
            rep.checked["idempotent"] += 1
            if mu(qx, qx) != ONE:
                rep.idempotent.append(f"p={p} x={label_text(x)}: mu(e,P_x(p),e,P_x(p)) = {mu(qx, qx)}")
            for y in labels:
                if not (isinstance(x, frozenset) and isinstance(y, frozenset) and x <= y):
                    continue
                qy = row[y]
                after = {label: q for (f, q), label in spec.row(qx).items()}
                if y in after:
                    rep.checked["nesting"] += 1
                    if after[y] != qx:
                        rep.nesting.append(
                            f"p={p} x={label_text(x)} y={label_text(y)}: P_y(P_x(p)) = {after[y]} != {qx}"
                        )
                else:
                    rep.skipped_nesting += 1
                rep.checked["multiplicative"] += 1
                lhs = mu(qx, p)
                rhs = mu(qx, qy) * mu(qy, p)
                if lhs != rhs:
                    rep.multiplicative.append(
                        f"p={p} x={label_text(x)} y={label_text(y)}: {lhs} != {mu(qx, qy)} * {mu(qy, p)}"
                    )
            for t in labels:
                if not (isinstance(x, frozenset) and isinstance(t, frozenset)):
                    continue
                if x | t != E or x & t:
                    continue
                rep.checked["complement"] += 1
                lhs, rhs = mu(qx, p), 1 - mu(row[t], p)
                if lhs != rhs:
                    rep.complement.append(
                        f"p={p} z={label_text(x)} t={label_text(t)}: {lhs} != 1 - {mu(row[t], p)}"
                    )
    return rep


# -- products and the system of an SCO -------------------------------------

def product_experiment(sys: ScopSystem, factors: Sequence[str], new_id: str) -> ScopSystem:
    """Product context of experiments with pairwise disjoint outcome sets.

    The outcome map of the product is the union of the factor maps, so
    ``O(prod e_i, p)`` is the union of the ``O(e_i, p)``.
    """
    factors = list(dict.fromkeys(factors))
    specs = [_spec(sys, e) for e in factors]
    totals = [frozenset(s.outcomes.values()) for s in specs]
    for (e1, t1), (e2, t2) in combinations(zip(factors, totals), 2):
        common = t1 & t2
        if common:
            raise OutcomeClash(
                f"{e1!r} and {e2!r} share outcomes {sorted(map(label_text, common))}"
            )
    merged: Dict[Tuple[str, str, str], Label] = {}
    for e, spec in zip(factors, specs):
        for key, label in spec.outcomes.items():
            if key in merged and merged[key] != label:
                raise OutcomeClash(
                    f"couple ({key[0]},{key[1]}) from {key[2]!r} carries outcome "
                    f"{label_text(merged[key])!r} and {label_text(label)!r}"
                )
            merged[key] = label
    out = product_context(sys, factors, new_id)
    spectrum = specs[0].spectrum if len(specs) == 1 else None
    experiments = dict(out.experiments)
    experiments[new_id] = ExperimentSpec(new_id, merged, spectrum)
    return out.replace(experiments=experiments)


def property_id(e: str, A: Iterable[Label]) -> str:
    """Id of the property ``(e, A)``, e.g. ``"e:{x|y}"``."""
    return f"{e}:{{{'|'.join(sorted(label_text(x) for x in A))}}}"


def _powerset(items: Sequence) -> Iterable[Tuple]:
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


def label_namespace(sco: ScopSystem) -> Dict[str, Dict[Label, str]]:
    """Relabelling applied by :func:`sco_to_scop`, per experiment.

    Labels are kept as they are unless two experiments that are not
    products share an outcome; then every label ``x`` of ``e`` becomes
    ``"e:x"``, and product experiments take the label of the factor that
    produced each outcome.
    """
    exps = [e for e in sco.contexts if e in sco.experiments]
    base = [e for e in exps if e not in sco.context_products]
    totals = {e: frozenset(sco.experiments[e].outcomes.values()) for e in exps}
    clash = any(totals[a] & totals[b] for a, b in combinations(base, 2))
    names: Dict[str, Dict[Label, str]] = {}

    def resolve(e: str) -> Dict[Label, str]:
        if e in names:
            return names[e]
        spec = sco.experiments[e]
        if not clash:
            table = {x: x if isinstance(x, str) else label_text(x) for x in totals[e]}
        elif e not in sco.context_products:
            table = {x: f"{e}:{label_text(x)}" for x in totals[e]}
        else:
            table = {}
            factors = [f for f, _ in sco.context_products[e] if f in sco.experiments]
            for key, x in spec.outcomes.items():
                for f in factors:
                    if sco.experiments[f].outcomes.get(key) == x:
                        table[x] = resolve(f)[x]
                        break
                else:
                    table[x] = f"{e}:{label_text(x)}"
        names[e] = table
        return table

    for e in exps:
        resolve(e)
    return names


def sco_to_scop(
    sco: ScopSystem,
    cap: int = 4096,
    subsets: Optional[Mapping[str, Iterable[Iterable[Label]]]] = None,
) -> ScopSystem:
    """The state-context-property system of a system of experiments.

    Properties are the pairs ``(e, A)`` with ``A`` a subset of ``O(e)``,
    and ``(e, A)`` is actual in ``p`` iff ``O(e, p)`` is contained in
    ``A``.  Existing properties of ``sco`` are discarded.

    Parameters
    ----------
    sco : ScopSystem
        States, contexts, transition table and experiments.
    cap : int
        Maximum number of generated properties.
    subsets : mapping, optional
        Explicit outcome subsets per experiment, used instead of the full
        power set of ``O(e)``.  Labels are the namespaced ones.

    Raises
    ------
    CapExceeded
        When more than ``cap`` properties would be generated.
    """
    names = label_namespace(sco)
    experiments = {}
    for e, table in names.items():
        spec = sco.experiments[e]
        experiments[e] = ExperimentSpec(e, {k: table[x] for k, x in spec.outcomes.items()}, None)
    exps = [e for e in sco.contexts if e in experiments]
    pending: List[Tuple[str, FrozenSet[str]]] = []
    total = 0
    for e in exps:
        labels = sorted(frozenset(experiments[e].outcomes.values()))
        if subsets is not None and e in subsets:
            family = [frozenset(A) for A in subsets[e]]
            total += len(family)
        else:
            total += 2 ** len(labels)
            family = None
        if total > cap:
            raise CapExceeded(
                f"more than {cap} properties; pass explicit outcome subsets per experiment"
            )
        if family is None:
            family = [frozenset(A) for A in _powerset(labels)]
        pending += [(e, A) for A in family]
    props: List[str] = []
    meaning: Dict[str, Tuple[str, FrozenSet[str]]] = {}
    for e, A in pending:
        pid = property_id(e, A)
        if pid not in meaning:
            meaning[pid] = (e, A)
            props.append(pid)
    rows = {
        e: {p: frozenset(experiments[e].row(p).values()) for p in sco.states} for e in exps
    }
    xi = {
        p: frozenset(pid for pid, (e, A) in meaning.items() if rows[e][p] <= A)
        for p in sco.states
    }
    return sco.replace(properties=tuple(props), xi_table=xi, experiments=experiments)


def property_table(sys: ScopSystem) -> Dict[str, Tuple[str, FrozenSet[str]]]:
    """Recover ``id -> (e, A)`` for the properties of a :func:`sco_to_scop` system."""
    out = {}
    for e in sys.experiments:
        labels = sorted(label_text(x) for x in outcomes_total(sys, e))
        by_text = {}
        prefix = f"{e}:{{"
        for pid in sys.properties:
            if pid.startswith(prefix) and pid.endswith("}"):
                by_text[pid] = pid
        for pid in by_text:
            inner = pid[len(prefix):-1]
            A = frozenset(inner.split("|")) if inner else frozenset()
            if A <= set(labels) and property_id(e, A) == pid:
                out.setdefault(pid, (e, A))
    return out
