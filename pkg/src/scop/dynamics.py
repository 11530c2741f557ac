"""
Change under contexts, from ranges up to products and random trajectories.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence

from .core import Couple, ScopSystem, label_text
from .errors import DuplicateId, EmptyFactorList, NonSingletonProbability, OutcomeClash, UnknownId
from .subset_prob import SubsetProb

__all__ = [
    "transition_graph",
    "range_of_context_for_state",
    "range_of_context",
    "range_of_state_for_context",
    "range_of_state",
    "is_eigenstate",
    "is_eigencontext",
    "preparation",
    "CoupleReport",
    "DeterminismReport",
    "classify",
    "product_context",
    "product_state",
    "sample_trajectory",
]


def transition_graph(sys: ScopSystem) -> Dict[Couple, Dict[Couple, SubsetProb]]:
    """Edges ``(e, p) -> (f, q)`` for every transition with probability other than ``{0}``."""
    return {k: dict(v) for k, v in sys.rows.items()}


def range_of_context_for_state(sys: ScopSystem, e: str, p: str) -> FrozenSet[str]:
    """R(e, p): the states ``p`` can be changed to by ``e``."""
    return frozenset(q for _, q in sys.row(e, p))


def range_of_context(sys: ScopSystem, e: str) -> FrozenSet[str]:
    sys._need_context(e)
    out = set()
    for p in sys.states:
        out |= range_of_context_for_state(sys, e, p)
    return frozenset(out)


def range_of_state_for_context(sys: ScopSystem, p: str, e: str) -> FrozenSet[str]:
    """R(p, e): the contexts ``e`` can be changed to by ``p``."""
    return frozenset(f for f, _ in sys.row(e, p))


def range_of_state(sys: ScopSystem, p: str) -> FrozenSet[str]:
    sys._need_state(p)
    out = set()
    for e in sys.contexts:
        out |= range_of_state_for_context(sys, p, e)
    return frozenset(out)


def is_eigenstate(sys: ScopSystem, p: str, e: str) -> bool:
    return range_of_context_for_state(sys, e, p) == {p}


def is_eigencontext(sys: ScopSystem, e: str, p: str) -> bool:
    return range_of_state_for_context(sys, p, e) == {e}


def preparation(sys: ScopSystem, e: str) -> Optional[str]:
    """The state prepared by ``e``, or ``None`` if ``e`` is not a preparation."""
    reach = range_of_context(sys, e)
    return next(iter(reach)) if len(reach) == 1 else None


@dataclass
class CoupleReport:
    context: str
    state: str
    deterministic: bool
    image: Optional[Couple]
    eigenstate: bool
    eigencontext: bool

    def to_dict(self) -> dict:
        return {
            "e": self.context,
            "p": self.state,
            "deterministic": self.deterministic,
            "image": list(self.image) if self.image else None,
            "eigenstate": self.eigenstate,
            "eigencontext": self.eigencontext,
        }


@dataclass
class DeterminismReport:
    contexts: Dict[str, bool] = field(default_factory=dict)
    states: Dict[str, bool] = field(default_factory=dict)
    couples: List[CoupleReport] = field(default_factory=list)
    preparations: Dict[str, str] = field(default_factory=dict)

    @property
    def d_classical(self) -> bool:
        return all(self.contexts.values()) and all(self.states.values())

    def couple(self, e: str, p: str) -> CoupleReport:
        for c in self.couples:
            if c.context == e and c.state == p:
                return c
        raise UnknownId(f"no couple ({e}, {p})")

    def to_dict(self) -> dict:
        return {
            "d_classical": self.d_classical,
            "contexts": dict(self.contexts),
            "states": dict(self.states),
            "couples": [c.to_dict() for c in self.couples],
            "preparations": dict(self.preparations),
        }


def classify(sys: ScopSystem) -> DeterminismReport:
    """Determinism of contexts and states, couple by couple, with eigen-flags."""
    rep = DeterminismReport()
    det_ctx = {e: True for e in sys.contexts}
    det_state = {p: True for p in sys.states}
    for e in sys.contexts:
        for p in sys.states:
            r_ep = range_of_context_for_state(sys, e, p)
            r_pe = range_of_state_for_context(sys, p, e)
            ctx_det = len(r_ep) == 1
            st_det = len(r_pe) == 1
            det_ctx[e] &= ctx_det
            det_state[p] &= st_det
            image = (next(iter(r_pe)), next(iter(r_ep))) if ctx_det and st_det else None
            rep.couples.append(
                CoupleReport(e, p, ctx_det and st_det, image, r_ep == {p}, r_pe == {e})
            )
    rep.contexts = det_ctx
    rep.states = det_state
    for e in sys.contexts:
        prepared = preparation(sys, e)
        if prepared is not None:
            rep.preparations[e] = prepared
    return rep


def _factor_list(factors: Sequence[str]) -> List[str]:
    out = []
    for f in factors:
        if f not in out:
            out.append(f)
    if not out:
        raise EmptyFactorList("a product needs at least one factor")
    return out


def product_context(
    sys: ScopSystem,
    factors: Sequence[str],
    new_id: str,
    weights: Optional[Mapping[str, Fraction]] = None,
) -> ScopSystem:
    """Extend ``sys`` with the product context of ``factors``.

    Each row of the new context is the subset union of the factor rows.
    Repeated factors are dropped.  ``weights`` (one per distinct factor,
    normalized here) set the hidden choice used by
    :func:`sample_trajectory`; the default is uniform.
    """
    factors = _factor_list(factors)
    for e in factors:
        sys._need_context(e)
    if new_id in sys.context_set:
        raise DuplicateId(f"context {new_id!r} already exists")
    if weights is None:
        w = [Fraction(1, len(factors))] * len(factors)
    else:
        raw = [Fraction(weights[f]) for f in factors]
        total = sum(raw)
        w = [x / total for x in raw]
    mu = dict(sys.mu_table)
    for p in sys.states:
        merged: Dict[Couple, SubsetProb] = {}
        for e in factors:
            for fq, value in sys.rows.get((e, p), {}).items():
                merged[fq] = merged[fq] | value if fq in merged else value
        for (f, q), value in merged.items():
            mu[(f, q, new_id, p)] = value
    provenance = dict(sys.context_products)
    provenance[new_id] = tuple(zip(factors, w))
    return sys.replace(
        contexts=sys.contexts + (new_id,), mu_table=mu, context_products=provenance
    )


def product_state(sys: ScopSystem, factors: Sequence[str], new_id: str) -> ScopSystem:
    """Extend ``sys`` with the product state of ``factors``.

    Rows from the new state are subset unions of the factor rows, and its
    actual properties are the properties common to all factors.  Outcome
    maps of experiments are extended to the new rows;
    :class:`~scop.errors.OutcomeClash` is raised when two factors reach the
    same couple with different outcomes.
    """
    factors = _factor_list(factors)
    for p in factors:
        sys._need_state(p)
    if new_id in sys.state_set:
        raise DuplicateId(f"state {new_id!r} already exists")
    mu = dict(sys.mu_table)
    for e in sys.contexts:
        merged: Dict[Couple, SubsetProb] = {}
        for p in factors:
            for fq, value in sys.rows.get((e, p), {}).items():
                merged[fq] = merged[fq] | value if fq in merged else value
        for (f, q), value in merged.items():
            mu[(f, q, e, new_id)] = value
    experiments = {}
    for e, spec in sys.experiments.items():
        outcomes = dict(spec.outcomes)
        for p in factors:
            for (f, q), label in spec.row(p).items():
                key = (f, q, new_id)
                if key in outcomes and outcomes[key] != label:
                    raise OutcomeClash(
                        f"{e}: ({f},{q}) is reached with outcome {label_text(outcomes[key])!r} "
                        f"and {label_text(label)!r}"
                    )
                outcomes[key] = label
        experiments[e] = type(spec)(spec.context, outcomes, spec.spectrum)
    common = frozenset(sys.properties)
    for p in factors:
        common &= sys.xi_table[p]
    xi = dict(sys.xi_table)
    xi[new_id] = common
    provenance = dict(sys.state_products)
    provenance[new_id] = tuple(factors)
    return sys.replace(
        states=sys.states + (new_id,),
        mu_table=mu,
        xi_table=xi,
        experiments=experiments,
        state_products=provenance,
    )


def _resolve_context(sys: ScopSystem, e: str, rng: random.Random) -> str:
    while e in sys.context_products:
        factors = sys.context_products[e]
        e = _weighted_choice(rng, [f for f, _ in factors], [w for _, w in factors])
    return e


def _weighted_choice(rng: random.Random, items: Sequence, weights: Sequence[Fraction]):
    # exact: draw an integer below the common denominator
    den = 1
    for w in weights:
        den = den * w.denominator // _gcd(den, w.denominator)
    ticks = [int(w * den) for w in weights]
    total = sum(ticks)
    r = rng.randrange(total)
    for item, t in zip(items, ticks):
        if r < t:
            return item
        r -= t
    raise AssertionError("unreachable")


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def sample_trajectory(
    sys: ScopSystem, start: Couple, steps: int, seed: int
) -> List[Couple]:
    """Random walk on couples, ``steps`` transitions from ``start``.

    At a product context a factor is drawn first (the hidden choice, by
    the product's weights), then the factor's row is sampled.  Rows that
    are sampled must hold singleton probabilities summing to 1.  The
    returned list starts with ``start`` and has ``steps + 1`` couples.
    """
    e, p = start
    sys._need_context(e)
    sys._need_state(p)
    rng = random.Random(seed)
    path = [(e, p)]
    for _ in range(steps):
        base = _resolve_context(sys, e, rng)
        row = sys.rows.get((base, p), {})
        if not row:
            raise NonSingletonProbability(f"row ({base},{p}) is empty")
        targets = sorted(row)
        values = []
        for fq in targets:
            v = row[fq]
            if not v.is_singleton:
                raise NonSingletonProbability(
                    f"mu({fq[0]},{fq[1]},{base},{p}) = {v} is not a singleton"
                )
            values.append(v.value)
        if sum(values) != 1:
            raise NonSingletonProbability(
                f"row ({base},{p}) sums to {sum(values)}, not 1"
            )
        e, p = _weighted_choice(rng, targets, values)
        path.append((e, p))
    return path
