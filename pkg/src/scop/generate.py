"""
Seeded random systems and morphism fixtures.

Three profiles are available through :func:`generate`:

``generic``
    random sparse transition table (singleton or interval valued) and a
    random actual-property map;
``d-classical``
    every couple has exactly one image, with probability ``{1}``;
``operational``
    a random system of experiments closed under products of states and
    of experiments, turned into a system by :func:`~scop.experiments.sco_to_scop`.
"""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence

from .core import ExperimentSpec, ScopSystem
from .dynamics import product_state
from .experiments import product_experiment, sco_to_scop
from .morphisms import ScoMorphism, ScopMorphism
from .subset_prob import ONE, SubsetProb

__all__ = [
    "PROFILES",
    "generate",
    "random_distribution",
    "random_sco",
    "close_under_products",
    "twin_expansion",
    "relabel_isomorphism",
    "twin_sco",
]

PROFILES = ("generic", "d-classical", "operational")


def random_distribution(rng: random.Random, k: int, max_den: int = 12) -> List[Fraction]:
    """``k`` positive rationals summing to exactly 1."""
    den = rng.randint(k, max(k, max_den))
    cuts = sorted(rng.sample(range(1, den), k - 1)) if k > 1 else []
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return [Fraction(x, den) for x in parts]


def _random_interval(rng: random.Random, den: int = 10) -> SubsetProb:
    lo = rng.randint(0, den - 1)
    hi = rng.randint(lo + 1, den)
    return SubsetProb.interval(Fraction(lo, den), Fraction(hi, den))


def _random_xi(rng: random.Random, states, props, density: float) -> Dict[str, frozenset]:
    return {p: frozenset(a for a in props if rng.random() < density) for p in states}


def _generic(rng: random.Random, n_s: int, n_c: int, n_p: int) -> ScopSystem:
    states = [f"p{i}" for i in range(n_s)]
    contexts = [f"e{i}" for i in range(n_c)]
    props = [f"a{i}" for i in range(n_p)]
    couples = [(f, q) for f in contexts for q in states]
    singleton = rng.random() < 0.5
    mu = {}
    for e in contexts:
        for p in states:
            k = rng.randint(1, min(3, len(couples)))
            targets = rng.sample(couples, k)
            if singleton:
                values = [SubsetProb.point(x) for x in random_distribution(rng, k)]
            else:
                values = [_random_interval(rng) for _ in targets]
            for (f, q), v in zip(targets, values):
                mu[(f, q, e, p)] = v
    xi = _random_xi(rng, states, props, rng.choice([0.25, 0.5, 0.75]))
    return ScopSystem(states, contexts, props, mu, xi)


def _d_classical(rng: random.Random, n_s: int, n_c: int, n_p: int) -> ScopSystem:
    states = [f"p{i}" for i in range(n_s)]
    contexts = [f"e{i}" for i in range(n_c)]
    props = [f"a{i}" for i in range(n_p)]
    mu = {}
    for e in contexts:
        for p in states:
            mu[(rng.choice(contexts), rng.choice(states), e, p)] = ONE
    xi = _random_xi(rng, states, props, 0.5)
    return ScopSystem(states, contexts, props, mu, xi)


def random_sco(
    rng: random.Random,
    n_states: int = 3,
    n_experiments: int = 2,
    closure: str = "full",
    destruction: bool = True,
) -> ScopSystem:
    """A random system of experiments, optionally closed under products.

    Base states ``s0..`` and base experiments ``x0..`` with two or three
    outcomes ``"x0:o1"``; every outcome leads to its own base state, and
    each base state gets a random nonempty outcome row with singleton
    probabilities summing to 1.  The destruction state ``"0"`` stays where
    it is and yields no outcome.  ``closure`` is ``"none"``, ``"pairs"``
    (products of two factors) or ``"full"`` (see :func:`close_under_products`).
    """
    states = [f"s{i}" for i in range(n_states)]
    exps = [f"x{i}" for i in range(n_experiments)]
    mu, specs = {}, {}
    for e in exps:
        n_out = rng.randint(min(2, n_states), min(3, n_states))
        labels = [f"{e}:o{j}" for j in range(n_out)]
        target = dict(zip(labels, rng.sample(states, n_out)))
        outcomes = {}
        for p in states:
            row = rng.sample(labels, rng.randint(1, n_out))
            for x, v in zip(row, random_distribution(rng, len(row))):
                mu[(e, target[x], e, p)] = SubsetProb.point(v)
                outcomes[(e, target[x], p)] = x
        if destruction:
            mu[(e, "0", e, "0")] = ONE
        specs[e] = ExperimentSpec(e, outcomes)
    all_states = states + (["0"] if destruction else [])
    sco = ScopSystem(
        all_states, exps, (), mu, {}, destruction="0" if destruction else None, experiments=specs
    )
    if closure == "none":
        return sco
    return close_under_products(sco, states, exps, max_size=2 if closure == "pairs" else None)


def close_under_products(
    sco: ScopSystem,
    states: Sequence[str],
    experiments: Sequence[str],
    max_size: Optional[int] = None,
) -> ScopSystem:
    """Add product states and product experiments of every subset of the given bases.

    Repeating binary products until nothing new appears reaches the
    products of all subsets (a product of products has the rows of the
    product of the flattened factors), so the default adds those directly.
    ``max_size=2`` stops at products of two factors.
    """
    top = max_size or max(len(states), len(experiments))
    for r in range(2, min(top, len(states)) + 1):
        for fs in combinations(states, r):
            sco = product_state(sco, fs, f"P{{{'+'.join(fs)}}}")
    for r in range(2, min(top, len(experiments)) + 1):
        for fs in combinations(experiments, r):
            sco = product_experiment(sco, fs, f"X{{{'+'.join(fs)}}}")
    return sco


def _operational(rng: random.Random, n_s: int, n_c: int, cap: int = 4096) -> ScopSystem:
    sco = random_sco(rng, max(1, min(n_s, 4)), max(1, min(n_c, 3)))
    return sco_to_scop(sco, cap)


def generate(
    seed: int,
    n_states: int = 4,
    n_contexts: int = 2,
    n_properties: int = 4,
    profile: str = "generic",
) -> ScopSystem:
    """Random valid system of the given profile, deterministic per ``seed``.

    For ``operational`` the sizes count base states (at most 4) and base
    experiments (at most 3); the properties are generated.
    """
    if min(n_states, n_contexts, n_properties) < 1:
        raise ValueError("sizes must be at least 1")
    rng = random.Random(seed)
    if profile == "generic":
        return _generic(rng, n_states, n_contexts, n_properties)
    if profile == "d-classical":
        return _d_classical(rng, n_states, n_contexts, n_properties)
    if profile == "operational":
        return _operational(rng, n_states, n_contexts)
    raise ValueError(f"unknown profile {profile!r}; expected one of {PROFILES}")


# -- morphism fixtures -----------------------------------------------------

def _targets(sys: ScopSystem) -> set:
    return {q for (_, q, _, _) in sys.mu_table}


def twin_expansion(
    sys: ScopSystem,
    rng: random.Random,
    extra_contexts: int = 0,
    extra_properties: int = 0,
    tag: str = "'",
) -> ScopMorphism:
    """A bigger system ``S'`` with a quotient morphism ``S -> S'``.

    Every state of ``S`` gets one or two copies in ``S'``.  When ``S`` has
    states that no transition reaches, only those are doubled, so numeric
    rows stay normalized; otherwise any state may be doubled and the
    copies of a reached state share its probability.  ``m`` sends each copy back to its
    original, ``l`` and ``n`` are inclusions.  Extra contexts only map
    states to themselves; an extra property is actual on the copies of a
    down-set of ``S``'s state order, so order reflection still holds.
    Experiments of ``S`` are dropped.
    """
    unreached = [p for p in sys.states if p not in _targets(sys)]
    may_twin = set(unreached) if unreached else set(sys.states)
    copies: Dict[str, List[str]] = {}
    for p in sys.states:
        n = 2 if p in may_twin and rng.random() < 0.5 else 1
        copies[p] = [f"{p}{tag}{i}" for i in range(n)]
    m = {c: p for p, cs in copies.items() for c in cs}
    states2 = [c for p in sys.states for c in copies[p]]
    mu = {}
    for (f, q, e, p), v in sys.mu_table.items():
        for q2 in copies[q]:
            for p2 in copies[p]:
                mu[(f, q2, e, p2)] = v
    contexts2 = list(sys.contexts)
    for i in range(extra_contexts):
        g = f"ctx{tag}{i}"
        contexts2.append(g)
        for p2 in states2:
            mu[(g, p2, g, p2)] = ONE
    xi = {c: sys.xi_table[m[c]] for c in states2}
    props2 = list(sys.properties)
    for i in range(extra_properties):
        a = f"prop{tag}{i}"
        props2.append(a)
        r = rng.choice(sys.states)
        down = {s for s in sys.states if sys.xi_table[r] <= sys.xi_table[s]}
        for c in states2:
            if m[c] in down:
                xi[c] = xi[c] | {a}
    sp = {c: tuple(x for f in fs for x in copies[f][:1]) for p, fs in sys.state_products.items() for c in copies[p]}
    destruction = copies[sys.destruction][0] if sys.destruction else None
    target = ScopSystem(
        states2,
        contexts2,
        props2,
        mu,
        xi,
        destruction=destruction,
        context_products=sys.context_products,
        state_products=sp,
    )
    source = sys.replace(experiments={})
    return ScopMorphism(
        source,
        target,
        m,
        {e: e for e in sys.contexts},
        {a: a for a in sys.properties},
    )


def relabel_isomorphism(sco: ScopSystem, rng: random.Random) -> ScoMorphism:
    """Rename every state and permute the outcomes of each base experiment."""
    base = [e for e in sco.contexts if e in sco.experiments and e not in sco.context_products]
    perm: Dict[str, str] = {}
    for e in base:
        labels = sorted(set(sco.experiments[e].outcomes.values()))
        shuffled = labels[:]
        rng.shuffle(shuffled)
        perm.update(zip(labels, shuffled))
    rename = {p: f"{p}~" for p in sco.states}
    mu = {(f, rename[q], e, rename[p]): v for (f, q, e, p), v in sco.mu_table.items()}
    exps = {}
    for e, spec in sco.experiments.items():
        exps[e] = ExperimentSpec(
            e, {(f, rename[q], rename[p]): perm.get(x, x) for (f, q, p), x in spec.outcomes.items()}
        )
    target = ScopSystem(
        [rename[p] for p in sco.states],
        sco.contexts,
        (),
        mu,
        {},
        destruction=rename.get(sco.destruction) if sco.destruction else None,
        experiments=exps,
        context_products=sco.context_products,
        state_products={rename[s]: tuple(rename[f] for f in fs) for s, fs in sco.state_products.items()},
    )
    k = {e: {x: perm.get(x, x) for x in spec.outcomes.values()} for e, spec in sco.experiments.items()}
    return ScoMorphism(sco, target, {rename[p]: p for p in sco.states}, {e: e for e in sco.contexts}, k)


def twin_sco(sco: ScopSystem, rng: random.Random) -> ScoMorphism:
    """Duplicate never-reached states of a system of experiments, keeping outcomes."""
    mor = twin_expansion(sco, rng, tag="^")
    T, m = mor.target, mor.m
    pre: Dict[str, List[str]] = {}
    for c, p in m.items():
        pre.setdefault(p, []).append(c)
    exps = {}
    for e, spec in sco.experiments.items():
        out = {}
        for (f, q, p), x in spec.outcomes.items():
            for q2 in pre[q]:
                for p2 in pre[p]:
                    out[(f, q2, p2)] = x
        exps[e] = ExperimentSpec(e, out)
    target = T.replace(experiments=exps)
    k = {e: {x: x for x in spec.outcomes.values()} for e, spec in sco.experiments.items()}
    return ScoMorphism(sco, target, m, {e: e for e in sco.contexts}, k)
