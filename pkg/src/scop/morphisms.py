"""
Morphisms between systems.

A morphism from the sub-entity ``S`` to the entity ``S'`` is a triple
``(m, l, n)`` with ``m: states(S') -> states(S)`` (contravariant) and
``l: contexts(S) -> contexts(S')``, ``n: properties(S) -> properties(S')``
(covariant).  For each experiment ``e`` of ``S`` a label map ``k[e]`` must
restrict to a bijection ``O(e, m(p')) -> O(l(e), p')`` for every ``p'``.

Composition follows the map directions.  For ``h: S1 -> S2`` and
``g: S2 -> S3``::

    states:    S3 --g.m--> S2 --h.m--> S1      m = h.m o g.m
    contexts:  S1 --h.l--> S2 --g.l--> S3      l = g.l o h.l
    properties S1 --h.n--> S2 --g.n--> S3      n = g.n o h.n
    labels     k[e] = g.k[h.l(e)] o h.k[e]
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

from .core import Label, ScopSystem, label_text
from .errors import CovarianceViolation, DomainMismatch, NotComposable
from .experiments import label_namespace, property_id, sco_to_scop
from .io import load_system
from .preorder import (
    check_property_completeness,
    check_state_completeness,
    join_states,
    meet_properties,
)
from .subset_prob import ZERO

__all__ = [
    "ScopMorphism",
    "ScoMorphism",
    "MorphismReport",
    "PreservationReport",
    "verify",
    "identity",
    "compose",
    "check_preservation",
    "verify_sco",
    "lift",
    "load_morphism",
]

LabelMaps = Mapping[str, Mapping[Label, Label]]


@dataclass(frozen=True)
class ScopMorphism:
    source: ScopSystem
    target: ScopSystem
    m: Mapping[str, str]
    l: Mapping[str, str]
    n: Mapping[str, str]
    k: LabelMaps = field(default_factory=dict)

    def __post_init__(self):
        for name in ("m", "l", "n"):
            object.__setattr__(self, name, dict(getattr(self, name)))
        object.__setattr__(self, "k", {e: dict(v) for e, v in self.k.items()})


@dataclass(frozen=True)
class ScoMorphism:
    """Morphism of systems of experiments: ``(m, l)`` plus label maps ``k``."""

    source: ScopSystem
    target: ScopSystem
    m: Mapping[str, str]
    l: Mapping[str, str]
    k: LabelMaps = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "m", dict(self.m))
        object.__setattr__(self, "l", dict(self.l))
        object.__setattr__(self, "k", {e: dict(v) for e, v in self.k.items()})


@dataclass
class MorphismReport:
    mu: List[dict] = field(default_factory=list)
    xi: List[dict] = field(default_factory=list)
    experiments: List[str] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not (self.mu or self.xi or self.experiments)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "covariance_mu": list(self.mu),
            "covariance_xi": list(self.xi),
            "experiments": list(self.experiments),
            "checked": self.checked,
        }


def _check_map(name: str, mapping, domain, codomain):
    missing = [x for x in domain if x not in mapping]
    if missing:
        raise DomainMismatch(f"{name} is not defined on {sorted(missing)}")
    outside = sorted({mapping[x] for x in domain} - set(codomain))
    if outside:
        raise DomainMismatch(f"{name} maps outside its codomain: {outside}")


def _check_domains(mor):
    S, T = mor.source, mor.target
    _check_map("m", mor.m, T.states, S.states)
    _check_map("l", mor.l, S.contexts, T.contexts)
    if isinstance(mor, ScopMorphism):
        _check_map("n", mor.n, S.properties, T.properties)


def _mu_violations(mor, report: MorphismReport, sample: Optional[int], seed: int):
    S, T, m, l = mor.source, mor.target, mor.m, mor.l
    if sample is not None:
        rng = random.Random(seed)
        for _ in range(sample):
            p, q = rng.choice(T.states), rng.choice(T.states)
            e, f = rng.choice(S.contexts), rng.choice(S.contexts)
            lhs = S.mu_table.get((f, m[q], e, m[p]), ZERO)
            rhs = T.mu_table.get((l[f], q, l[e], p), ZERO)
            report.checked += 1
            if lhs != rhs:
                report.mu.append(_mu_entry(f, q, e, p, lhs, rhs))
        return
    pre_m: Dict[str, List[str]] = {}
    for q in T.states:
        pre_m.setdefault(m[q], []).append(q)
    pre_l: Dict[str, List[str]] = {}
    for f in S.contexts:
        pre_l.setdefault(l[f], []).append(f)
    for e in S.contexts:
        for p in T.states:
            lhs = {}
            for (f, q), value in S.rows.get((e, m[p]), {}).items():
                for q2 in pre_m.get(q, ()):
                    lhs[(f, q2)] = value
            rhs = {}
            for (g, q2), value in T.rows.get((l[e], p), {}).items():
                for f in pre_l.get(g, ()):
                    rhs[(f, q2)] = value
            report.checked += len(S.contexts) * len(T.states)
            for f, q in sorted(set(lhs) | set(rhs)):
                a, b = lhs.get((f, q), ZERO), rhs.get((f, q), ZERO)
                if a != b:
                    report.mu.append(_mu_entry(f, q, e, p, a, b))


def _mu_entry(f, q, e, p, lhs, rhs) -> dict:
    return {"f": f, "q'": q, "e": e, "p'": p, "source": str(lhs), "target": str(rhs)}


def _experiment_violations(mor, report: MorphismReport):
    S, T = mor.source, mor.target
    for e in sorted(S.experiments):
        if e not in S.context_set:
            continue
        le = mor.l[e]
        if le not in T.experiments:
            report.experiments.append(f"{e!r} is an experiment but l({e}) = {le!r} is not")
            continue
        k = mor.k.get(e)
        if k is None:
            report.experiments.append(f"no label map k for experiment {e!r}")
            continue
        src, tgt = S.experiments[e], T.experiments[le]
        for p in T.states:
            here = set(src.row(mor.m[p]).values())
            there = set(tgt.row(p).values())
            unmapped = [x for x in here if x not in k]
            if unmapped:
                report.experiments.append(
                    f"k[{e}] undefined on {sorted(map(label_text, unmapped))} (state {p!r})"
                )
                continue
            image = [k[x] for x in here]
            if len(set(image)) != len(image) or set(image) != there:
                report.experiments.append(
                    f"k[{e}] is not a bijection O({e},{mor.m[p]}) -> O({le},{p}): "
                    f"{sorted(map(label_text, here))} -> {sorted(map(label_text, there))}"
                )


def verify(mor: ScopMorphism, sample: Optional[int] = None, seed: int = 0) -> MorphismReport:
    """Check both covariance conditions and the experiment condition.

    The check is exhaustive unless ``sample`` is given, in which case
    that many random ``(f, q', e, p')`` tuples are drawn for the ``mu``
    condition.  Violations are listed in lexicographic tuple order.
    """
    _check_domains(mor)
    report = MorphismReport()
    _mu_violations(mor, report, sample, seed)
    S, T = mor.source, mor.target
    for p in T.states:
        here = S.xi_table[mor.m[p]]
        there = T.xi_table[p]
        for a in S.properties:
            report.checked += 1
            if (a in here) != (mor.n[a] in there):
                report.xi.append({"a": a, "p'": p, "source": a in here, "target": mor.n[a] in there})
    _experiment_violations(mor, report)
    return report


def identity(sys: ScopSystem) -> ScopMorphism:
    k = {e: {x: x for x in spec.outcomes.values()} for e, spec in sys.experiments.items()}
    return ScopMorphism(
        sys,
        sys,
        {p: p for p in sys.states},
        {e: e for e in sys.contexts},
        {a: a for a in sys.properties},
        k,
    )


def compose(g: ScopMorphism, h: ScopMorphism) -> ScopMorphism:
    """``g o h``: apply ``h: S1 -> S2`` first, then ``g: S2 -> S3``."""
    if h.target != g.source:
        raise NotComposable("target of the first morphism is not the source of the second")
    m = {p: h.m[g.m[p]] for p in g.target.states}
    l = {e: g.l[h.l[e]] for e in h.source.contexts}
    n = {a: g.n[h.n[a]] for a in h.source.properties}
    k = {}
    for e, ke in h.k.items():
        outer = g.k.get(h.l.get(e), {})
        k[e] = {x: outer[y] for x, y in ke.items() if y in outer}
    return ScopMorphism(h.source, g.target, m, l, n, k)


@dataclass
class PreservationReport:
    states: List[str] = field(default_factory=list)
    properties: List[str] = field(default_factory=list)
    meets: List[str] = field(default_factory=list)
    joins: List[str] = field(default_factory=list)
    complete: bool = False

    @property
    def ok(self) -> bool:
        return not (self.states or self.properties or self.meets or self.joins)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "complete": self.complete,
            "state_order": list(self.states),
            "property_order": list(self.properties),
            "meets": list(self.meets),
            "joins": list(self.joins),
        }


def check_preservation(mor: ScopMorphism, lattice: Optional[bool] = None) -> PreservationReport:
    """Order preservation, and meet/join preservation on complete pairs.

    ``p' < q'`` iff ``m(p') < m(q')`` and ``a < b`` iff ``n(a) < n(b)`` are
    checked for all pairs.  If both systems are property and state
    complete, ``n`` must send meets of properties (the empty family and
    all pairs) to meets and ``m`` joins of state pairs to joins, up to
    equivalence.  ``lattice=True`` demands completeness and raises
    :class:`~scop.errors.NotComplete` without it; ``False`` skips these
    clauses.
    """
    from .errors import NotComplete

    S, T = mor.source, mor.target
    rep = PreservationReport()
    for p in T.states:
        for q in T.states:
            lhs = T.xi_table[q] <= T.xi_table[p]
            rhs = S.xi_table[mor.m[q]] <= S.xi_table[mor.m[p]]
            if lhs != rhs:
                rep.states.append(f"{p!r} < {q!r} is {lhs} but m({p}) < m({q}) is {rhs}")
    for a in S.properties:
        for b in S.properties:
            lhs = S.kappa_table[a] <= S.kappa_table[b]
            rhs = T.kappa_table[mor.n[a]] <= T.kappa_table[mor.n[b]]
            if lhs != rhs:
                rep.properties.append(f"{a!r} < {b!r} is {lhs} but n({a}) < n({b}) is {rhs}")
    complete = all(
        chk(X).complete for X in (S, T) for chk in (check_property_completeness, check_state_completeness)
    )
    rep.complete = complete
    if lattice is False:
        return rep
    if not complete:
        if lattice:
            raise NotComplete("meet and join preservation need complete systems")
        return rep
    families = [()] + [(a,) for a in S.properties] + list(combinations(S.properties, 2))
    for fam in families:
        meet = min(meet_properties(S, fam))
        if mor.n[meet] not in meet_properties(T, [mor.n[a] for a in fam]):
            rep.meets.append(f"n(meet{list(fam)}) = {mor.n[meet]!r} is not a meet of the images")
    for fam in [()] + [(p,) for p in T.states] + list(combinations(T.states, 2)):
        join = min(join_states(T, fam))
        if mor.m[join] not in join_states(S, [mor.m[p] for p in fam]):
            rep.joins.append(f"m(join{list(fam)}) = {mor.m[join]!r} is not a join of the images")
    return rep


def verify_sco(mor: ScoMorphism) -> MorphismReport:
    """Covariance of ``mu`` and the outcome condition for a morphism of systems of experiments.

    Besides the per-state bijections, each ``k[e]`` must be injective on
    ``O(e)``, which is what lifting to properties needs.
    """
    _check_domains(mor)
    report = MorphismReport()
    _mu_violations(mor, report, None, 0)
    _experiment_violations(mor, report)
    for e, ke in sorted(mor.k.items()):
        spec = mor.source.experiments.get(e)
        if spec is None:
            continue
        labels = set(spec.outcomes.values())
        images = [ke[x] for x in labels if x in ke]
        if len(set(images)) != len(images):
            report.experiments.append(f"k[{e}] is not injective on O({e})")
    return report


def lift(mor: ScoMorphism, cap: int = 4096) -> ScopMorphism:
    """Lift to the generated systems with ``n(e, A) = (l(e), k(A))``."""
    report = verify_sco(mor)
    if not report.ok:
        raise CovarianceViolation(f"not a morphism of systems of experiments: {report.to_dict()}")
    src, tgt = sco_to_scop(mor.source, cap), sco_to_scop(mor.target, cap)
    ns_src, ns_tgt = label_namespace(mor.source), label_namespace(mor.target)
    n: Dict[str, str] = {}
    k: Dict[str, Dict[str, str]] = {}
    for e in src.experiments:
        le = mor.l[e]
        back = {new: old for old, new in ns_src[e].items()}
        ke = {}
        for new, old in back.items():
            if old not in mor.k[e]:
                raise DomainMismatch(f"k[{e}] undefined on outcome {label_text(old)!r}")
            ke[new] = ns_tgt[le][mor.k[e][old]]
        k[e] = ke
    for pid in src.properties:
        e, A = _property_meaning(src, pid)
        n[pid] = property_id(mor.l[e], (k[e][x] for x in A))
    return ScopMorphism(src, tgt, mor.m, mor.l, n, k)


def _property_meaning(sys: ScopSystem, pid: str) -> Tuple[str, frozenset]:
    # context ids may contain ":"; take the longest experiment prefix
    for cand in sorted(sys.experiments, key=len, reverse=True):
        if pid.startswith(cand + ":{"):
            e, rest = cand, pid[len(cand) + 2:]
            break
    else:
        raise DomainMismatch(f"{pid!r} is not a generated property")
    inner = rest[:-1]
    return e, frozenset(inner.split("|")) if inner else frozenset()


def _relabel(spec_labels, raw: Mapping[str, str]) -> Dict[Label, Label]:
    by_text = {label_text(x): x for x in spec_labels}
    return {by_text.get(a, a): by_text.get(b, b) for a, b in raw.items()}


def load_morphism(path):
    """Read a morphism file; ``source``/``target`` paths are relative to it.

    Returns a :class:`ScopMorphism` when the file has an ``n`` map and a
    :class:`ScoMorphism` otherwise.
    """
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    base = path.parent
    S = load_system(base / data["source"])
    T = load_system(base / data["target"])
    k = {}
    for e, raw in (data.get("k") or {}).items():
        labels = list(S.experiments[e].outcomes.values()) if e in S.experiments else []
        le = data.get("l", {}).get(e)
        if le in T.experiments:
            labels += list(T.experiments[le].outcomes.values())
        k[e] = _relabel(labels, raw)
    if "n" in data:
        return ScopMorphism(S, T, data["m"], data["l"], data["n"], k)
    return ScoMorphism(S, T, data["m"], data["l"], k)
