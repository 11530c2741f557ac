"""JSON reading and writing of systems in the system-definition file format."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict

from .core import ExperimentSpec, ScopSystem, label_text
from .subset_prob import SubsetProb, to_fraction

__all__ = [
    "system_from_dict",
    "system_to_dict",
    "experiment_from_dict",
    "experiment_to_dict",
    "load_system",
    "dump_system",
    "dumps",
]


def experiment_from_dict(data: Dict[str, Any]) -> ExperimentSpec:
    spectrum = data.get("spectrum")
    outcomes = {}
    for entry in data.get("outcomes", []):
        if "labelSubset" in entry:
            label = frozenset(entry["labelSubset"])
        else:
            label = entry["label"]
        outcomes[(entry["f"], entry["q"], entry["p"])] = label
    return ExperimentSpec(
        data["context"], outcomes, frozenset(spectrum) if spectrum is not None else None
    )


def experiment_to_dict(spec: ExperimentSpec) -> Dict[str, Any]:
    entries = []
    for (f, q, p), label in sorted(spec.outcomes.items()):
        row = {"f": f, "q": q, "p": p}
        if isinstance(label, frozenset):
            row["labelSubset"] = sorted(label)
        else:
            row["label"] = label
        entries.append(row)
    return {
        "context": spec.context,
        "spectrum": sorted(spec.spectrum) if spec.spectrum is not None else None,
        "outcomes": entries,
    }


def system_from_dict(data: Dict[str, Any]) -> ScopSystem:
    states, destruction = [], None
    for entry in data.get("states", []):
        if isinstance(entry, str):
            states.append(entry)
            continue
        states.append(entry["id"])
        if entry.get("destruction"):
            destruction = entry["id"]
    mu = {}
    for entry in data.get("mu", []):
        key = (entry["f"], entry["q"], entry["e"], entry["p"])
        value = SubsetProb.from_json(entry["prob"])
        mu[key] = mu[key] | value if key in mu else value
    experiments = {}
    for cid, spec in (data.get("experiments") or {}).items():
        spec = dict(spec)
        spec.setdefault("context", cid)
        experiments[cid] = experiment_from_dict(spec)
    products = data.get("products") or {}
    context_products = {}
    for cid, entry in (products.get("contexts") or {}).items():
        factors = entry["factors"]
        weights = entry.get("weights")
        if weights is None:
            context_products[cid] = list(factors)
        else:
            context_products[cid] = [(f, to_fraction(w)) for f, w in zip(factors, weights)]
    return ScopSystem(
        states=states,
        contexts=data.get("contexts", []),
        properties=data.get("properties", []),
        mu_table=mu,
        xi_table={p: props for p, props in (data.get("xi") or {}).items()},
        destruction=destruction,
        experiments=experiments,
        context_products=context_products,
        state_products=products.get("states") or {},
    )


def system_to_dict(sys: ScopSystem) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "states": [{"id": p, "destruction": p == sys.destruction} for p in sys.states],
        "contexts": list(sys.contexts),
        "properties": list(sys.properties),
        "xi": {p: sorted(sys.xi_table[p]) for p in sys.states},
        "mu": [
            {"f": f, "q": q, "e": e, "p": p, "prob": value.to_json()}
            for (f, q, e, p), value in sorted(sys.mu_table.items())
        ],
        "experiments": {e: experiment_to_dict(spec) for e, spec in sorted(sys.experiments.items())},
    }
    extra = {p: sorted(v) for p, v in sys.xi_table.items() if p not in sys.state_set}
    out["xi"].update(extra)
    if sys.context_products or sys.state_products:
        out["products"] = {
            "contexts": {
                c: {"factors": [f for f, _ in fs], "weights": [str(w) for _, w in fs]}
                for c, fs in sorted(sys.context_products.items())
            },
            "states": {s: list(fs) for s, fs in sorted(sys.state_products.items())},
        }
    return out


def _default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, SubsetProb):
        return obj.to_json()
    if isinstance(obj, (set, frozenset)):
        return sorted(label_text(x) if isinstance(x, frozenset) else x for x in obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(obj: Any, human: bool = False) -> str:
    """Deterministic JSON text (sorted keys)."""
    if human:
        return json.dumps(obj, indent=2, sort_keys=True, default=_default, ensure_ascii=False)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_default)


def load_system(path) -> ScopSystem:
    with open(path, encoding="utf-8") as fh:
        return system_from_dict(json.load(fh))


def dump_system(sys: ScopSystem, path=None, human: bool = True) -> str:
    text = dumps(system_to_dict(sys), human=human) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
