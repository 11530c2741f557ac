"""
Command-line interface.

Every subcommand prints a JSON report (compact with sorted keys, or
indented with ``--human``).  Exit status is 0 on success, 1 when a
requested check fails and 2 when the input cannot be used.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from . import __version__
from .core import ScopSystem, label_text, validate
from .demos import WaveFunction, build_classical_scop, build_quantum_scop, equal_blocks
from .dynamics import classify, product_context, product_state, sample_trajectory
from .errors import ScopError
from .experiments import (
    find_test,
    is_cascade_experiment,
    is_first_kind,
    is_first_kind_experiment,
    is_operational_entity,
    outcomes_total,
    product_experiment,
    sco_to_scop,
)
from .generate import PROFILES, generate
from .io import dump_system, dumps, load_system
from .morphisms import ScoMorphism, ScopMorphism, check_preservation, lift, load_morphism, verify
from .preorder import (
    check_property_completeness,
    check_state_completeness,
    classify_proper,
    equivalence_classes,
    hasse_edges,
    property_view,
    state_view,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SECTIONS = ("validation", "order", "dynamics", "experiments")


class UsageError(Exception):
    pass


def _emit(report, args) -> None:
    print(dumps(report, human=getattr(args, "human", False)))


def _seed(args) -> int:
    env = os.environ.get("SCOP_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"SCOP_SEED must be an integer, got {env!r}") from None
    return args.seed


def _write_or_print(system: ScopSystem, args, summary: dict) -> int:
    if args.out:
        dump_system(system, args.out, human=True)
        _emit({**summary, "written": str(args.out)}, args)
    else:
        print(dump_system(system, human=args.human), end="")
    return EXIT_OK


def _split(text: str) -> List[str]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise UsageError("expected a comma separated list of ids")
    return items


# -- sections ---------------------------------------------------------------

def order_section(system: ScopSystem) -> dict:
    sv, pv = state_view(system), property_view(system)
    prop_c, state_c = check_property_completeness(system), check_state_completeness(system)
    return {
        "state_classes": equivalence_classes(sv),
        "property_classes": equivalence_classes(pv),
        "state_hasse": hasse_edges(sv),
        "property_hasse": hasse_edges(pv),
        "property_completeness": prop_c.to_dict(),
        "state_completeness": state_c.to_dict(),
        "proper": classify_proper(system),
    }


def experiments_section(system: ScopSystem) -> dict:
    out = {}
    for e in sorted(system.experiments):
        if e not in system.context_set:
            continue
        entry = {
            "outcomes": sorted(label_text(x) for x in outcomes_total(system, e)),
            "first_kind_context": is_first_kind(system, e).ok,
            "first_kind_experiment": is_first_kind_experiment(system, e).ok,
            "tests": {},
        }
        for a in system.properties:
            A = find_test(system, a, e)
            if A is not None:
                entry["tests"][a] = sorted(label_text(x) for x in A)
        if system.experiments[e].spectrum is not None:
            rep = is_cascade_experiment(system, e)
            entry["cascade"] = {"ok": rep.ok, "violations": rep.violations}
        out[e] = entry
    op = is_operational_entity(system)
    return {"per_experiment": out, "operational": op.operational, "operational_failures": op.failures[:50]}


def destruction_section(system: ScopSystem) -> Optional[dict]:
    zero = system.destruction
    if zero is None:
        return None
    missing = sorted(system.property_set - system.xi_table[zero])
    universal = [a for a in system.properties if len(system.kappa_table[a]) == len(system.states)]
    return {
        "state": zero,
        "actual_properties": len(system.xi_table[zero]),
        "tension": bool(not universal and missing),
        "note": (
            "property completeness needs a property actual in every state, "
            "including the destruction state"
            if not universal
            else "a property actual in every state exists"
        ),
    }


# -- commands ---------------------------------------------------------------

def cmd_validate(args) -> int:
    rep = validate(load_system(args.file))
    _emit(rep.to_dict(), args)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_analyze(args) -> int:
    system = load_system(args.file)
    sections = args.sections or list(SECTIONS)
    report: Dict[str, object] = {}
    ok = True
    if "validation" in sections:
        rep = validate(system)
        report["validation"] = rep.to_dict()
        ok = rep.ok
    if "order" in sections:
        report["order"] = order_section(system)
    if "dynamics" in sections:
        report["dynamics"] = classify(system).to_dict()
    if "experiments" in sections:
        report["experiments"] = experiments_section(system)
    _emit(report, args)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_complete(args) -> int:
    system = load_system(args.file)
    prop_c, state_c = check_property_completeness(system), check_state_completeness(system)
    report = {
        "property_completeness": prop_c.to_dict(),
        "state_completeness": state_c.to_dict(),
        "destruction_state": destruction_section(system),
    }
    _emit(report, args)
    return EXIT_OK if prop_c.complete and state_c.complete else EXIT_FAIL


def cmd_verify(args) -> int:
    system = load_system(args.file)
    if args.cascade:
        rep = is_cascade_experiment(system, args.cascade)
        _emit(rep.to_dict(), args)
        return EXIT_OK if rep.ok else EXIT_FAIL
    if args.first_kind:
        ctx = is_first_kind(system, args.first_kind)
        exp = is_first_kind_experiment(system, args.first_kind)
        _emit({"context": ctx.to_dict(), "experiment": exp.to_dict()}, args)
        return EXIT_OK if exp.ok else EXIT_FAIL
    rep = is_operational_entity(system, strict=args.strict)
    _emit(rep.to_dict(), args)
    return EXIT_OK if rep.operational else EXIT_FAIL


def cmd_construct(args) -> int:
    system = sco_to_scop(load_system(args.from_sco), cap=args.cap)
    return _write_or_print(system, args, {"properties": len(system.properties)})


def cmd_product(args) -> int:
    system = load_system(args.file)
    if args.contexts:
        factors = _split(args.contexts)
        if args.experiment:
            system = product_experiment(system, factors, args.id)
        else:
            system = product_context(system, factors, args.id)
    else:
        system = product_state(system, _split(args.states), args.id)
    return _write_or_print(system, args, {"added": args.id})


def cmd_morphism(args) -> int:
    if args.action == "verify":
        mor = load_morphism(args.file)
        if not isinstance(mor, ScopMorphism):
            raise UsageError("morphism file has no n map; use 'morphism lift --sco' for SCO morphisms")
        rep = verify(mor, sample=args.sample, seed=_seed(args))
        report = {"morphism": rep.to_dict()}
        if rep.ok:
            report["preservation"] = check_preservation(mor).to_dict()
        _emit(report, args)
        return EXIT_OK if rep.ok and report["preservation"]["ok"] else EXIT_FAIL
    if not args.sco:
        raise UsageError("morphism lift needs --sco FILE")
    mor = load_morphism(args.sco)
    if not isinstance(mor, ScoMorphism):
        raise UsageError("expected an SCO morphism file (no n map)")
    lifted = lift(mor, cap=args.cap)
    rep = verify(lifted)
    _emit({"n": dict(sorted(lifted.n.items())), "morphism": rep.to_dict()}, args)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_demo(args) -> int:
    if args.kind == "quantum":
        x0, x1 = 0.0, 4.0
        if args.shape == "uniform":
            psi = WaveFunction.uniform(x0, x1, args.grid)
        else:
            psi = WaveFunction.gaussian(x0, x1, args.grid, center=2.0, width=0.5)
        demo = build_quantum_scop(
            psi, equal_blocks(args.grid, args.blocks), destruction=args.destruction
        )
        summary = {"states": len(demo.system.states), "weights": {b: str(w) for b, w in demo.weights.items()}}
        return _write_or_print(demo.system, args, summary)
    particles = []
    for chunk in args.particles.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            u, mv = (float(v) for v in chunk.split(","))
        except ValueError:
            raise UsageError(f"bad particle {chunk!r}; expected u,mv") from None
        particles.append((u, mv))
    demo = build_classical_scop(particles)
    return _write_or_print(demo.system, args, {"states": len(demo.system.states)})


def cmd_sample(args) -> int:
    system = load_system(args.file)
    parts = _split(args.start)
    if len(parts) != 2:
        raise UsageError("--start expects e,p")
    path = sample_trajectory(system, (parts[0], parts[1]), args.steps, _seed(args))
    for e, p in path:
        print(f"{e}\t{p}")
    return EXIT_OK


def cmd_generate(args) -> int:
    system = generate(_seed(args), args.states, args.contexts, args.properties, args.profile)
    return _write_or_print(system, args, {"profile": args.profile, "states": len(system.states)})


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--human", action="store_true", help="indented output")
    parser = argparse.ArgumentParser(
        prog="scop", description="Finite state-context-property systems", parents=[common]
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func: Callable, help: str):
        p = sub.add_parser(name, help=help, parents=[common])
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check basic constraints")
    p.add_argument("file", type=Path)

    p = add("analyze", cmd_analyze, "full report")
    p.add_argument("file", type=Path)
    p.add_argument("--sections", nargs="+", choices=SECTIONS)

    p = add("complete", cmd_complete, "property and state completeness")
    p.add_argument("file", type=Path)

    p = add("verify", cmd_verify, "check one experiment or the whole entity")
    p.add_argument("file", type=Path)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--cascade", metavar="E")
    g.add_argument("--first-kind", metavar="E")
    g.add_argument("--operational", action="store_true")
    p.add_argument("--strict", action="store_true", help="literal pairwise disjointness")

    p = add("construct", cmd_construct, "system of properties from a system of experiments")
    p.add_argument("--from-sco", type=Path, required=True)
    p.add_argument("--cap", type=int, default=4096)
    p.add_argument("--out", type=Path)

    p = add("product", cmd_product, "add a product context or state")
    p.add_argument("file", type=Path)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--contexts")
    g.add_argument("--states")
    p.add_argument("--id", required=True)
    p.add_argument("--experiment", action="store_true", help="merge outcome maps of the factor experiments")
    p.add_argument("--out", type=Path)

    p = add("morphism", cmd_morphism, "verify or lift morphisms")
    p.add_argument("action", choices=["verify", "lift"])
    p.add_argument("file", type=Path, nargs="?")
    p.add_argument("--sco", type=Path)
    p.add_argument("--cap", type=int, default=4096)
    p.add_argument("--sample", type=int)
    p.add_argument("--seed", type=int, default=0)

    p = add("demo", cmd_demo, "worked examples")
    p.add_argument("kind", choices=["quantum", "classical"])
    p.add_argument("--grid", type=int, default=1024)
    p.add_argument("--shape", choices=["uniform", "gaussian"], default="uniform")
    p.add_argument("--blocks", type=int, default=4)
    p.add_argument("--destruction", action="store_true")
    p.add_argument("--particles", default="0,0")
    p.add_argument("--out", type=Path)

    p = add("sample", cmd_sample, "random trajectory")
    p.add_argument("file", type=Path)
    p.add_argument("--start", required=True)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)

    p = add("generate", cmd_generate, "random system")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--states", type=int, default=4)
    p.add_argument("--contexts", type=int, default=2)
    p.add_argument("--properties", type=int, default=4)
    p.add_argument("--profile", choices=PROFILES, default="generic")
    p.add_argument("--out", type=Path)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"scop: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"scop: cannot read input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScopError, KeyError, ValueError, TypeError) as exc:
        print(f"scop: {exc}", file=sys.stderr)
        return EXIT_USAGE


run = main

if __name__ == "__main__":
    sys.exit(main())
