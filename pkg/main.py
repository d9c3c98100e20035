# main.py
"""
Command-line interface for the perturbed-hamiltonicity toolkit.

Subcommands: generate, perturb, solve, check, sweep. Structures are read and
written in the edge-list text format; results are printed to stdout as JSON.
Log records go to stderr and to the log file under ``settings.LOG_DIR``.

Exit codes: 0 when the command ran (whether or not a witness exists),
2 when it raised a package error (the JSON body then has "error" and "detail").
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

import settings
from src.perturbed import __version__
from src.perturbed.errors import HypothesisViolation, ParameterError, PerturbedError
from src.perturbed.exact import (
    bipartite_max_matching,
    cycle_witnesses,
    find_hamilton_cycle_exact,
    find_loose_hamilton_exact,
    find_perfect_matching_hypergraph_exact,
    vertex_disjoint_paths,
)
from src.perturbed.expansion import ExpansionMode, check_expansion, hamilton_via_expansion
from src.perturbed.generators import GENERATORS, build_base
from src.perturbed.harness import emit, load_experiment_config, sweep
from src.perturbed.hyperpipe import PipelineConfig, TemplateMode, find_spanning_structure
from src.perturbed.perturb import PerturbMode, PerturbSpec, perturb
from src.perturbed.structures import BipartiteGraph, Digraph, Graph, KUniformHypergraph, Tournament
from src.perturbed.textio import dumps, read_structure, write_structure
from src.perturbed.tourney import arc_disjoint_hamilton_cycles, is_t_strongly_connected

logger = logging.getLogger(__name__)

SOLVE_PROBLEMS = [
    "hamilton",
    "pancyclic",
    "hyper-matching",
    "loose-cycle",
    "matching",
    "paths",
    "hamilton-expansion",
    "hyper",
]


# --- Logging Setup ---
def setup_logging() -> None:
    settings.LOG_DIR.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(settings.LOG_FILE),
            logging.StreamHandler(),
        ]
    )


def _print(payload: Dict[str, Any]) -> None:
    print(json.dumps(payload, sort_keys=True))


def _parse_value(text: str) -> Any:
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def _parse_params(pairs: Optional[List[str]]) -> Dict[str, Any]:
    params = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ParameterError(f"generator parameters are key=value, got {pair!r}")
        params[key] = _parse_value(value)
    return params


def _emit_structure(structure, out: Optional[str]) -> Dict[str, Any]:
    if out:
        write_structure(out, structure)
        return {"out": out}
    sys.stdout.write(dumps(structure))
    return {}


def _describe(structure) -> Dict[str, Any]:
    if isinstance(structure, KUniformHypergraph):
        return {"type": "hypergraph", "n": structure.n, "k": structure.k, "edges": structure.num_edges}
    if isinstance(structure, BipartiteGraph):
        return {"type": "bipartite", "a": len(structure.part_a), "b": len(structure.part_b), "edges": len(structure.edges)}
    if isinstance(structure, Graph):
        return {"type": "graph", "n": structure.n, "edges": structure.num_edges}
    kind = "tournament" if isinstance(structure, Tournament) else "digraph"
    return {"type": kind, "n": structure.n, "arcs": structure.num_arcs}


# --- Subcommands ---

def cmd_generate(args) -> Optional[Dict[str, Any]]:
    structure = build_base(args.kind, _parse_params(args.params), args.seed)
    logger.info(f"Generated {args.kind}: {_describe(structure)}")
    written = _emit_structure(structure, args.out)
    return {**written, **_describe(structure)} if args.out else None


def cmd_perturb(args) -> Optional[Dict[str, Any]]:
    structure = read_structure(args.input)
    spec = PerturbSpec(mode=args.mode, m=args.m, p=args.p, seed=args.seed, new_only=args.new_only)
    result = perturb(structure, spec)
    logger.info(f"Perturbed {args.input} with {spec.mode.value}: {_describe(result)}")
    written = _emit_structure(result, args.out)
    return {**written, **_describe(result)} if args.out else None


def _require(structure, types, problem: str):
    if not isinstance(structure, types):
        raise ParameterError(f"solve {problem} cannot take a {type(structure).__name__}")
    return structure


def cmd_solve(args) -> Dict[str, Any]:
    problem = args.problem
    if problem == "hyper":
        if not args.dense or not args.random:
            raise ParameterError("solve hyper needs --dense and --random")
        H = _require(read_structure(args.dense), KUniformHypergraph, problem)
        R = _require(read_structure(args.random), KUniformHypergraph, problem)
        if args.exact:
            L = H.union(R)
            if args.mode == "matching":
                edges = find_perfect_matching_hypergraph_exact(L)
            else:
                edges = find_loose_hamilton_exact(L)
            return {"problem": problem, "mode": args.mode, "exact": True, "success": edges is not None, "edges": edges}
        cfg = PipelineConfig(epsilon=args.epsilon, ell=args.ell, seed=args.seed, mine_union=args.mine_union)
        result = find_spanning_structure(H, R, TemplateMode(args.mode), cfg)
        return {"problem": problem, "exact": False, **result.model_dump(mode="json")}

    if not args.input:
        raise ParameterError(f"solve {problem} needs --in")
    structure = read_structure(args.input)

    if problem == "hamilton":
        cycle = find_hamilton_cycle_exact(_require(structure, (Graph, Digraph), problem))
        return {"problem": problem, "hamiltonian": cycle is not None, "cycle": cycle}
    if problem == "pancyclic":
        D = _require(structure, (Graph, Digraph), problem)
        found = cycle_witnesses(D)
        missing = [length for length in range(3, D.n + 1) if length not in found]
        return {
            "problem": problem,
            "pancyclic": not missing,
            "missing": missing,
            "cycles": {str(length): cycle for length, cycle in sorted(found.items())},
        }
    if problem == "hyper-matching":
        edges = find_perfect_matching_hypergraph_exact(_require(structure, KUniformHypergraph, problem))
        return {"problem": problem, "success": edges is not None, "edges": edges}
    if problem == "loose-cycle":
        edges = find_loose_hamilton_exact(_require(structure, KUniformHypergraph, problem))
        return {"problem": problem, "success": edges is not None, "edges": edges}
    if problem == "matching":
        result = bipartite_max_matching(_require(structure, BipartiteGraph, problem))
        return {"problem": problem, "size": result.size, **result.model_dump(mode="json")}
    if problem == "paths":
        if args.s is None or args.t is None:
            raise ParameterError("solve paths needs --s and --t")
        paths = vertex_disjoint_paths(_require(structure, (Graph, Digraph), problem), args.s, args.t, args.maxlen)
        return {"problem": problem, "count": paths.count, **paths.model_dump(mode="json")}

    # hamilton-expansion
    D = _require(structure, (Graph, Digraph), problem)
    mode = ExpansionMode.EXACT if D.n <= settings.EXPANSION_EXACT_MAX_N else ExpansionMode.SAMPLED
    cert = check_expansion(D, args.k, mode, args.budget, args.seed)
    payload = {
        "problem": problem,
        "k": args.k,
        "certificate_mode": mode.value,
        "certificate": cert.model_dump(mode="json"),
        "cycle": None,
    }
    if not cert.holds:
        return {**payload, "reason": "expansion-violated"}
    if not cert.proven and not args.trust_sampled:
        return {**payload, "reason": "uncertified"}
    try:
        payload["cycle"] = hamilton_via_expansion(D, args.k, args.seed)
    except HypothesisViolation as exc:
        return {**payload, "reason": f"hypothesis:{exc.assumption}", "detail": exc.detail}
    return {**payload, "reason": "ok"}


def cmd_check(args) -> Dict[str, Any]:
    structure = read_structure(args.input)
    if args.what == "expansion":
        D = _require(structure, (Graph, Digraph), "expansion")
        mode = ExpansionMode.SAMPLED if args.sampled else ExpansionMode.EXACT
        cert = check_expansion(D, args.k, mode, args.budget, args.seed)
        return {"check": "expansion", "holds": cert.holds, "proven": cert.proven, **cert.model_dump(mode="json")}

    D = _require(structure, (Graph, Digraph), "tournament")
    report = is_t_strongly_connected(D, args.t)
    payload = {"check": "tournament", **report.model_dump(mode="json")}
    if args.q is not None:
        cycles = arc_disjoint_hamilton_cycles(_require(structure, Tournament, "tournament --q"), args.q)
        payload.update(q=args.q, arc_disjoint=cycles is not None, cycles=cycles)
    return payload


def cmd_sweep(args) -> Dict[str, Any]:
    cfg = load_experiment_config(args.config)
    fmt = args.format or ("json" if Path(args.out).suffix == ".json" else "csv")
    result = sweep(cfg, jobs=args.jobs)
    emit(result, fmt, args.out)
    return {
        "out": args.out,
        "format": fmt,
        "master_seed": result.master_seed,
        "points": [list(point) for point in result.counts()],
    }


# --- Parser ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perturbed",
        description="Build, perturb and solve graphs, digraphs, hypergraphs and tournaments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a registered instance family")
    p.add_argument("kind", choices=sorted(GENERATORS))
    p.add_argument("--params", nargs="*", default=[], metavar="KEY=VALUE")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("perturb", help="apply a random perturbation")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--mode", choices=[m.value for m in PerturbMode], default=PerturbMode.ADD_M.value)
    size = p.add_mutually_exclusive_group(required=True)
    size.add_argument("--m", type=int)
    size.add_argument("--p", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--new-only", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("solve", help="run a solver and print its witness or certificate")
    p.add_argument("problem", choices=SOLVE_PROBLEMS)
    p.add_argument("--in", dest="input")
    p.add_argument("--exact", action="store_true", help="hyper: exact oracles on the union")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--trust-sampled", action="store_true")
    p.add_argument("--budget", type=int, default=settings.DEFAULT_SAMPLE_BUDGET)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=[m.value for m in TemplateMode], default=TemplateMode.MATCHING.value)
    p.add_argument("--dense")
    p.add_argument("--random")
    p.add_argument("--epsilon", type=float, default=settings.DEFAULT_EPSILON)
    p.add_argument("--ell", type=int)
    p.add_argument("--mine-union", action="store_true")
    p.add_argument("--s", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--maxlen", type=int)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="connectivity and expansion checks")
    p.add_argument("what", choices=["tournament", "expansion"])
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--q", type=int)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--sampled", action="store_true")
    p.add_argument("--budget", type=int, default=settings.DEFAULT_SAMPLE_BUDGET)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="run a Monte Carlo sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"])
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging()
    try:
        payload = args.func(args)
    except ValidationError as exc:
        logger.error(f"{args.command} rejected its parameters: {exc}")
        _print({"error": ParameterError.__name__, "detail": str(exc)})
        return 2
    except PerturbedError as exc:
        logger.error(f"{args.command} failed: {exc}")
        _print({"error": type(exc).__name__, "detail": str(exc)})
        return 2
    if payload is not None:
        _print(payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
