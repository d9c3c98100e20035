"""
Monte Carlo experiment driver.

A sweep runs ``trials`` independent trials for every perturbation size m of an
ExperimentConfig. Each trial derives its own seed from (master seed, m, trial
index), builds the base structure, perturbs it, runs the scenario's solver and
reports success with a reason code. Trials share no state, so they can run in
any order or in parallel; aggregation is plain counting.
"""

import logging
import platform
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from itertools import repeat
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
import scipy
from pydantic import BaseModel, Field, field_validator, model_validator
from scipy.stats import binomtest

import settings
from src.perturbed import __version__
from src.perturbed.errors import (
    EmissionError,
    HypothesisViolation,
    PancyclicityFailure,
    ParameterError,
    ResourceGuardError,
    StructuralError,
)
from src.perturbed.exact import (
    MatchStatus,
    bipartite_max_matching,
    find_hamilton_cycle_exact,
    find_loose_hamilton_exact,
    find_perfect_matching_hypergraph_exact,
    is_pancyclic_exact,
    search_cycle_of_length,
)
from src.perturbed.expansion import ExpansionMode, ExpansionSolver, check_expansion, pancyclic_via_expansion
from src.perturbed.generators import build_base, random_perfect_matching
from src.perturbed.hyperpipe import PipelineConfig, TemplateMode, find_spanning_structure
from src.perturbed.perturb import PerturbMode, PerturbSpec, perturb, random_hypergraph
from src.perturbed.rng import derive_seed, make_rng, sample_distinct
from src.perturbed.structures import (
    BipartiteGraph,
    Digraph,
    Graph,
    KUniformHypergraph,
    Tournament,
    is_directed_cycle,
    min_in_degree,
    min_out_degree,
)
from src.perturbed.tourney import (
    arc_disjoint_hamilton_cycles,
    degree_retention,
    is_strongly_connected,
    is_t_strongly_connected,
)

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["m", "trials", "successes", "frequency", "ci_low", "ci_high", "mean_ms"]


class Scenario(str, Enum):
    DIGRAPH_PANCYCLIC = "digraph-pancyclic"
    HYPER_MATCHING = "hyper-matching"
    HYPER_CYCLE = "hyper-cycle"
    TOURNAMENT_HAMILTON = "tournament-hamilton"
    TOURNAMENT_QCYCLES = "tournament-qcycles"
    BIPARTITE_MATCHING = "bipartite-matching"


class SolverKind(str, Enum):
    EXACT = "exact"
    CONSTRUCTIVE = "constructive"
    PIPELINE = "pipeline"


HYPER_SCENARIOS = (Scenario.HYPER_MATCHING, Scenario.HYPER_CYCLE)
TOURNAMENT_SCENARIOS = (Scenario.TOURNAMENT_HAMILTON, Scenario.TOURNAMENT_QCYCLES)


class BaseSpec(BaseModel):
    """Registered generator name and its parameters."""

    kind: str
    params: Dict[str, Any] = Field(default_factory=dict)


class ExperimentConfig(BaseModel):
    """One sweep: scenario, base family, perturbation sizes, trials and solver knobs."""

    name: Optional[str] = None
    scenario: Scenario
    base: BaseSpec
    m_values: List[int]
    trials: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    solver: Optional[SolverKind] = None
    perturb_mode: Optional[PerturbMode] = None

    # digraph-pancyclic
    expansion_k: int = Field(1, ge=1)
    trust_sampled: bool = False
    sample_budget: int = Field(settings.DEFAULT_SAMPLE_BUDGET, ge=1)
    witness_budget: int = Field(settings.DEFAULT_WITNESS_BUDGET, ge=1)

    # hyper-*
    epsilon: float = Field(settings.DEFAULT_EPSILON, gt=0.0, lt=1.0)
    ell: Optional[int] = Field(None, ge=1)
    mine_union: bool = False

    # tournament-*
    t: int = Field(1, ge=1)
    q: int = Field(1, ge=1)

    @field_validator("m_values")
    @classmethod
    def _increasing(cls, values: List[int]) -> List[int]:
        if any(m < 0 for m in values):
            raise ValueError("sweep values must be non-negative")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        return values

    @model_validator(mode="after")
    def _defaults_per_scenario(self):
        if self.solver is None:
            self.solver = SolverKind.PIPELINE if self.scenario in HYPER_SCENARIOS else SolverKind.CONSTRUCTIVE
        if self.solver == SolverKind.PIPELINE and self.scenario not in HYPER_SCENARIOS:
            raise ValueError(f"solver pipeline applies to hypergraph scenarios, not {self.scenario.value}")
        if self.perturb_mode is None:
            if self.scenario in TOURNAMENT_SCENARIOS:
                self.perturb_mode = PerturbMode.TOURNAMENT_FLIP
            else:
                self.perturb_mode = PerturbMode.ADD_M
        if self.scenario in TOURNAMENT_SCENARIOS and self.perturb_mode != PerturbMode.TOURNAMENT_FLIP:
            raise ValueError("tournament scenarios are perturbed with tournament-flip")
        if self.scenario == Scenario.DIGRAPH_PANCYCLIC and self.perturb_mode == PerturbMode.TOURNAMENT_FLIP:
            raise ValueError("tournament-flip applies to tournament scenarios only")
        if self.scenario in HYPER_SCENARIOS + (Scenario.BIPARTITE_MATCHING,) and self.perturb_mode != PerturbMode.ADD_M:
            raise ValueError(f"scenario {self.scenario.value} adds m random edges (mode add-m)")
        return self


class TrialOutcome(BaseModel):
    m: int
    index: int
    seed: int
    success: bool
    reason: str
    elapsed_ms: float
    diagnostics: Dict[str, Any] = Field(default_factory=dict)


class SweepPoint(BaseModel):
    """Aggregate of all trials at one m, with a Wilson 95% interval."""

    m: int
    trials: int
    successes: int
    frequency: float
    ci_low: float
    ci_high: float
    mean_ms: float

    @model_validator(mode="after")
    def _consistent(self):
        if not 0 <= self.successes <= self.trials:
            raise ValueError(f"successes {self.successes} outside [0, {self.trials}]")
        if not 0.0 <= self.ci_low <= self.ci_high <= 1.0:
            raise ValueError(f"interval [{self.ci_low}, {self.ci_high}] outside [0, 1]")
        return self


class SweepResult(BaseModel):
    scenario: Scenario
    master_seed: int
    points: List[SweepPoint] = Field(default_factory=list)
    environment: Dict[str, str] = Field(default_factory=dict)
    config: ExperimentConfig

    def counts(self) -> List[Tuple[int, int, int]]:
        """(m, trials, successes) per point; the timing-free part of the result."""
        return [(p.m, p.trials, p.successes) for p in self.points]


# --- Statistics ---

def wilson_interval(successes: int, trials: int) -> Tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(successes, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return max(0.0, float(ci.low)), min(1.0, float(ci.high))


def aggregate(outcomes: Iterable[TrialOutcome], m_values: Optional[List[int]] = None) -> List[SweepPoint]:
    """Count successes and time per m; independent of the order of ``outcomes``."""
    trials: Dict[int, int] = defaultdict(int)
    successes: Dict[int, int] = defaultdict(int)
    elapsed: Dict[int, float] = defaultdict(float)
    for outcome in outcomes:
        trials[outcome.m] += 1
        successes[outcome.m] += int(outcome.success)
        elapsed[outcome.m] += outcome.elapsed_ms
    points = []
    for m in (m_values if m_values is not None else sorted(trials)):
        n_trials, n_success = trials[m], successes[m]
        low, high = wilson_interval(n_success, n_trials)
        points.append(
            SweepPoint(
                m=m,
                trials=n_trials,
                successes=n_success,
                frequency=n_success / n_trials if n_trials else 0.0,
                ci_low=low,
                ci_high=high,
                mean_ms=elapsed[m] / n_trials if n_trials else 0.0,
            )
        )
    return points


# --- Scenario solvers ---

def _long_cycle(D: Digraph, length: int, seed: int, attempts: int = 3) -> Optional[List[int]]:
    """Hamilton cycle of a random induced sub-digraph on ``length`` vertices, or None."""
    rng = make_rng(seed)
    for attempt in range(attempts):
        sub, labels = D.induced(sample_distinct(rng, D.n, length))
        low = min(min_in_degree(sub), min_out_degree(sub))
        solver = ExpansionSolver(sub, max(1, low // 4), seed=derive_seed(seed, attempt))
        try:
            return [labels[x] for x in solver.hamilton(check_degrees=False)]
        except HypothesisViolation:
            continue
    return None


def _digraph_pancyclic(cfg: ExperimentConfig, D: Union[Graph, Digraph], seed: int) -> Tuple[bool, str, Dict[str, Any]]:
    if cfg.solver == SolverKind.EXACT:
        ok, missing = is_pancyclic_exact(D)
        return ok, "ok" if ok else "no-witness", {"missing": missing}

    digraph = D.to_digraph()
    n, k = digraph.n, cfg.expansion_k
    cycles: Dict[int, List[int]] = {}
    diagnostics: Dict[str, Any] = {"certificate": "skipped"}
    if k <= n // 2:
        mode = ExpansionMode.EXACT if n <= settings.EXPANSION_EXACT_MAX_N else ExpansionMode.SAMPLED
        cert = check_expansion(digraph, k, mode, cfg.sample_budget, derive_seed(seed, 0))
        diagnostics["certificate"] = mode.value if cert.holds else "violated"
        if cert.holds and (cert.proven or cfg.trust_sampled):
            try:
                cycles = pancyclic_via_expansion(digraph, k, derive_seed(seed, 1))
            except PancyclicityFailure as exc:
                cycles = dict(exc.cycles)
            except HypothesisViolation as exc:
                diagnostics["construction"] = str(exc)
    diagnostics["constructed"] = len(cycles)

    # Lengths the construction did not produce: closure on a random induced
    # sub-digraph for long cycles, then a budgeted search that can prove absence.
    searched = 0
    for length in range(3, n + 1):
        if length in cycles:
            continue
        if 2 * length > n:
            cycle = _long_cycle(digraph, length, derive_seed(seed, 2, length))
            if cycle is not None:
                cycles[length] = cycle
                continue
        searched += 1
        outcome = search_cycle_of_length(digraph, length, cfg.witness_budget, derive_seed(seed, 3, length))
        if outcome.cycle is None:
            diagnostics.update(searched=searched, failed_length=length)
            return False, "no-witness" if outcome.exhausted else "budget-exhausted", diagnostics
        cycles[length] = outcome.cycle

    for length, cycle in cycles.items():
        if len(cycle) != length or not is_directed_cycle(digraph, cycle):
            raise StructuralError(f"invalid {length}-cycle {cycle}")
    diagnostics["searched"] = searched
    return True, "ok", diagnostics


def _hyper(cfg: ExperimentConfig, H: KUniformHypergraph, m: int, seeds: Tuple[int, int]) -> Tuple[bool, str, Dict[str, Any]]:
    perturb_seed, solver_seed = seeds
    R = random_hypergraph(H.n, H.k, m, perturb_seed)
    mode = TemplateMode.MATCHING if cfg.scenario == Scenario.HYPER_MATCHING else TemplateMode.CYCLE
    if cfg.solver == SolverKind.EXACT:
        L = H.union(R)
        found = (
            find_perfect_matching_hypergraph_exact(L)
            if mode == TemplateMode.MATCHING
            else find_loose_hamilton_exact(L)
        )
        return found is not None, "ok" if found is not None else "no-witness", {"edges": L.num_edges}
    pipeline = PipelineConfig(epsilon=cfg.epsilon, ell=cfg.ell, seed=solver_seed, mine_union=cfg.mine_union)
    result = find_spanning_structure(H, R, mode, pipeline)
    diagnostics = {
        "matching_size": result.matching_size,
        "prematched": result.prematched,
        "paths_used": result.paths_used,
        "gab_min_degree": list(result.gab_min_degree),
    }
    if not result.success:
        diagnostics["certificate_size"] = len(result.certificate)
    return result.success, "ok" if result.success else "no-witness", diagnostics


def _tournament(cfg: ExperimentConfig, T: Tournament, m: int, seeds: Tuple[int, int]) -> Tuple[bool, str, Dict[str, Any]]:
    perturb_seed, _ = seeds
    P = perturb(T, PerturbSpec(mode=PerturbMode.TOURNAMENT_FLIP, m=m, seed=perturb_seed))
    diagnostics: Dict[str, Any] = {"degree_retention": degree_retention(T, P)}
    if cfg.scenario == Scenario.TOURNAMENT_HAMILTON:
        if cfg.solver == SolverKind.EXACT:
            ok = find_hamilton_cycle_exact(P) is not None
        else:
            ok = is_strongly_connected(P)
    elif cfg.solver == SolverKind.EXACT:
        diagnostics["q"] = cfg.q
        ok = arc_disjoint_hamilton_cycles(P, cfg.q) is not None
    else:
        diagnostics["t"] = cfg.t
        report = is_t_strongly_connected(P, cfg.t)
        ok = report.connected
        diagnostics["diameter"] = report.diameter
    return ok, "ok" if ok else "no-witness", diagnostics


def _bipartite(G: BipartiteGraph, m: int, seeds: Tuple[int, int]) -> Tuple[bool, str, Dict[str, Any]]:
    perturb_seed, _ = seeds
    full = sorted(random_perfect_matching(G.part_a, G.part_b, derive_seed(perturb_seed, 0)).edges)
    if m > len(full):
        raise ParameterError(f"m={m} exceeds the {len(full)} edges of a perfect matching")
    kept = [full[i] for i in sample_distinct(make_rng(derive_seed(perturb_seed, 1)), len(full), m)]
    result = bipartite_max_matching(G.union(BipartiteGraph(G.part_a, G.part_b, frozenset(kept))))
    ok = result.status == MatchStatus.PERFECT
    diagnostics: Dict[str, Any] = {"matching_size": result.size}
    if not ok:
        diagnostics.update(certificate_size=len(result.certificate), certificate_side=result.certificate_side)
    return ok, "ok" if ok else "no-witness", diagnostics


# --- Trials and sweeps ---

def run_trial(cfg: ExperimentConfig, m: int, index: int) -> TrialOutcome:
    """One seeded trial; structural and hypothesis failures become reason codes."""
    seed = derive_seed(cfg.seed, m, index)
    base_seed, perturb_seed, solver_seed = (derive_seed(seed, i) for i in range(3))
    started = time.perf_counter()
    diagnostics: Dict[str, Any] = {}
    try:
        base = build_base(cfg.base.kind, cfg.base.params, base_seed)
        if cfg.scenario == Scenario.DIGRAPH_PANCYCLIC:
            if not isinstance(base, (Graph, Digraph)):
                raise ParameterError(f"{cfg.scenario.value} needs a graph or digraph base")
            if isinstance(base, Tournament):
                base = Digraph(base.n, base.arcs)
            perturbed = perturb(base, PerturbSpec(mode=cfg.perturb_mode, m=m, seed=perturb_seed))
            success, reason, diagnostics = _digraph_pancyclic(cfg, perturbed, solver_seed)
        elif cfg.scenario in HYPER_SCENARIOS:
            if not isinstance(base, KUniformHypergraph):
                raise ParameterError(f"{cfg.scenario.value} needs a hypergraph base")
            success, reason, diagnostics = _hyper(cfg, base, m, (perturb_seed, solver_seed))
        elif cfg.scenario in TOURNAMENT_SCENARIOS:
            if not isinstance(base, Tournament):
                raise ParameterError(f"{cfg.scenario.value} needs a tournament base")
            success, reason, diagnostics = _tournament(cfg, base, m, (perturb_seed, solver_seed))
        else:
            if not isinstance(base, BipartiteGraph):
                raise ParameterError(f"{cfg.scenario.value} needs a bipartite base")
            success, reason, diagnostics = _bipartite(base, m, (perturb_seed, solver_seed))
    except HypothesisViolation as exc:
        success, reason = False, f"hypothesis:{exc.assumption}"
        diagnostics = {"detail": exc.detail}
    except ResourceGuardError as exc:
        success, reason = False, "resource-guard"
        diagnostics = {"detail": str(exc)}
    except StructuralError as exc:
        logger.warning(f"Trial m={m} index={index} hit a structural error: {exc}")
        success, reason = False, "structural"
        diagnostics = {"detail": str(exc)}
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    return TrialOutcome(
        m=m,
        index=index,
        seed=seed,
        success=success,
        reason=reason,
        elapsed_ms=elapsed_ms,
        diagnostics=diagnostics,
    )


def environment_stamp() -> Dict[str, str]:
    return {
        "perturbed": __version__,
        "python": platform.python_version(),
        "platform": platform.platform(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
    }


def sweep(cfg: ExperimentConfig, jobs: int = 1) -> SweepResult:
    """Run every (m, trial) pair and aggregate; frequencies are reported raw."""
    if jobs < 1:
        raise ParameterError(f"jobs must be positive, got {jobs}")
    tasks = [(m, i) for m in cfg.m_values for i in range(cfg.trials)]
    seeds = {derive_seed(cfg.seed, m, i) for m, i in tasks}
    if len(seeds) != len(tasks):
        raise StructuralError("trial seed derivation collided")

    logger.info("=" * 60)
    logger.info(f"Sweep {cfg.name or cfg.scenario.value}: {len(cfg.m_values)} points x {cfg.trials} trials")
    logger.info(f"Base {cfg.base.kind} {cfg.base.params}, solver {cfg.solver.value}, master seed {cfg.seed}")
    logger.info("=" * 60)

    ms = [m for m, _ in tasks]
    indices = [i for _, i in tasks]
    if jobs == 1:
        outcomes = [run_trial(cfg, m, i) for m, i in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            outcomes = list(executor.map(run_trial, repeat(cfg), ms, indices))

    stats = defaultdict(int)
    for outcome in outcomes:
        stats[outcome.reason] += 1
    points = aggregate(outcomes, cfg.m_values)
    for point in points:
        logger.info(
            f"m={point.m}: {point.successes}/{point.trials} "
            f"(freq {point.frequency:.3f}, CI [{point.ci_low:.3f}, {point.ci_high:.3f}], {point.mean_ms:.1f} ms)"
        )
    logger.info(f"Reasons: {dict(sorted(stats.items()))}")
    return SweepResult(
        scenario=cfg.scenario,
        master_seed=cfg.seed,
        points=points,
        environment=environment_stamp(),
        config=cfg,
    )


# --- Emission ---

def emit(result: SweepResult, fmt: str, path: Union[str, Path]) -> None:
    """Write ``result`` as CSV (one row per m) or JSON (full model)."""
    path = Path(path)
    if fmt not in ("csv", "json"):
        raise ParameterError(f"format must be csv or json, got {fmt!r}")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            frame = pd.DataFrame([p.model_dump() for p in result.points], columns=CSV_COLUMNS)
            frame.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
        else:
            path.write_text(result.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise EmissionError(path, exc) from exc
    logger.info(f"Wrote {len(result.points)} points to {path}")


def load_result(path: Union[str, Path]) -> SweepResult:
    return SweepResult.model_validate_json(Path(path).read_text(encoding="utf-8"))


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read a JSON config; ``PHL_SEED`` replaces the master seed when set."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = ExperimentConfig.model_validate_json(text)
    except ValueError as exc:
        raise ParameterError(f"invalid config {path}: {exc}") from exc
    if settings.PHL_SEED is not None:
        logger.info(f"PHL_SEED overrides master seed {cfg.seed} -> {settings.PHL_SEED}")
        cfg = cfg.model_copy(update={"seed": settings.PHL_SEED})
    return cfg
