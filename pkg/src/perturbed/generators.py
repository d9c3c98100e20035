"""
Instance generators: tightness examples and seeded dense random bases.

Dense random bases guarantee their minimum degree by construction (every vertex,
or every (k-1)-set, draws its own quota of neighbours) instead of rejecting
samples from a uniform model.
"""

import logging
from itertools import combinations
from math import ceil, comb
from typing import Any, Callable, Dict, List, Optional

from pydantic import BaseModel, Field

import settings
from src.perturbed.errors import ParameterError, StructuralError
from src.perturbed.rng import make_rng, sample_distinct
from src.perturbed.structures import (
    BipartiteGraph,
    Digraph,
    Graph,
    KUniformHypergraph,
    Tournament,
    min_q_degree,
)

logger = logging.getLogger(__name__)


class DenseBaseConfig(BaseModel):
    """Size, minimum-degree fraction and seed of a dense random base."""

    n: int = Field(..., ge=1)
    alpha: float = Field(..., gt=0.0, lt=1.0)
    seed: int = Field(0, ge=0, lt=2**64)

    @property
    def target(self) -> int:
        return ceil(self.alpha * self.n)


# --- Deterministic families ---

def complete_graph(n: int) -> Graph:
    return Graph(n, frozenset(combinations(range(n), 2)))


def complete_digraph(n: int) -> Digraph:
    return Digraph(n, frozenset((u, v) for u in range(n) for v in range(n) if u != v))


def empty_digraph(n: int) -> Digraph:
    return Digraph(n, frozenset())


def directed_cycle(n: int) -> Digraph:
    if n < 2:
        raise ParameterError(f"a directed cycle needs at least 2 vertices, got {n}")
    return Digraph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def complete_bipartite_graph(a: int, b: int) -> Graph:
    """K_{a,b} with parts [0, a) and [a, a+b)."""
    if a < 1 or b < 1:
        raise ParameterError(f"part sizes must be positive, got ({a}, {b})")
    return Graph(a + b, frozenset((u, v) for u in range(a) for v in range(a, a + b)))


def complete_bipartite_digraph(a: int, b: int) -> Digraph:
    """Both orientations of every edge of K_{a,b}."""
    return complete_bipartite_graph(a, b).to_digraph()


def complete_hypergraph(n: int, k: int) -> KUniformHypergraph:
    return KUniformHypergraph(n, k, frozenset(combinations(range(n), k)))


def empty_hypergraph(n: int, k: int) -> KUniformHypergraph:
    return KUniformHypergraph(n, k, frozenset())


def complete_bipartite_hypergraph(k: int, n: int) -> KUniformHypergraph:
    """Parts [0, n) and [n, (2k+1)n); edges are the k-sets meeting both parts."""
    if k < 3 or n < 1:
        raise ParameterError(f"need k >= 3 and n >= 1, got k={k}, n={n}")
    total = (2 * k + 1) * n
    edges = frozenset(
        edge for edge in combinations(range(total), k) if edge[0] < n <= edge[-1]
    )
    return KUniformHypergraph(total, k, edges)


def transitive_tournament(n: int) -> Tournament:
    """i beats j whenever i < j; vertex i has indegree i."""
    return Tournament(n, frozenset(combinations(range(n), 2)))


def regular_tournament(d: int) -> Tournament:
    """Rotational tournament on 2d+1 vertices: i beats i+1, ..., i+d (mod 2d+1)."""
    if d < 0:
        raise ParameterError(f"degree must be non-negative, got {d}")
    n = 2 * d + 1
    arcs = frozenset((i, (i + j) % n) for i in range(n) for j in range(1, d + 1))
    tournament = Tournament(n, arcs)
    if any(deg != d for deg in tournament.in_degrees() + tournament.out_degrees()):
        raise StructuralError(f"rotational tournament with d={d} is not regular")
    return tournament


def transitive_cluster_tournament(r: int, d: int) -> Tournament:
    """r regular clusters of size 2d+1; arcs between clusters point to the later one."""
    if r < 1 or d < 0:
        raise ParameterError(f"need r >= 1 and d >= 0, got r={r}, d={d}")
    size = 2 * d + 1
    block = regular_tournament(d).arcs
    arcs = set()
    for c in range(r):
        offset = c * size
        arcs.update((u + offset, v + offset) for u, v in block)
        for later in range(c + 1, r):
            arcs.update(
                (u, v)
                for u in range(offset, offset + size)
                for v in range(later * size, (later + 1) * size)
            )
    return Tournament(r * size, frozenset(arcs))


# --- Seeded random families ---

def random_tournament(n: int, seed: int) -> Tournament:
    rng = make_rng(seed)
    bits = rng.integers(0, 2, size=comb(n, 2))
    arcs = set()
    index = 0
    for j in range(n):
        for i in range(j):
            arcs.add((i, j) if bits[index] else (j, i))
            index += 1
    return Tournament(n, frozenset(arcs))


def _others(v: int, picks: List[int]) -> List[int]:
    """Map draws from [0, n-1) to vertices other than v."""
    return [p if p < v else p + 1 for p in picks]


def random_min_degree_digraph(cfg: DenseBaseConfig) -> Digraph:
    """Every vertex draws ``ceil(alpha*n)`` out- and in-neighbours; the union is returned."""
    n, target = cfg.n, cfg.target
    if target > n - 1:
        raise ParameterError(f"alpha={cfg.alpha} needs degree {target} > n-1 = {n - 1}")
    rng = make_rng(cfg.seed)
    arcs = set()
    for v in range(n):
        arcs.update((v, w) for w in _others(v, sample_distinct(rng, n - 1, target)))
        arcs.update((w, v) for w in _others(v, sample_distinct(rng, n - 1, target)))
    digraph = Digraph(n, frozenset(arcs))
    low = min(digraph.in_degrees() + digraph.out_degrees())
    if low < target:
        raise StructuralError(f"dense digraph has degree {low} < {target}")
    logger.debug(f"Dense digraph n={n}, alpha={cfg.alpha}: {digraph.num_arcs} arcs")
    return digraph


def random_min_qdegree_hypergraph(k: int, n_total: int, alpha: float, seed: int) -> KUniformHypergraph:
    """Every (k-1)-set draws ``ceil(alpha*n_total)`` completing vertices."""
    if k < 2:
        raise ParameterError(f"uniformity must be at least 2, got {k}")
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    target = ceil(alpha * n_total)
    if target > n_total - k + 1:
        raise ParameterError(
            f"alpha={alpha} needs {target} completions per {k - 1}-set, only {n_total - k + 1} exist"
        )
    rng = make_rng(seed)
    edges = set()
    for subset in combinations(range(n_total), k - 1):
        outside = [v for v in range(n_total) if v not in subset]
        for pick in sample_distinct(rng, len(outside), target):
            edges.add(tuple(sorted(subset + (outside[pick],))))
    hypergraph = KUniformHypergraph(n_total, k, frozenset(edges))
    if n_total <= settings.QDEGREE_MAX_N and min_q_degree(hypergraph, k - 1) < target:
        raise StructuralError(f"dense {k}-graph misses its {k - 1}-degree target {target}")
    logger.debug(f"Dense {k}-graph on {n_total} vertices: {hypergraph.num_edges} edges")
    return hypergraph


def random_bipartite_min_degree(n: int, alpha: float, seed: int) -> BipartiteGraph:
    """Parts [0, n) and [n, 2n); every vertex draws ``ceil(alpha*n)`` neighbours across."""
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    target = ceil(alpha * n)
    if target > n:
        raise ParameterError(f"alpha={alpha} needs degree {target} > {n}")
    rng = make_rng(seed)
    edges = set()
    for a in range(n):
        edges.update((a, n + b) for b in sample_distinct(rng, n, target))
    for b in range(n):
        edges.update((a, n + b) for a in sample_distinct(rng, n, target))
    return BipartiteGraph(tuple(range(n)), tuple(range(n, 2 * n)), frozenset(edges))


def random_perfect_matching(part_a, part_b, seed: int) -> BipartiteGraph:
    """Uniform perfect matching between two equal-size parts."""
    part_a, part_b = tuple(part_a), tuple(part_b)
    if len(part_a) != len(part_b):
        raise ParameterError(f"parts differ in size: {len(part_a)} vs {len(part_b)}")
    permutation = make_rng(seed).permutation(len(part_b))
    edges = frozenset((a, part_b[int(j)]) for a, j in zip(part_a, permutation))
    return BipartiteGraph(part_a, part_b, edges)


# --- Registry ---

def _need(params: Dict[str, Any], *names: str) -> List[Any]:
    missing = [name for name in names if name not in params]
    if missing:
        raise ParameterError(f"missing generator parameters: {', '.join(missing)}")
    return [params[name] for name in names]


GENERATORS: Dict[str, Callable[[Dict[str, Any], int], Any]] = {
    "complete-graph": lambda p, s: complete_graph(*_need(p, "n")),
    "complete-digraph": lambda p, s: complete_digraph(*_need(p, "n")),
    "empty-digraph": lambda p, s: empty_digraph(*_need(p, "n")),
    "directed-cycle": lambda p, s: directed_cycle(*_need(p, "n")),
    "complete-bipartite-graph": lambda p, s: complete_bipartite_graph(*_need(p, "a", "b")),
    "complete-bipartite-digraph": lambda p, s: complete_bipartite_digraph(*_need(p, "a", "b")),
    "dense-digraph": lambda p, s: random_min_degree_digraph(
        DenseBaseConfig(**dict(zip(("n", "alpha"), _need(p, "n", "alpha"))), seed=s)
    ),
    "complete-hypergraph": lambda p, s: complete_hypergraph(*_need(p, "n", "k")),
    "empty-hypergraph": lambda p, s: empty_hypergraph(*_need(p, "n", "k")),
    "complete-bipartite-hypergraph": lambda p, s: complete_bipartite_hypergraph(*_need(p, "k", "n")),
    "dense-hypergraph": lambda p, s: random_min_qdegree_hypergraph(*_need(p, "k", "n", "alpha"), s),
    "transitive-tournament": lambda p, s: transitive_tournament(*_need(p, "n")),
    "regular-tournament": lambda p, s: regular_tournament(*_need(p, "d")),
    "cluster-tournament": lambda p, s: transitive_cluster_tournament(*_need(p, "r", "d")),
    "random-tournament": lambda p, s: random_tournament(*_need(p, "n"), s),
    "dense-bipartite": lambda p, s: random_bipartite_min_degree(*_need(p, "n", "alpha"), s),
}


def build_base(kind: str, params: Optional[Dict[str, Any]] = None, seed: int = 0):
    """Build a registered instance family from a parameter dict."""
    if kind not in GENERATORS:
        raise ParameterError(f"unknown generator {kind!r}; choose from {', '.join(sorted(GENERATORS))}")
    return GENERATORS[kind](dict(params or {}), seed)
