"""
Spanning structures in a dense hypergraph plus a random one.

Pipeline:
    1. extract a large matching (or a family of long loose paths) Q from the random part;
    2. lay Q out as a partial template of the target structure and complete the
       template with the remaining vertices in seeded random order;
    3. split every template edge into a linker vertex and a (k-1)-tuple and build
       the bipartite graph joining linker a to slot i when {a} + tuple_i is an edge;
    4. a perfect matching of that graph lifts to a perfect matching or loose
       Hamilton cycle; otherwise a Hall violator among the linkers is returned.

Template layout. Matching mode with s slots uses k*s positions, slot i owning
positions k*i .. k*i+k-1 with its linker first. Cycle mode with s slots uses
(k-1)*s positions read cyclically; slot i owns positions (k-1)*i .. (k-1)*i+k-1,
its linker is position (k-1)*i+1 and its tuple holds the rest, so consecutive
tuples share the joint vertex at position (k-1)*(i+1).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from math import ceil
from typing import FrozenSet, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, model_validator

import settings
from src.perturbed.errors import ParameterError, StructuralError
from src.perturbed.exact import MatchStatus, bipartite_max_matching
from src.perturbed.rng import make_rng
from src.perturbed.structures import (
    BipartiteGraph,
    KUniformHypergraph,
    validate_loose_hamilton_cycle,
    validate_loose_path,
    validate_perfect_matching,
)

logger = logging.getLogger(__name__)


class TemplateMode(str, Enum):
    MATCHING = "matching"
    CYCLE = "cycle"


@dataclass(frozen=True)
class LoosePath:
    """Loose path given by its vertex order; edge i is vertices[i(k-1) : i(k-1)+k]."""

    vertices: Tuple[int, ...]
    k: int

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        length = len(self.vertices)
        if self.k < 2 or length < self.k or (length - 1) % (self.k - 1) != 0:
            raise StructuralError(f"{length} vertices do not form a loose {self.k}-path")
        if len(set(self.vertices)) != length:
            raise StructuralError("loose path repeats a vertex")

    @cached_property
    def edges(self) -> List[Tuple[int, ...]]:
        step = self.k - 1
        return [
            tuple(sorted(self.vertices[i * step: i * step + self.k]))
            for i in range(self.ell)
        ]

    @property
    def ell(self) -> int:
        return (len(self.vertices) - 1) // (self.k - 1)


@dataclass(frozen=True)
class PartialCycleTemplate:
    """Vertex layout of a target matching or loose cycle, possibly with holes (None)."""

    mode: TemplateMode
    k: int
    layout: Tuple[Optional[int], ...]
    prematched: FrozenSet[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "mode", TemplateMode(self.mode))
        object.__setattr__(self, "layout", tuple(self.layout))
        object.__setattr__(self, "prematched", frozenset(self.prematched))
        per_slot = self.k if self.mode == TemplateMode.MATCHING else self.k - 1
        if self.mode == TemplateMode.CYCLE and self.k < 3:
            raise ParameterError("cycle templates need k >= 3")
        if len(self.layout) % per_slot != 0:
            raise StructuralError(f"{len(self.layout)} positions are not divisible by {per_slot}")
        if self.mode == TemplateMode.CYCLE and len(self.layout) // per_slot < 2:
            raise StructuralError("a loose cycle needs at least 2 edges")
        filled = [v for v in self.layout if v is not None]
        if len(set(filled)) != len(filled):
            raise StructuralError("template places a vertex twice")
        if any(not 0 <= i < self.size for i in self.prematched):
            raise StructuralError("prematched slot out of range")
        for i in self.prematched:
            if any(self.layout[p] is None for p in self.positions(i)):
                raise StructuralError(f"prematched slot {i} has an empty position")

    @property
    def size(self) -> int:
        per_slot = self.k if self.mode == TemplateMode.MATCHING else self.k - 1
        return len(self.layout) // per_slot

    @property
    def complete(self) -> bool:
        return all(v is not None for v in self.layout)

    def positions(self, i: int) -> List[int]:
        if self.mode == TemplateMode.MATCHING:
            return list(range(self.k * i, self.k * i + self.k))
        total = len(self.layout)
        return [((self.k - 1) * i + j) % total for j in range(self.k)]

    def linker_position(self, i: int) -> int:
        return self.positions(i)[0 if self.mode == TemplateMode.MATCHING else 1]

    @property
    def linkers(self) -> List[Optional[int]]:
        return [self.layout[self.linker_position(i)] for i in range(self.size)]

    @property
    def tuples(self) -> List[Tuple[Optional[int], ...]]:
        out = []
        for i in range(self.size):
            skip = self.linker_position(i)
            out.append(tuple(self.layout[p] for p in self.positions(i) if p != skip))
        return out

    def edge(self, i: int) -> Tuple[int, ...]:
        """Slot i in layout order; in cycle mode its last vertex starts slot i + 1."""
        return tuple(self.layout[p] for p in self.positions(i))


class PipelineConfig(BaseModel):
    """Shortfall fraction, path length, seed and extraction source of a pipeline run."""

    epsilon: float = Field(settings.DEFAULT_EPSILON, gt=0.0, lt=1.0)
    ell: Optional[int] = Field(None, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    mine_union: bool = False

    @property
    def path_length(self) -> int:
        return self.ell if self.ell is not None else ceil(1 / self.epsilon)


class SpanningResult(BaseModel):
    """Witness or Hall certificate of one pipeline run."""

    success: bool
    mode: TemplateMode
    edges: List[Tuple[int, ...]] = Field(default_factory=list)
    certificate: Optional[List[int]] = None
    matching_size: int = 0
    prematched: int = 0
    paths_used: int = 0
    gab_min_degree: Tuple[int, int] = (0, 0)

    @model_validator(mode="after")
    def _witness_or_certificate(self):
        if self.success == (self.certificate is not None):
            raise ValueError("a result carries a certificate exactly when it fails")
        return self


# --- Extraction from the random part ---

def _scan_order(H: KUniformHypergraph, seed: Optional[int]) -> List[Tuple[int, ...]]:
    edges = sorted(H.edges)
    if seed is None:
        return edges
    permutation = make_rng(seed).permutation(len(edges))
    return [edges[int(i)] for i in permutation]


def greedy_max_matching(H: KUniformHypergraph, seed: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Inclusion-maximal matching: scan edges, keep each one disjoint from those kept."""
    covered = set()
    matching = []
    for edge in _scan_order(H, seed):
        if covered.isdisjoint(edge):
            matching.append(edge)
            covered.update(edge)
    if any(covered.isdisjoint(edge) for edge in H.edges):
        raise StructuralError("greedy matching is not maximal")
    return matching


def greedy_loose_paths(H: KUniformHypergraph, ell: int, seed: Optional[int] = None) -> List[LoosePath]:
    """Vertex-disjoint loose paths with exactly ``ell`` edges, grown greedily.

    Every edge inside the unused vertices is tried once as a seed. A path grows
    from its last vertex through an edge whose other vertices are all unused,
    picking the new last vertex with the most onward edges; stubs that get stuck
    short of ``ell`` edges are discarded and their vertices released.
    """
    if ell < 1:
        raise ParameterError(f"ell must be positive, got {ell}")
    k = H.k
    used = set()
    paths: List[LoosePath] = []

    def onward(v: int, blocked: set) -> int:
        return sum(1 for e in H.incidence[v] if all(x == v or x not in blocked for x in e))

    for start in _scan_order(H, seed):
        if not used.isdisjoint(start):
            continue
        # Start from the vertex order that leaves the most room at the far end.
        taken = used | set(start)
        last = max(start, key=lambda v: (onward(v, taken), -v))
        vertices = [v for v in start if v != last] + [last]
        while len(vertices) < ell * (k - 1) + 1:
            blocked = used | set(vertices)
            best = None
            for edge in H.incidence[vertices[-1]]:
                fresh = [x for x in edge if x != vertices[-1]]
                if any(x in blocked for x in fresh):
                    continue
                after = blocked | set(fresh)
                for x in fresh:
                    score = (onward(x, after), -x)
                    if best is None or score > best[0]:
                        best = (score, fresh, x)
            if best is None:
                break
            _, fresh, x = best
            vertices.extend([y for y in fresh if y != x] + [x])
        if len(vertices) == ell * (k - 1) + 1:
            path = LoosePath(tuple(vertices), k)
            if not validate_loose_path(H, path.edges):
                raise StructuralError(f"greedy growth produced an invalid loose path {vertices}")
            paths.append(path)
            used.update(vertices)
    logger.debug(f"Greedy loose paths: {len(paths)} paths of length {ell}")
    return paths


# --- Templates ---

def template_from_matching(matching: Sequence[Sequence[int]], n_vertices: int, k: int) -> PartialCycleTemplate:
    """Partial matching template with the given edges in the first slots."""
    if n_vertices % k != 0:
        raise StructuralError(f"{n_vertices} vertices cannot be split into {k}-sets")
    layout: List[Optional[int]] = [None] * n_vertices
    for i, edge in enumerate(matching):
        for j, v in enumerate(sorted(edge)):
            layout[k * i + j] = v
    return PartialCycleTemplate(TemplateMode.MATCHING, k, tuple(layout), frozenset(range(len(matching))))


def assemble_partial_cycle(paths: Sequence[LoosePath], n: int, k: int) -> PartialCycleTemplate:
    """Lay out paths on a loose cycle with n edges, (k-2) filler vertices after each.

    Path j takes (ell_j + 1)(k - 1) positions: its own vertices followed by k-2
    filler vertices, so the edge after it links into the next block. Paths are
    kept while the blocks fit, i.e. while the sum of (ell_j + 1) is at most n.
    Filler vertices are the smallest labels not on a kept path.
    """
    if k < 3:
        raise ParameterError("loose cycle templates need k >= 3")
    total = (k - 1) * n
    kept: List[LoosePath] = []
    room = n
    for path in paths:
        if path.k != k:
            raise StructuralError(f"path of uniformity {path.k} in a {k}-uniform template")
        if path.ell + 1 <= room:
            kept.append(path)
            room -= path.ell + 1
    on_paths = {v for path in kept for v in path.vertices}
    if any(not 0 <= v < total for v in on_paths):
        raise StructuralError(f"path vertices fall outside [0, {total})")
    leftover = sorted(set(range(total)) - on_paths)
    filler = iter(leftover[: (k - 2) * len(kept)])

    layout: List[Optional[int]] = [None] * total
    prematched = set()
    position = 0
    for path in kept:
        first_slot = position // (k - 1)
        for v in path.vertices:
            layout[position] = v
            position += 1
        for _ in range(k - 2):
            layout[position] = next(filler)
            position += 1
        prematched.update(range(first_slot, first_slot + path.ell))
    if len(kept) < len(paths):
        logger.debug(f"Template keeps {len(kept)} of {len(paths)} paths (n={n})")
    return PartialCycleTemplate(TemplateMode.CYCLE, k, tuple(layout), frozenset(prematched))


def extend_template(partial: PartialCycleTemplate, all_vertices: Sequence[int], seed: int) -> PartialCycleTemplate:
    """Fill the holes with the unused vertices in seeded random order."""
    all_vertices = list(all_vertices)
    if len(all_vertices) != len(partial.layout):
        raise StructuralError(
            f"{len(all_vertices)} vertices do not fit a template with {len(partial.layout)} positions"
        )
    placed = {v for v in partial.layout if v is not None}
    if not placed <= set(all_vertices):
        raise StructuralError("template places vertices outside the vertex set")
    unused = sorted(set(all_vertices) - placed)
    order = [unused[int(i)] for i in make_rng(seed).permutation(len(unused))]
    fill = iter(order)
    layout = tuple(v if v is not None else next(fill) for v in partial.layout)
    return PartialCycleTemplate(partial.mode, partial.k, layout, partial.prematched)


def random_template(vertices: Sequence[int], k: int, mode: TemplateMode, seed: int) -> PartialCycleTemplate:
    """Complete template on ``vertices`` in uniformly random order, nothing prematched."""
    vertices = list(vertices)
    empty = PartialCycleTemplate(TemplateMode(mode), k, (None,) * len(vertices))
    return extend_template(empty, vertices, seed)


def template_edges(tpl: PartialCycleTemplate) -> List[Tuple[int, ...]]:
    if not tpl.complete:
        raise StructuralError("template has empty positions")
    return [tpl.edge(i) for i in range(tpl.size)]


# --- Reduction to bipartite matching ---

def build_gab(L: KUniformHypergraph, tpl: PartialCycleTemplate) -> BipartiteGraph:
    """Join linker a to slot i whenever {a} + tuple_i is an edge of L."""
    if not tpl.complete:
        raise StructuralError("build_gab needs a complete template")
    linkers, tuples = tpl.linkers, tpl.tuples
    edges = set()
    for i, rest in enumerate(tuples):
        for a in linkers:
            if L.has_edge((a,) + rest):
                edges.add((a, i))
    for i in tpl.prematched:
        if (linkers[i], i) not in edges:
            raise StructuralError(f"prematched slot {i} is not an edge of L")
    return BipartiteGraph(tuple(linkers), tuple(range(tpl.size)), frozenset(edges))


def measure_gab_min_degree(G: BipartiteGraph) -> Tuple[int, int]:
    min_a = min((len(v) for v in G.adjacency_a.values()), default=0)
    min_b = min((len(v) for v in G.adjacency_b.values()), default=0)
    return min_a, min_b


def lift(tpl: PartialCycleTemplate, pairs: Sequence[Tuple[int, int]]) -> List[Tuple[int, ...]]:
    """Hyperedges {a} + tuple_i for matched pairs (a, i), in slot order.

    The linker takes the place of the template's linker in the slot, so cycle
    edges come out in traversal order.
    """
    tuples = tpl.tuples
    at = 0 if tpl.mode == TemplateMode.MATCHING else 1
    return [
        tuples[i][:at] + (a,) + tuples[i][at:]
        for a, i in sorted(pairs, key=lambda pair: pair[1])
    ]


def find_spanning_structure(
    H: KUniformHypergraph,
    R: KUniformHypergraph,
    mode: TemplateMode,
    cfg: Optional[PipelineConfig] = None,
) -> SpanningResult:
    """Perfect matching or loose Hamilton cycle of H + R, or a Hall certificate."""
    cfg = cfg or PipelineConfig()
    mode = TemplateMode(mode)
    L = H.union(R)
    source = L if cfg.mine_union else R
    k, N = H.k, H.n

    if mode == TemplateMode.MATCHING:
        if N % k != 0:
            raise StructuralError(f"{N} vertices cannot be perfectly matched by {k}-sets")
        found = greedy_max_matching(source, seed=cfg.seed)
        partial = template_from_matching(found, N, k)
        paths_used = 0
    else:
        if k < 3:
            raise ParameterError("loose Hamilton cycles are searched for k >= 3")
        if N % (k - 1) != 0 or N // (k - 1) < 2:
            raise StructuralError(f"{N} vertices do not fit a loose {k}-uniform cycle")
        paths = greedy_loose_paths(source, cfg.path_length, seed=cfg.seed)
        partial = assemble_partial_cycle(paths, N // (k - 1), k)
        paths_used = sum(1 for i in partial.prematched if i == 0 or i - 1 not in partial.prematched)

    tpl = extend_template(partial, range(N), cfg.seed)
    G = build_gab(L, tpl)
    result = bipartite_max_matching(G)
    degrees = measure_gab_min_degree(G)
    common = dict(
        mode=mode,
        matching_size=result.size,
        prematched=len(tpl.prematched),
        paths_used=paths_used,
        gab_min_degree=degrees,
    )
    if result.status == MatchStatus.PERFECT:
        edges = lift(tpl, result.matching)
        valid = (
            validate_perfect_matching(L, edges)
            if mode == TemplateMode.MATCHING
            else validate_loose_hamilton_cycle(L, edges)
        )
        if not valid:
            raise StructuralError(f"lifted {mode.value} does not validate")
        return SpanningResult(success=True, edges=edges, **common)
    logger.debug(f"Pipeline ({mode.value}) deficient: matching {result.size} of {tpl.size}")
    return SpanningResult(success=False, certificate=result.certificate, **common)
