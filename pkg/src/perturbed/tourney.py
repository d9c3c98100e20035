"""
Tournament analysis: degree census, core sets, strong and t-strong connectivity,
short internally disjoint paths, degree retention, diameter, and an exact search
for arc-disjoint Hamilton cycles on small tournaments.
"""

import logging
import math
from collections import defaultdict
from typing import List, Optional, Sequence, Union

from pydantic import BaseModel

import settings
from src.perturbed.errors import ParameterError, ResourceGuardError, StructuralError
from src.perturbed.exact import bipartite_max_matching, iter_hamilton_cycles, min_vertex_separator, vertex_disjoint_path_count
from src.perturbed.structures import BipartiteGraph, Digraph, Graph, Tournament, bits_to_list, validate_hamilton_cycle

logger = logging.getLogger(__name__)

AnyDigraph = Union[Graph, Digraph]


class ConnectivityReport(BaseModel):
    """t-strong connectivity verdict; ``diameter`` is None when some pair is unreachable."""

    t: int
    connected: bool
    witness: Optional[List[int]] = None
    diameter: Optional[int] = None


# --- Degrees ---

def extreme_degree_census(T: Tournament, k: int, direction: str = "in") -> List[int]:
    """Vertices whose in- (or out-) degree is below (k-1)/2; there are always fewer than k."""
    if not 1 <= k <= T.n:
        raise ParameterError(f"k must lie in [1, {T.n}], got {k}")
    degrees = T.in_degrees() if direction == "in" else T.out_degrees()
    return [v for v, d in enumerate(degrees) if 2 * d < k - 1]


def select_core_set(T: Tournament, t: int) -> List[int]:
    """t vertices with indegree and outdegree both at least n/6."""
    n = T.n
    if not 1 <= t <= n / 3:
        raise ParameterError(f"t must lie in [1, n/3] = [1, {n / 3:.2f}], got {t}")
    ins, outs = T.in_degrees(), T.out_degrees()
    candidates = [v for v in range(n) if 6 * ins[v] >= n and 6 * outs[v] >= n]
    candidates.sort(key=lambda v: (-min(ins[v], outs[v]), v))
    if len(candidates) < t:
        raise StructuralError(f"only {len(candidates)} vertices have both degrees >= n/6")
    return sorted(candidates[:t])


def degree_retention(T: Tournament, P: Tournament) -> float:
    """Fraction of vertices keeping at least a third of both their degrees after perturbation."""
    if T.n != P.n:
        raise ParameterError("tournaments differ in size")
    if T.n == 0:
        return 1.0
    kept = sum(
        1
        for v in range(T.n)
        if 3 * P.in_degree(v) >= T.in_degree(v) and 3 * P.out_degree(v) >= T.out_degree(v)
    )
    return kept / T.n


# --- Strong connectivity ---

class StronglyConnectedComponentComputation:
    """Iterative Tarjan; components come out in topological order of the condensation."""

    BEGIN, CONTINUE, RETURN = 0, 1, 2

    def __init__(self, adjacency_list: Sequence[Sequence[int]]):
        self.graph = adjacency_list

    def get_result(self) -> List[List[int]]:
        self.indices = {}
        self.lowlinks = defaultdict(lambda: -1)
        self.stack_indices = {}
        self.current_index = 0
        self.stack = []
        self.sccs = []
        for i in range(len(self.graph)):
            if i not in self.indices:
                self.visit(i)
        self.sccs.reverse()
        return self.sccs

    def visit(self, vertex: int) -> None:
        iter_stack = [(vertex, None, None, self.BEGIN)]
        while iter_stack:
            v, w, succ_index, state = iter_stack.pop()
            if state == self.BEGIN:
                self.current_index += 1
                self.indices[v] = self.current_index
                self.lowlinks[v] = self.current_index
                self.stack_indices[v] = len(self.stack)
                self.stack.append(v)
                iter_stack.append((v, None, 0, self.CONTINUE))
            elif state == self.CONTINUE:
                successors = self.graph[v]
                if succ_index == len(successors):
                    if self.lowlinks[v] == self.indices[v]:
                        stack_index = self.stack_indices[v]
                        scc = self.stack[stack_index:]
                        del self.stack[stack_index:]
                        for x in scc:
                            del self.stack_indices[x]
                        self.sccs.append(sorted(scc))
                else:
                    w = successors[succ_index]
                    if w not in self.indices:
                        iter_stack.append((v, w, succ_index, self.RETURN))
                        iter_stack.append((w, None, None, self.BEGIN))
                    else:
                        if w in self.stack_indices:
                            self.lowlinks[v] = min(self.lowlinks[v], self.indices[w])
                        iter_stack.append((v, None, succ_index + 1, self.CONTINUE))
            elif state == self.RETURN:
                self.lowlinks[v] = min(self.lowlinks[v], self.lowlinks[w])
                iter_stack.append((v, None, succ_index + 1, self.CONTINUE))


def strongly_connected_components(D: AnyDigraph) -> List[List[int]]:
    D = D.to_digraph()
    adjacency = [D.out_neighbors(v) for v in range(D.n)]
    return StronglyConnectedComponentComputation(adjacency).get_result()


def is_strongly_connected(D: AnyDigraph) -> bool:
    return D.n <= 1 or len(strongly_connected_components(D)) == 1


def diameter(D: AnyDigraph) -> Union[int, float]:
    """Largest shortest-path distance over ordered pairs; math.inf if some pair is unreachable."""
    D = D.to_digraph()
    n = D.n
    full = (1 << n) - 1
    worst = 0
    for s in range(n):
        reach = frontier = 1 << s
        depth = 0
        while reach != full:
            step = 0
            for x in bits_to_list(frontier):
                step |= D.out_bits[x]
            frontier = step & ~reach
            if not frontier:
                return math.inf
            reach |= frontier
            depth += 1
        worst = max(worst, depth)
    return worst


def _pad(witness: List[int], size: int, avoid: set, n: int) -> List[int]:
    extra = [v for v in range(n) if v not in avoid and v not in witness]
    return sorted(witness + extra[: size - len(witness)])


def is_t_strongly_connected(D: AnyDigraph, t: int) -> ConnectivityReport:
    """Whether D stays strongly connected after deleting any t-1 vertices.

    Menger: only ordered pairs (u, v) without the arc u->v can be separated, and
    they need t internally disjoint paths. A failing report carries t-1 vertices
    whose deletion disconnects D, re-verified before returning.
    """
    D = D.to_digraph()
    n = D.n
    if t < 1:
        raise ParameterError(f"t must be positive, got {t}")
    if n <= t:
        raise ParameterError(f"need n > t, got n={n}, t={t}")
    diam = diameter(D)
    report_diameter = None if diam == math.inf else int(diam)

    witness: Optional[List[int]] = None
    components = strongly_connected_components(D)
    if len(components) > 1:
        # A sink-component vertex never reaches a source-component vertex.
        witness = _pad([], t - 1, {components[-1][0], components[0][0]}, n)
    elif t > 1:
        for u in range(n):
            for v in range(n):
                if u == v or D.has_arc(u, v):
                    continue
                if vertex_disjoint_path_count(D, u, v) < t:
                    separator = min_vertex_separator(D, u, v)
                    witness = _pad(separator, t - 1, {u, v}, n)
                    break
            if witness is not None:
                break

    if witness is None:
        return ConnectivityReport(t=t, connected=True, diameter=report_diameter)
    rest, _ = D.induced(x for x in range(n) if x not in witness)
    if is_strongly_connected(rest):
        raise StructuralError(f"deleting {witness} leaves a strongly connected digraph")
    return ConnectivityReport(t=t, connected=False, witness=witness, diameter=report_diameter)


# --- Short disjoint paths ---

def short_disjoint_paths(
    P: AnyDigraph,
    w: int,
    v: int,
    target: int,
    maxlen: int = 3,
    safe: Optional[Sequence[int]] = None,
) -> List[List[int]]:
    """Greedy family of internally disjoint w->v paths of length at most ``maxlen``.

    Order: the arc w->v, then w,x,v through common neighbours, then w,x,y,v along
    a matching of arcs from unused out-neighbours of w into unused in-neighbours
    of v, then (maxlen 4) w,x,y,z,v through unused in-neighbours z of v, trying
    ``safe`` vertices first.
    """
    if w == v:
        raise ParameterError("w and v must differ")
    if maxlen not in (3, 4):
        raise ParameterError(f"maxlen must be 3 or 4, got {maxlen}")
    D = P.to_digraph()
    paths: List[List[int]] = []
    used = {w, v}

    def done() -> bool:
        return len(paths) >= target

    if D.has_arc(w, v):
        paths.append([w, v])
    for x in D.out_neighbors(w):
        if done():
            break
        if x not in used and D.has_arc(x, v):
            paths.append([w, x, v])
            used.add(x)

    if not done():
        U_plus = tuple(x for x in D.out_neighbors(w) if x not in used)
        U_minus = tuple(y for y in D.in_neighbors(v) if y not in used)
        arcs = frozenset((x, y) for x in U_plus for y in U_minus if x != y and D.has_arc(x, y))
        matching = bipartite_max_matching(BipartiteGraph(U_plus, U_minus, arcs)).matching
        for x, y in matching:
            if done():
                break
            paths.append([w, x, y, v])
            used.update((x, y))

    if maxlen == 4 and not done():
        preferred = set(safe or ())
        ends = sorted(
            (z for z in D.in_neighbors(v) if z not in used),
            key=lambda z: (z not in preferred, z),
        )
        for z in ends:
            if done():
                break
            hop = _two_step(D, w, z, used | {z})
            if hop is not None:
                x, y = hop
                paths.append([w, x, y, z, v])
                used.update((x, y, z))

    inner = [x for path in paths for x in path[1:-1]]
    if len(inner) != len(set(inner)) or any(len(path) - 1 > maxlen for path in paths):
        raise StructuralError("short path family is not internally disjoint")
    return paths


def _two_step(D: Digraph, w: int, z: int, used: set) -> Optional[tuple]:
    """x, y with w->x->y->z, both unused."""
    for x in D.out_neighbors(w):
        if x in used:
            continue
        for y in D.out_neighbors(x):
            if y != x and y not in used and D.has_arc(y, z):
                return x, y
    return None


def safe_vertices(P: AnyDigraph, w: int, t: int) -> List[int]:
    """Vertices reached from w by 3t internally disjoint paths of length at most 3."""
    D = P.to_digraph()
    return [
        v for v in range(D.n)
        if v != w and len(short_disjoint_paths(D, w, v, 3 * t, maxlen=3)) >= 3 * t
    ]


# --- Arc-disjoint Hamilton cycles ---

def _cycle_arcs(cycle: List[int]) -> List[tuple]:
    return [(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))]


def arc_disjoint_hamilton_cycles(T: Tournament, q: int) -> Optional[List[List[int]]]:
    """q pairwise arc-disjoint Hamilton cycles by layered exact backtracking, or None."""
    if not isinstance(T, Tournament):
        raise ParameterError(f"arc-disjoint search takes a Tournament, got {type(T).__name__}")
    if q < 1:
        raise ParameterError(f"q must be positive, got {q}")
    if T.n > settings.ARC_DISJOINT_MAX_N:
        raise ResourceGuardError("arc_disjoint_hamilton_cycles", settings.ARC_DISJOINT_MAX_N, T.n)

    def search(D: Digraph, remaining: int) -> Optional[List[List[int]]]:
        if remaining == 0:
            return []
        if min(D.in_degrees() + D.out_degrees(), default=0) < remaining:
            return None
        for cycle in iter_hamilton_cycles(D):
            rest = search(D.remove_arcs(_cycle_arcs(cycle)), remaining - 1)
            if rest is not None:
                return [cycle] + rest
        return None

    cycles = search(Digraph(T.n, T.arcs), q)
    if cycles is None:
        return None
    seen = set()
    for cycle in cycles:
        arcs = _cycle_arcs(cycle)
        if not validate_hamilton_cycle(T, cycle) or seen.intersection(arcs):
            raise StructuralError("arc-disjoint search returned overlapping or invalid cycles")
        seen.update(arcs)
    return cycles
