"""
Exact oracles and polynomial matching/flow engines.

The exponential searches (Hamilton cycles, cycle lengths, hypergraph perfect
matchings, loose Hamilton cycles) refuse inputs above the guards in
``settings`` with a ResourceGuardError; they never return a heuristic answer.
Bipartite matching (Hopcroft-Karp) and internally disjoint paths (unit-capacity
max-flow on the vertex-split network) are polynomial and unguarded.
"""

import logging
from collections import defaultdict, deque
from enum import Enum
from typing import Dict, Iterator, List, Optional, Set, Tuple, Union

from pydantic import BaseModel, Field, model_validator

import settings
from src.perturbed.errors import ParameterError, ResourceGuardError, StructuralError
from src.perturbed.rng import make_rng
from src.perturbed.structures import (
    BipartiteGraph,
    Digraph,
    Graph,
    KUniformHypergraph,
    bits_to_list,
    is_directed_cycle,
    validate_hamilton_cycle,
    validate_loose_hamilton_cycle,
    validate_perfect_matching,
)

logger = logging.getLogger(__name__)

FAKE_INFINITY = -1


def _guard(what: str, n: int, limit: int) -> None:
    if n > limit:
        raise ResourceGuardError(what, limit, n)


def _as_digraph(D: Union[Graph, Digraph]) -> Tuple[Digraph, int]:
    """Digraph view of D and the shortest admissible cycle length."""
    if isinstance(D, Graph):
        return D.to_digraph(), 3
    return D, 2


# --- Hamilton cycles ---

def _hamilton_cycles(D: Digraph) -> Iterator[List[int]]:
    """Every directed Hamilton cycle of D, rooted at vertex 0."""
    n = D.n
    out, inn = D.out_bits, D.in_bits
    full = (1 << n) - 1
    if n < 2 or any(b == 0 for b in out) or any(b == 0 for b in inn):
        return
    path = [0]

    def feasible(visited: int, end: int) -> bool:
        rest = full & ~visited
        entry = rest | (1 << end)
        exit_ = rest | 1
        for v in bits_to_list(rest):
            if not inn[v] & entry or not out[v] & exit_:
                return False
        return True

    def extend(end: int, visited: int) -> Iterator[List[int]]:
        if visited == full:
            if out[end] & 1:
                yield list(path)
            return
        for v in bits_to_list(out[end] & ~visited):
            grown = visited | (1 << v)
            if not feasible(grown, v):
                continue
            path.append(v)
            yield from extend(v, grown)
            path.pop()

    yield from extend(0, 1)


def iter_hamilton_cycles(D: Union[Graph, Digraph]) -> Iterator[List[int]]:
    """Generator over all directed Hamilton cycles of D, each once, starting at vertex 0.

    An undirected graph yields each of its cycles in both directions.
    """
    _guard("iter_hamilton_cycles", D.n, settings.HAMILTON_EXACT_MAX_N)
    digraph, min_len = _as_digraph(D)
    if D.n < min_len:
        return iter(())
    return _hamilton_cycles(digraph)


def find_hamilton_cycle_exact(D: Union[Graph, Digraph]) -> Optional[List[int]]:
    """A Hamilton cycle of D, or None iff none exists."""
    cycle = next(iter_hamilton_cycles(D), None)
    if cycle is not None and not validate_hamilton_cycle(D, cycle):
        raise StructuralError(f"exact search produced an invalid Hamilton cycle {cycle}")
    return cycle


# --- Cycle lengths ---

def cycle_witnesses(D: Union[Graph, Digraph], lengths: Optional[Set[int]] = None) -> Dict[int, List[int]]:
    """One simple cycle for every requested length that D contains (default 3..n).

    Cycles are enumerated from their smallest vertex, so each is met once per
    direction; the search stops as soon as every requested length has a witness.
    """
    _guard("cycle_witnesses", D.n, settings.PANCYCLIC_EXACT_MAX_N)
    digraph, _ = _as_digraph(D)
    n = digraph.n
    out = digraph.out_bits
    wanted = set(range(3, n + 1)) if lengths is None else set(lengths)
    found: Dict[int, List[int]] = {}
    if not wanted:
        return found
    path: List[int] = []

    def dfs(start: int, end: int, visited: int, allowed: int) -> bool:
        length = len(path)
        if length in wanted and length not in found and out[end] >> start & 1:
            found[length] = list(path)
            if len(found) == len(wanted):
                return True
        if length >= max(wanted - set(found), default=0):
            return False
        for v in bits_to_list(out[end] & allowed & ~visited):
            path.append(v)
            done = dfs(start, v, visited | (1 << v), allowed)
            path.pop()
            if done:
                return True
        return False

    for start in range(n):
        allowed = ((1 << n) - 1) & ~((1 << (start + 1)) - 1)
        path.append(start)
        done = dfs(start, start, 1 << start, allowed)
        path.pop()
        if done:
            break
    return found


def is_pancyclic_exact(D: Union[Graph, Digraph]) -> Tuple[bool, List[int]]:
    """Whether D has cycles of every length 3..n, with the missing lengths."""
    found = cycle_witnesses(D)
    missing = [length for length in range(3, D.n + 1) if length not in found]
    for length, cycle in found.items():
        if len(cycle) != length or not is_directed_cycle(D, cycle):
            raise StructuralError(f"invalid {length}-cycle witness {cycle}")
    return not missing, missing


class CycleSearchOutcome(BaseModel):
    """Result of a budgeted cycle search; ``exhausted`` means the whole space was explored."""

    length: int
    cycle: Optional[List[int]] = None
    exhausted: bool = False
    nodes: int = 0


def search_cycle_of_length(
    D: Union[Graph, Digraph],
    length: int,
    budget: int = settings.DEFAULT_WITNESS_BUDGET,
    seed: int = 0,
) -> CycleSearchOutcome:
    """Randomized DFS for a simple cycle of exactly ``length`` vertices.

    Extensions are tried fewest-onward-options first with random tie breaks.
    Start vertices are processed in random order and removed once done, so a
    search that runs to completion proves absence.
    """
    digraph, min_len = _as_digraph(D)
    n = digraph.n
    if length < min_len or length > n:
        return CycleSearchOutcome(length=length, exhausted=True)
    rng = make_rng(seed)
    out, inn = digraph.out_bits, digraph.in_bits
    remaining = (1 << n) - 1
    nodes = 0
    path: List[int] = []

    class BudgetSpent(Exception):
        pass

    def dfs(start: int, end: int, visited: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetSpent
        if len(path) == length:
            return bool(out[end] >> start & 1)
        free = remaining & ~visited
        candidates = out[end] & free
        if len(path) == length - 1:
            candidates &= inn[start]
        options = bits_to_list(candidates)
        if not options:
            return False
        ties = rng.random(len(options))
        ranked = sorted(
            zip(((out[v] & free).bit_count() for v in options), ties, options)
        )
        for _, _, v in ranked:
            path.append(v)
            if dfs(start, v, visited | (1 << v)):
                return True
            path.pop()
        return False

    try:
        for start in (int(v) for v in rng.permutation(n)):
            if out[start] & remaining and inn[start] & remaining:
                path.append(start)
                if dfs(start, start, 1 << start):
                    cycle = list(path)
                    if not is_directed_cycle(D, cycle):
                        raise StructuralError(f"cycle search produced an invalid cycle {cycle}")
                    return CycleSearchOutcome(length=length, cycle=cycle, nodes=nodes)
                path.pop()
            remaining &= ~(1 << start)
    except BudgetSpent:
        logger.debug(f"Cycle search for length {length} spent its budget of {budget} nodes")
        return CycleSearchOutcome(length=length, exhausted=False, nodes=nodes)
    return CycleSearchOutcome(length=length, exhausted=True, nodes=nodes)


# --- Hypergraph oracles ---

def find_perfect_matching_hypergraph_exact(H: KUniformHypergraph) -> Optional[List[Tuple[int, ...]]]:
    """A perfect matching of H by exhaustive backtracking, or None."""
    _guard("find_perfect_matching_hypergraph_exact", H.n, settings.HYPER_MATCHING_MAX_N_PER_K * H.k)
    if H.n % H.k != 0 or any(H.degree(v) == 0 for v in range(H.n)):
        return None
    full = (1 << H.n) - 1
    masks = {edge: sum(1 << v for v in edge) for edge in H.edges}
    chosen: List[Tuple[int, ...]] = []

    def solve(covered: int) -> bool:
        if covered == full:
            return True
        v = (~covered & full & -(~covered & full)).bit_length() - 1
        for edge in H.incidence[v]:
            if masks[edge] & covered:
                continue
            chosen.append(edge)
            if solve(covered | masks[edge]):
                return True
            chosen.pop()
        return False

    if not solve(0):
        return None
    if not validate_perfect_matching(H, chosen):
        raise StructuralError(f"exact search produced an invalid matching {chosen}")
    return list(chosen)


def find_loose_hamilton_exact(H: KUniformHypergraph) -> Optional[List[Tuple[int, ...]]]:
    """A loose Hamilton cycle of H by exhaustive search, or None.

    The cycle is grown edge by edge through its joints (the vertices shared by
    consecutive edges); once only k-2 vertices are uncovered the closing edge is
    forced to be those vertices plus the last and first joints. Each edge is
    returned in traversal order, from the joint it is entered by to the joint it
    is left by.
    """
    k, n = H.k, H.n
    _guard("find_loose_hamilton_exact", n, settings.LOOSE_CYCLE_MAX_N_PER_K1 * (k - 1))
    if n % (k - 1) != 0 or n // (k - 1) < 2 or any(H.degree(v) == 0 for v in range(n)):
        return None
    full = (1 << n) - 1
    masks = {edge: sum(1 << v for v in edge) for edge in H.edges}
    edges: List[Tuple[int, ...]] = []

    def oriented(edge: Tuple[int, ...], enter: int, leave: int) -> Tuple[int, ...]:
        return (enter, *(v for v in edge if v not in (enter, leave)), leave)

    def close(first_joint: int, joint: int, covered: int) -> bool:
        rest = bits_to_list(full & ~covered)
        last = tuple(sorted(rest + [first_joint, joint]))
        if len(set(last)) == k and last in H.edges:
            edges.append(oriented(last, joint, first_joint))
            return True
        return False

    def grow(first_joint: int, joint: int, covered: int) -> bool:
        if (full & ~covered).bit_count() == k - 2:
            return close(first_joint, joint, covered)
        for edge in H.incidence[joint]:
            if masks[edge] & covered & ~(1 << joint):
                continue
            for nxt in edge:
                if nxt == joint:
                    continue
                edges.append(oriented(edge, joint, nxt))
                if grow(first_joint, nxt, covered | masks[edge]):
                    return True
                edges.pop()
        return False

    for edge in H.incidence[0]:
        for first_joint in edge:
            for joint in edge:
                if joint == first_joint:
                    continue
                edges.append(oriented(edge, first_joint, joint))
                if grow(first_joint, joint, masks[edge]):
                    if not validate_loose_hamilton_cycle(H, edges):
                        raise StructuralError(f"exact search produced an invalid loose cycle {edges}")
                    return list(edges)
                edges.pop()
    return None


# --- Bipartite matching ---

class MatchStatus(str, Enum):
    PERFECT = "perfect"
    DEFICIENT = "deficient"


class MatchingResult(BaseModel):
    """Maximum matching with a Hall violator when it is not perfect."""

    status: MatchStatus
    matching: List[Tuple[int, int]] = Field(default_factory=list)
    certificate: Optional[List[int]] = None
    certificate_side: Optional[str] = None

    @model_validator(mode="after")
    def _certificate_iff_deficient(self):
        if self.status == MatchStatus.PERFECT and self.certificate is not None:
            raise ValueError("a perfect matching carries no certificate")
        if self.status == MatchStatus.DEFICIENT and not self.certificate:
            raise ValueError("a deficient matching needs a Hall certificate")
        if self.certificate is not None and self.certificate_side not in ("A", "B"):
            raise ValueError("certificate_side must be 'A' or 'B'")
        return self

    @property
    def size(self) -> int:
        return len(self.matching)


class HopcroftKarp:
    """Hopcroft-Karp maximum matching on a left-to-right adjacency dict.

    Lists rather than sets keep the matching identical across runs.
    """

    def __init__(self, graph_left: Dict[int, List[int]]):
        self._graph_left = graph_left
        self._left = list(graph_left.keys())
        self._reference_distance = FAKE_INFINITY
        self._pair_left: Dict[int, int] = {}
        self._pair_right: Dict[int, int] = {}
        self._dist_left: Dict[int, int] = {}

    def get_maximum_matching(self) -> Dict[int, int]:
        self._pair_left.clear()
        self._pair_right.clear()
        while self._bfs():
            for left in self._left:
                if left not in self._pair_left:
                    self._dfs(left)
        return dict(self._pair_left)

    def _bfs(self) -> bool:
        queue = deque()
        for left in self._left:
            if left not in self._pair_left:
                self._dist_left[left] = 0
                queue.append(left)
            else:
                self._dist_left[left] = FAKE_INFINITY
        self._reference_distance = FAKE_INFINITY
        while queue:
            left = queue.popleft()
            if self._reference_distance != FAKE_INFINITY and self._dist_left[left] >= self._reference_distance:
                continue
            for right in self._graph_left[left]:
                if right not in self._pair_right:
                    if self._reference_distance == FAKE_INFINITY:
                        self._reference_distance = self._dist_left[left] + 1
                else:
                    other = self._pair_right[right]
                    if self._dist_left[other] == FAKE_INFINITY:
                        self._dist_left[other] = self._dist_left[left] + 1
                        queue.append(other)
        return self._reference_distance != FAKE_INFINITY

    def _dfs(self, left: int) -> bool:
        for right in self._graph_left[left]:
            if right not in self._pair_right:
                if self._reference_distance == self._dist_left[left] + 1:
                    self._pair_left[left] = right
                    self._pair_right[right] = left
                    return True
            else:
                other = self._pair_right[right]
                if self._dist_left[other] == self._dist_left[left] + 1 and self._dfs(other):
                    self._pair_left[left] = right
                    self._pair_right[right] = left
                    return True
        self._dist_left[left] = FAKE_INFINITY
        return False


def _hall_violator(adjacency: Dict[int, List[int]], pairs: Dict[int, int], partner: Dict[int, int]) -> List[int]:
    """Vertices reachable by alternating paths from the unmatched vertices of one side."""
    reached = [v for v in adjacency if v not in pairs]
    seen = set(reached)
    queue = deque(reached)
    while queue:
        v = queue.popleft()
        for w in adjacency[v]:
            u = partner.get(w)
            if u is not None and u not in seen:
                seen.add(u)
                queue.append(u)
    return sorted(seen)


def bipartite_max_matching(G: BipartiteGraph) -> MatchingResult:
    """Maximum matching of G; a deficient result carries W with |N(W)| < |W|."""
    pair_a = HopcroftKarp(G.adjacency_a).get_maximum_matching()
    pair_b = {b: a for a, b in pair_a.items()}
    matching = sorted(pair_a.items())
    size = len(matching)
    if size == len(G.part_a) == len(G.part_b):
        return MatchingResult(status=MatchStatus.PERFECT, matching=matching)

    if size < len(G.part_a):
        side, certificate = "A", _hall_violator(G.adjacency_a, pair_a, pair_b)
    else:
        side, certificate = "B", _hall_violator(G.adjacency_b, pair_b, pair_a)
    if len(G.neighborhood(certificate, side)) >= len(certificate):
        raise StructuralError(f"Hall certificate on side {side} is not a violator")
    logger.debug(f"Matching deficient: size {size}, violator of {len(certificate)} on side {side}")
    return MatchingResult(
        status=MatchStatus.DEFICIENT,
        matching=matching,
        certificate=certificate,
        certificate_side=side,
    )


# --- Internally disjoint paths ---

class VertexSplitFlow:
    """Unit-capacity max-flow between s and t with every other vertex split in two.

    Vertex v becomes v_in = 2v and v_out = 2v+1 joined by a capacity-1 arc; an
    arc (u, v) of D becomes u_out -> v_in. Source is s_out, sink is t_in.
    """

    def __init__(self, D: Digraph, s: int, t: int):
        self.s, self.t = s, t
        self.capacity: Dict[int, Dict[int, int]] = defaultdict(lambda: defaultdict(int))
        for v in range(D.n):
            if v not in (s, t):
                self.capacity[2 * v][2 * v + 1] = 1
        for u, v in D.arcs:
            if v == s or u == t:
                continue
            self.capacity[2 * u + 1][2 * v] += 1
        self.original = {x: dict(row) for x, row in self.capacity.items()}
        self.source, self.sink = 2 * s + 1, 2 * t
        self.value = 0

    def _bfs(self, parent: Dict[int, int]) -> bool:
        queue = deque([self.source])
        parent.clear()
        parent[self.source] = self.source
        while queue:
            x = queue.popleft()
            for y, cap in self.capacity[x].items():
                if cap > 0 and y not in parent:
                    parent[y] = x
                    if y == self.sink:
                        return True
                    queue.append(y)
        return False

    def edmonds_karp(self) -> int:
        parent: Dict[int, int] = {}
        while self._bfs(parent):
            y = self.sink
            while y != self.source:
                x = parent[y]
                self.capacity[x][y] -= 1
                self.capacity[y][x] += 1
                y = x
            self.value += 1
        return self.value

    def flow_paths(self) -> List[List[int]]:
        """Decompose the current flow into vertex paths from s to t."""
        carried: Dict[int, List[int]] = defaultdict(list)
        for x, row in self.original.items():
            for y, cap in sorted(row.items(), reverse=True):
                carried[x].extend([y] * (cap - self.capacity[x][y]))
        paths = []
        for _ in range(self.value):
            x, path = self.source, [self.s]
            while x != self.sink:
                y = carried[x].pop()
                if y % 2 == 0:
                    path.append(y // 2)
                x = y
            paths.append(path)
        return sorted(paths, key=lambda p: (len(p), p))

    def source_side(self) -> Set[int]:
        seen = {self.source}
        queue = deque([self.source])
        while queue:
            x = queue.popleft()
            for y, cap in self.capacity[x].items():
                if cap > 0 and y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen


class DisjointPaths(BaseModel):
    paths: List[List[int]] = Field(default_factory=list)
    lower_bound: bool = False

    @property
    def count(self) -> int:
        return len(self.paths)


def _shortest_path(D: Digraph, s: int, t: int, blocked: int, skip_direct: bool) -> Optional[List[int]]:
    parent = {s: s}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        for y in D.out_neighbors(x):
            if y == t:
                if x == s and skip_direct:
                    continue
                path = [t]
                while x != s:
                    path.append(x)
                    x = parent[x]
                return [s] + path[::-1]
            if y in parent or blocked >> y & 1:
                continue
            parent[y] = x
            queue.append(y)
    return None


def vertex_disjoint_paths(
    D: Union[Graph, Digraph], s: int, t: int, maxlen: Optional[int] = None
) -> DisjointPaths:
    """A family of internally vertex-disjoint s->t paths.

    Without ``maxlen`` the family is maximum (Menger, via max-flow). With ``maxlen``
    it is a greedy family of shortest paths of length at most ``maxlen``, flagged
    as a lower bound.
    """
    if s == t:
        raise ParameterError("s and t must differ")
    digraph, _ = _as_digraph(D)
    if maxlen is None:
        flow = VertexSplitFlow(digraph, s, t)
        flow.edmonds_karp()
        return DisjointPaths(paths=flow.flow_paths())
    paths: List[List[int]] = []
    blocked = 0
    direct_used = False
    while True:
        path = _shortest_path(digraph, s, t, blocked, direct_used)
        if path is None or len(path) - 1 > maxlen:
            break
        if len(path) == 2:
            direct_used = True
        for v in path[1:-1]:
            blocked |= 1 << v
        paths.append(path)
    return DisjointPaths(paths=paths, lower_bound=True)


def vertex_disjoint_path_count(
    D: Union[Graph, Digraph], s: int, t: int, maxlen: Optional[int] = None
) -> int:
    """Maximum number of internally disjoint s->t paths (a lower bound when ``maxlen`` is set)."""
    if maxlen is None:
        if s == t:
            raise ParameterError("s and t must differ")
        flow = VertexSplitFlow(_as_digraph(D)[0], s, t)
        return flow.edmonds_karp()
    return vertex_disjoint_paths(D, s, t, maxlen).count


def min_vertex_separator(D: Union[Graph, Digraph], s: int, t: int) -> Optional[List[int]]:
    """A minimum set of vertices whose deletion leaves no s->t path; None when s->t is an arc."""
    digraph, _ = _as_digraph(D)
    if s == t:
        raise ParameterError("s and t must differ")
    if digraph.has_arc(s, t):
        return None
    flow = VertexSplitFlow(digraph, s, t)
    flow.edmonds_karp()
    reach = flow.source_side()
    separator = sorted(v for v in range(digraph.n) if 2 * v in reach and 2 * v + 1 not in reach)
    if len(separator) != flow.value:
        raise StructuralError(f"separator of size {len(separator)} disagrees with flow {flow.value}")
    return separator
