"""
Core immutable combinatorial types and structural validators.

Vertices are dense integer labels in [0, n). Graph edges are stored as sorted
pairs, hypergraph edges as sorted k-tuples, so equality of edge sets never
depends on the order in which edges were supplied. Adjacency is kept as Python
int bitsets, computed lazily and cached on the (frozen) instance.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import settings
from src.perturbed.errors import ParameterError, ResourceGuardError, StructuralError

logger = logging.getLogger(__name__)

Edge = Tuple[int, ...]


def bits_to_list(mask: int) -> List[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _check_vertex(v: int, n: int) -> None:
    if not 0 <= v < n:
        raise StructuralError(f"vertex {v} outside [0, {n})")


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph."""

    n: int
    edges: FrozenSet[Tuple[int, int]] = frozenset()

    def __post_init__(self):
        if self.n < 0:
            raise StructuralError(f"vertex count must be non-negative, got {self.n}")
        normalized = set()
        for u, v in self.edges:
            _check_vertex(u, self.n)
            _check_vertex(v, self.n)
            if u == v:
                raise StructuralError(f"self-loop at {u}")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @cached_property
    def adjacency(self) -> List[int]:
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj

    # Digraph-compatible views, so validators accept either type.
    @property
    def out_bits(self) -> List[int]:
        return self.adjacency

    @property
    def in_bits(self) -> List[int]:
        return self.adjacency

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.n and 0 <= v < self.n and bool(self.adjacency[u] >> v & 1)

    has_arc = has_edge

    def neighbors(self, v: int) -> List[int]:
        return bits_to_list(self.adjacency[v])

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def min_degree(self) -> int:
        return min((self.degree(v) for v in range(self.n)), default=0)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def union(self, other: "Graph") -> "Graph":
        if other.n != self.n:
            raise StructuralError(f"cannot unite graphs on {self.n} and {other.n} vertices")
        return Graph(self.n, self.edges | other.edges)

    def to_digraph(self) -> "Digraph":
        """The symmetric digraph with both orientations of every edge."""
        arcs = set()
        for u, v in self.edges:
            arcs.add((u, v))
            arcs.add((v, u))
        return Digraph(self.n, frozenset(arcs))


@dataclass(frozen=True)
class Digraph:
    """Directed graph without loops; 2-cycles are allowed."""

    n: int
    arcs: FrozenSet[Tuple[int, int]] = frozenset()

    def __post_init__(self):
        if self.n < 0:
            raise StructuralError(f"vertex count must be non-negative, got {self.n}")
        arcs = frozenset((int(u), int(v)) for u, v in self.arcs)
        for u, v in arcs:
            _check_vertex(u, self.n)
            _check_vertex(v, self.n)
            if u == v:
                raise StructuralError(f"self-loop at {u}")
        object.__setattr__(self, "arcs", arcs)

    @cached_property
    def out_bits(self) -> List[int]:
        out = [0] * self.n
        for u, v in self.arcs:
            out[u] |= 1 << v
        return out

    @cached_property
    def in_bits(self) -> List[int]:
        inn = [0] * self.n
        for u, v in self.arcs:
            inn[v] |= 1 << u
        return inn

    def has_arc(self, u: int, v: int) -> bool:
        return 0 <= u < self.n and 0 <= v < self.n and bool(self.out_bits[u] >> v & 1)

    def out_neighbors(self, v: int) -> List[int]:
        return bits_to_list(self.out_bits[v])

    def in_neighbors(self, v: int) -> List[int]:
        return bits_to_list(self.in_bits[v])

    def out_degree(self, v: int) -> int:
        return self.out_bits[v].bit_count()

    def in_degree(self, v: int) -> int:
        return self.in_bits[v].bit_count()

    def out_degrees(self) -> List[int]:
        return [b.bit_count() for b in self.out_bits]

    def in_degrees(self) -> List[int]:
        return [b.bit_count() for b in self.in_bits]

    @property
    def num_arcs(self) -> int:
        return len(self.arcs)

    def union(self, other: "Digraph") -> "Digraph":
        if other.n != self.n:
            raise StructuralError(f"cannot unite digraphs on {self.n} and {other.n} vertices")
        return Digraph(self.n, self.arcs | other.arcs)

    def remove_arcs(self, arcs: Iterable[Tuple[int, int]]) -> "Digraph":
        return Digraph(self.n, self.arcs - frozenset(arcs))

    def induced(self, vertices: Iterable[int]) -> Tuple["Digraph", List[int]]:
        """Induced sub-digraph relabelled to [0, len); returns it with the old labels."""
        labels = sorted(set(vertices))
        index = {v: i for i, v in enumerate(labels)}
        arcs = frozenset(
            (index[u], index[v]) for u, v in self.arcs if u in index and v in index
        )
        return Digraph(len(labels), arcs), labels

    def to_digraph(self) -> "Digraph":
        return self


@dataclass(frozen=True)
class Tournament(Digraph):
    """Orientation of the complete graph: exactly one arc per vertex pair."""

    def __post_init__(self):
        super().__post_init__()
        if len(self.arcs) != comb(self.n, 2):
            raise StructuralError(
                f"tournament on {self.n} vertices needs {comb(self.n, 2)} arcs, got {len(self.arcs)}"
            )
        for u, v in self.arcs:
            if (v, u) in self.arcs:
                raise StructuralError(f"pair {{{u}, {v}}} oriented both ways")
        if sum(self.in_degrees()) != comb(self.n, 2):
            raise StructuralError("indegree sum differs from C(n, 2)")

    @classmethod
    def from_bits(cls, n: int, mask: int) -> "Tournament":
        """Tournament whose i-th pair (colex order) points forward iff bit i of mask is set."""
        arcs = set()
        index = 0
        for j in range(n):
            for i in range(j):
                arcs.add((i, j) if mask >> index & 1 else (j, i))
                index += 1
        return cls(n, frozenset(arcs))

    def beats(self, u: int, v: int) -> bool:
        return self.has_arc(u, v)


@dataclass(frozen=True)
class KUniformHypergraph:
    """k-uniform hypergraph; every edge is a sorted k-tuple of distinct vertices."""

    n: int
    k: int
    edges: FrozenSet[Edge] = frozenset()

    def __post_init__(self):
        if self.k < 2:
            raise StructuralError(f"uniformity must be at least 2, got {self.k}")
        if self.n < 0:
            raise StructuralError(f"vertex count must be non-negative, got {self.n}")
        normalized = set()
        for edge in self.edges:
            canonical = tuple(sorted(int(v) for v in edge))
            if len(canonical) != self.k or len(set(canonical)) != self.k:
                raise StructuralError(f"edge {edge} is not a set of {self.k} distinct vertices")
            for v in canonical:
                _check_vertex(v, self.n)
            normalized.add(canonical)
        object.__setattr__(self, "edges", frozenset(normalized))

    @cached_property
    def incidence(self) -> List[List[Edge]]:
        """Sorted list of edges through each vertex."""
        out: List[List[Edge]] = [[] for _ in range(self.n)]
        for edge in sorted(self.edges):
            for v in edge:
                out[v].append(edge)
        return out

    def has_edge(self, edge: Iterable[int]) -> bool:
        return tuple(sorted(edge)) in self.edges

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def union(self, other: "KUniformHypergraph") -> "KUniformHypergraph":
        if (other.n, other.k) != (self.n, self.k):
            raise StructuralError(
                f"cannot unite ({self.n}, {self.k}) and ({other.n}, {other.k}) hypergraphs"
            )
        return KUniformHypergraph(self.n, self.k, self.edges | other.edges)


@dataclass(frozen=True)
class BipartiteGraph:
    """Two labelled parts with cross edges (a, b), a in part_a and b in part_b.

    Labels of the two parts live in separate namespaces, so the same integer may
    appear on both sides.
    """

    part_a: Tuple[int, ...]
    part_b: Tuple[int, ...]
    edges: FrozenSet[Tuple[int, int]] = frozenset()

    def __post_init__(self):
        part_a = tuple(self.part_a)
        part_b = tuple(self.part_b)
        if len(set(part_a)) != len(part_a) or len(set(part_b)) != len(part_b):
            raise StructuralError("duplicate vertex label inside a part")
        a_set, b_set = set(part_a), set(part_b)
        edges = frozenset((a, b) for a, b in self.edges)
        for a, b in edges:
            if a not in a_set or b not in b_set:
                raise StructuralError(f"edge ({a}, {b}) does not cross the parts")
        object.__setattr__(self, "part_a", part_a)
        object.__setattr__(self, "part_b", part_b)
        object.__setattr__(self, "edges", edges)

    @cached_property
    def adjacency_a(self) -> Dict[int, List[int]]:
        adj: Dict[int, List[int]] = {a: [] for a in self.part_a}
        for a, b in sorted(self.edges):
            adj[a].append(b)
        return adj

    @cached_property
    def adjacency_b(self) -> Dict[int, List[int]]:
        adj: Dict[int, List[int]] = {b: [] for b in self.part_b}
        for a, b in sorted(self.edges):
            adj[b].append(a)
        return adj

    def neighborhood(self, vertices: Iterable[int], side: str = "A") -> set:
        adj = self.adjacency_a if side == "A" else self.adjacency_b
        out = set()
        for v in vertices:
            out.update(adj[v])
        return out

    def union(self, other: "BipartiteGraph") -> "BipartiteGraph":
        if set(other.part_a) != set(self.part_a) or set(other.part_b) != set(self.part_b):
            raise StructuralError("cannot unite bipartite graphs with different parts")
        return BipartiteGraph(self.part_a, self.part_b, self.edges | other.edges)


AnyDigraph = Union[Graph, Digraph]


def min_in_degree(D: Digraph) -> int:
    return min(D.in_degrees(), default=0)


def min_out_degree(D: Digraph) -> int:
    return min(D.out_degrees(), default=0)


def min_q_degree(H: KUniformHypergraph, q: int) -> int:
    """Minimum over all q-sets of the number of edges containing the set."""
    if not 1 <= q <= H.k - 1:
        raise ParameterError(f"q must lie in [1, {H.k - 1}], got {q}")
    if H.n < H.k:
        raise ParameterError(f"need n >= k, got n={H.n}, k={H.k}")
    if q >= 2 and H.n > settings.QDEGREE_MAX_N:
        raise ResourceGuardError("min_q_degree", settings.QDEGREE_MAX_N, H.n)
    counts = Counter()
    for edge in H.edges:
        counts.update(combinations(edge, q))
    if len(counts) < comb(H.n, q):
        return 0
    return min(counts.values())


def validate_hamilton_cycle(D: AnyDigraph, order: Sequence[int]) -> bool:
    """True iff ``order`` visits every vertex once and each cyclic step is an arc."""
    n = D.n
    min_len = 3 if isinstance(D, Graph) else 2
    try:
        order = [int(v) for v in order]
    except (TypeError, ValueError):
        return False
    if n < min_len or len(order) != n or set(order) != set(range(n)):
        return False
    return all(D.has_arc(order[i], order[(i + 1) % n]) for i in range(n))


def is_directed_cycle(D: AnyDigraph, cycle: Sequence[int]) -> bool:
    """True iff ``cycle`` is a simple cycle of D (any length, at least 2 for digraphs, 3 for graphs)."""
    min_len = 3 if isinstance(D, Graph) else 2
    length = len(cycle)
    if length < min_len or len(set(cycle)) != length:
        return False
    if any(not 0 <= v < D.n for v in cycle):
        return False
    return all(D.has_arc(cycle[i], cycle[(i + 1) % length]) for i in range(length))


def validate_perfect_matching(H: KUniformHypergraph, matching: Iterable[Iterable[int]]) -> bool:
    """True iff the edges lie in H, are pairwise disjoint and cover every vertex."""
    if H.n % H.k != 0:
        return False
    covered = set()
    count = 0
    for edge in matching:
        canonical = tuple(sorted(edge))
        if canonical not in H.edges or covered.intersection(canonical):
            return False
        covered.update(canonical)
        count += 1
    return count * H.k == H.n and covered == set(range(H.n))


def validate_loose_hamilton_cycle(H: KUniformHypergraph, cycle: Sequence[Iterable[int]]) -> bool:
    """True iff ``cycle`` is a loose Hamilton cycle of H.

    Edges are read in traversal order: the last vertex of each edge is the first
    vertex of the next one (cyclically), consecutive edges share only that vertex,
    non-consecutive edges are disjoint and every vertex is covered. With two edges
    both joints lie in the same pair, which then shares exactly those two vertices.
    """
    k, n = H.k, H.n
    if n % (k - 1) != 0:
        return False
    try:
        ordered = [tuple(int(v) for v in e) for e in cycle]
    except (TypeError, ValueError):
        return False
    m = len(ordered)
    if m < 2 or m != n // (k - 1):
        return False
    if any(len(e) != k or tuple(sorted(e)) not in H.edges for e in ordered):
        return False
    if any(ordered[i][-1] != ordered[(i + 1) % m][0] for i in range(m)):
        return False
    multiplicity = Counter(v for e in ordered for v in e)
    if set(multiplicity) != set(range(n)) or max(multiplicity.values()) > 2:
        return False
    sets = [set(e) for e in ordered]
    if m == 2:
        return sets[0] & sets[1] == {ordered[0][0], ordered[0][-1]}
    for i in range(m):
        for j in range(i + 1, m):
            shared = len(sets[i] & sets[j])
            consecutive = j == i + 1 or (i == 0 and j == m - 1)
            if shared != (1 if consecutive else 0):
                return False
    return True


def validate_loose_path(H: Optional[KUniformHypergraph], edges: Sequence[Iterable[int]]) -> bool:
    """True iff the edges form a loose path (of H, when given)."""
    sets = [set(e) for e in edges]
    if not sets:
        return False
    k = len(sets[0])
    if any(len(s) != k for s in sets):
        return False
    if H is not None and any(not H.has_edge(s) for s in sets):
        return False
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            shared = len(sets[i] & sets[j])
            if shared != (1 if j == i + 1 else 0):
                return False
    return True
