from itertools import permutations

import networkx as nx
import pytest

from src.perturbed.errors import ParameterError, ResourceGuardError
from src.perturbed.exact import (
    MatchStatus,
    bipartite_max_matching,
    cycle_witnesses,
    find_hamilton_cycle_exact,
    find_loose_hamilton_exact,
    find_perfect_matching_hypergraph_exact,
    is_pancyclic_exact,
    iter_hamilton_cycles,
    min_vertex_separator,
    search_cycle_of_length,
    vertex_disjoint_path_count,
    vertex_disjoint_paths,
)
from src.perturbed.generators import (
    complete_bipartite_digraph,
    complete_bipartite_hypergraph,
    complete_digraph,
    complete_hypergraph,
    directed_cycle,
    random_tournament,
    regular_tournament,
    transitive_cluster_tournament,
)
from src.perturbed.perturb import random_digraph
from src.perturbed.rng import make_rng
from src.perturbed.structures import (
    BipartiteGraph,
    Digraph,
    Graph,
    KUniformHypergraph,
    is_directed_cycle,
    validate_hamilton_cycle,
    validate_loose_hamilton_cycle,
    validate_perfect_matching,
)


# --- Hamilton cycles ---

def test_hamilton_cycle_of_directed_cycle(cycle5):
    assert find_hamilton_cycle_exact(cycle5) == [0, 1, 2, 3, 4]


def test_complete_digraph_has_all_rooted_cycles():
    cycles = list(iter_hamilton_cycles(complete_digraph(4)))
    assert len(cycles) == 6
    assert len({tuple(c) for c in cycles}) == 6
    assert all(c[0] == 0 and validate_hamilton_cycle(complete_digraph(4), c) for c in cycles)


def test_undirected_cycle_yields_both_directions():
    C = Graph(5, frozenset({(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)}))
    assert sorted(iter_hamilton_cycles(C)) == [[0, 1, 2, 3, 4], [0, 4, 3, 2, 1]]


def test_no_hamilton_cycle_in_unbalanced_bipartite():
    assert find_hamilton_cycle_exact(complete_bipartite_digraph(3, 6)) is None


def test_no_hamilton_cycle_without_strong_connectivity():
    assert find_hamilton_cycle_exact(transitive_cluster_tournament(2, 1)) is None


def test_hamilton_guard():
    with pytest.raises(ResourceGuardError):
        find_hamilton_cycle_exact(Digraph(25))


def has_hamilton_cycle_by_permutations(D):
    n = D.n
    for rest in permutations(range(1, n)):
        order = (0,) + rest
        if all(D.has_arc(order[i], order[(i + 1) % n]) for i in range(n)):
            return True
    return False


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hamilton_search_agrees_with_permutations_on_every_digraph(n):
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    for mask in range(1 << len(pairs)):
        D = Digraph(n, frozenset(p for i, p in enumerate(pairs) if mask >> i & 1))
        assert (find_hamilton_cycle_exact(D) is not None) == has_hamilton_cycle_by_permutations(D)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_hamilton_search_agrees_with_permutations_on_every_graph(n):
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for mask in range(1 << len(pairs)):
        G = Graph(n, frozenset(p for i, p in enumerate(pairs) if mask >> i & 1))
        assert (find_hamilton_cycle_exact(G) is not None) == has_hamilton_cycle_by_permutations(G)


def test_hamilton_search_agrees_with_permutations_on_random_digraphs():
    for seed in range(300):
        n = 5 + seed % 3
        D = random_digraph(n, (7 * seed) % (n * (n - 1) + 1), seed)
        assert (find_hamilton_cycle_exact(D) is not None) == has_hamilton_cycle_by_permutations(D)


# --- Cycle lengths ---

def test_complete_digraph_is_pancyclic(k6):
    assert is_pancyclic_exact(k6) == (True, [])


def test_directed_cycle_misses_short_lengths(cycle5):
    assert is_pancyclic_exact(cycle5) == (False, [3, 4])


def cycle_lengths_by_enumeration(D):
    """Lengths 3..n of simple cycles, by trying every vertex sequence from its smallest vertex."""
    lengths = set()
    for length in range(3, D.n + 1):
        for seq in permutations(range(D.n), length):
            if seq[0] == min(seq) and all(D.has_arc(seq[i], seq[(i + 1) % length]) for i in range(length)):
                lengths.add(length)
                break
    return lengths


@pytest.mark.parametrize(
    "D",
    [regular_tournament(2), random_tournament(6, 1), random_tournament(7, 2), random_digraph(7, 12, 3), directed_cycle(6)],
)
def test_cycle_witnesses_agree_with_enumeration(D):
    expected = cycle_lengths_by_enumeration(D)
    assert set(cycle_witnesses(D)) == expected
    pancyclic, missing = is_pancyclic_exact(D)
    assert missing == [length for length in range(3, D.n + 1) if length not in expected]
    assert pancyclic == (not missing)


def test_cycle_witnesses_for_requested_lengths(k6):
    found = cycle_witnesses(k6, {2, 4})
    assert sorted(found) == [2, 4]
    assert all(len(c) == length and is_directed_cycle(k6, c) for length, c in found.items())
    assert cycle_witnesses(k6, set()) == {}


def test_cycle_witness_guard():
    with pytest.raises(ResourceGuardError):
        cycle_witnesses(Digraph(19))


def test_search_cycle_finds_requested_length():
    D = complete_digraph(8)
    outcome = search_cycle_of_length(D, 5, seed=4)
    assert outcome.cycle is not None and len(outcome.cycle) == 5
    assert is_directed_cycle(D, outcome.cycle)


def test_search_cycle_proves_absence(cycle5):
    outcome = search_cycle_of_length(cycle5, 4)
    assert outcome.cycle is None and outcome.exhausted


def test_search_cycle_out_of_range_lengths(cycle5):
    assert search_cycle_of_length(cycle5, 1).exhausted
    assert search_cycle_of_length(cycle5, 6).exhausted


def test_search_cycle_budget():
    outcome = search_cycle_of_length(complete_digraph(8), 8, budget=1)
    assert outcome.cycle is None and not outcome.exhausted


# --- Hypergraph oracles ---

def test_perfect_matching_of_complete_hypergraph():
    H = complete_hypergraph(6, 3)
    matching = find_perfect_matching_hypergraph_exact(H)
    assert matching is not None and validate_perfect_matching(H, matching)


def test_no_perfect_matching():
    assert find_perfect_matching_hypergraph_exact(complete_hypergraph(7, 3)) is None
    H = KUniformHypergraph(6, 3, frozenset({(0, 1, 2), (0, 3, 4), (0, 4, 5)}))
    assert find_perfect_matching_hypergraph_exact(H) is None


def test_matching_guard():
    with pytest.raises(ResourceGuardError):
        find_perfect_matching_hypergraph_exact(KUniformHypergraph(24, 3))


@pytest.mark.parametrize("n", [4, 6, 8])
def test_loose_cycle_of_complete_hypergraph(n):
    H = complete_hypergraph(n, 3)
    cycle = find_loose_hamilton_exact(H)
    assert cycle is not None and len(cycle) == n // 2
    assert validate_loose_hamilton_cycle(H, cycle)


def test_no_loose_cycle():
    assert find_loose_hamilton_exact(complete_hypergraph(5, 3)) is None
    assert find_loose_hamilton_exact(KUniformHypergraph(6, 3, frozenset({(0, 1, 2), (2, 3, 4)}))) is None


def test_loose_cycle_guard():
    with pytest.raises(ResourceGuardError):
        find_loose_hamilton_exact(KUniformHypergraph(18, 3))


def test_bipartite_hypergraph_edges_all_meet_the_small_part():
    H = complete_bipartite_hypergraph(3, 1)
    assert H.n == 7
    assert all(0 in edge for edge in H.edges)
    assert find_perfect_matching_hypergraph_exact(H) is None


# --- Bipartite matching ---

def test_deficient_matching_has_hall_violator(deficient_bipartite):
    result = bipartite_max_matching(deficient_bipartite)
    assert result.status == MatchStatus.DEFICIENT
    assert result.size == 2
    assert result.certificate == [0, 1] and result.certificate_side == "A"
    assert len(deficient_bipartite.neighborhood(result.certificate, "A")) < 2


def test_perfect_matching_of_complete_bipartite():
    G = BipartiteGraph((0, 1, 2), (0, 1, 2), frozenset((a, b) for a in range(3) for b in range(3)))
    result = bipartite_max_matching(G)
    assert result.status == MatchStatus.PERFECT and result.certificate is None
    assert sorted(a for a, _ in result.matching) == [0, 1, 2]
    assert sorted(b for _, b in result.matching) == [0, 1, 2]


def test_violator_on_the_larger_side():
    result = bipartite_max_matching(BipartiteGraph((0,), (0, 1), frozenset({(0, 0)})))
    assert result.certificate_side == "B" and result.certificate == [1]


def max_flow_matching_size(G):
    F = nx.DiGraph()
    for a in G.part_a:
        F.add_edge("s", ("a", a), capacity=1)
    for b in G.part_b:
        F.add_edge(("b", b), "t", capacity=1)
    for a, b in G.edges:
        F.add_edge(("a", a), ("b", b), capacity=1)
    return nx.maximum_flow_value(F, "s", "t")


def test_matching_size_equals_max_flow():
    rng = make_rng(2024)
    for _ in range(200):
        na, nb = (int(x) for x in rng.integers(1, 61, size=2))
        hits = rng.random((na, nb)) < 0.15 * rng.random()
        G = BipartiteGraph(
            tuple(range(na)),
            tuple(range(nb)),
            frozenset((a, b) for a in range(na) for b in range(nb) if hits[a, b]),
        )
        result = bipartite_max_matching(G)
        assert result.size == max_flow_matching_size(G)
        assert all(pair in G.edges for pair in result.matching)
        assert len({a for a, _ in result.matching}) == len({b for _, b in result.matching}) == result.size
        if result.status == MatchStatus.DEFICIENT:
            assert len(G.neighborhood(result.certificate, result.certificate_side)) < len(result.certificate)


# --- Disjoint paths ---

def _check_paths(D, s, t, paths):
    inner = [v for p in paths for v in p[1:-1]]
    assert len(inner) == len(set(inner))
    for p in paths:
        assert p[0] == s and p[-1] == t
        assert all(D.has_arc(u, v) for u, v in zip(p, p[1:]))


def test_disjoint_paths_in_complete_digraph():
    D = complete_digraph(5)
    family = vertex_disjoint_paths(D, 0, 1)
    assert family.count == 4 and not family.lower_bound
    _check_paths(D, 0, 1, family.paths)


@pytest.mark.parametrize("seed", range(8))
def test_path_count_matches_networkx(seed):
    D = random_digraph(8, 22, seed)
    G = nx.DiGraph()
    G.add_nodes_from(range(D.n))
    G.add_edges_from(D.arcs)
    for s in range(D.n):
        for t in range(D.n):
            if s == t or D.has_arc(s, t):
                continue
            expected = nx.algorithms.connectivity.local_node_connectivity(G, s, t)
            assert vertex_disjoint_path_count(D, s, t) == expected
            family = vertex_disjoint_paths(D, s, t)
            assert family.count == expected
            _check_paths(D, s, t, family.paths)
            separator = min_vertex_separator(D, s, t)
            assert len(separator) == expected
            H = G.copy()
            H.remove_nodes_from(separator)
            assert not nx.has_path(H, s, t)


def test_separator(cycle5, k6):
    assert min_vertex_separator(cycle5, 0, 2) == [1]
    assert min_vertex_separator(k6, 0, 1) is None


def test_length_bounded_paths(cycle5):
    assert vertex_disjoint_paths(cycle5, 0, 3, maxlen=2).count == 0
    family = vertex_disjoint_paths(cycle5, 0, 3, maxlen=3)
    assert family.paths == [[0, 1, 2, 3]] and family.lower_bound
    assert vertex_disjoint_path_count(complete_digraph(6), 0, 1, maxlen=2) == 5


def test_paths_need_distinct_ends(k6):
    with pytest.raises(ParameterError):
        vertex_disjoint_paths(k6, 2, 2)
    with pytest.raises(ParameterError):
        min_vertex_separator(k6, 2, 2)
