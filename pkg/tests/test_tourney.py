import math
from itertools import combinations

import pytest

from src.perturbed.errors import ParameterError, ResourceGuardError
from src.perturbed.generators import (
    complete_digraph,
    random_tournament,
    regular_tournament,
    transitive_cluster_tournament,
    transitive_tournament,
)
from src.perturbed.structures import Digraph, Tournament, validate_hamilton_cycle
from src.perturbed.tourney import (
    arc_disjoint_hamilton_cycles,
    degree_retention,
    diameter,
    extreme_degree_census,
    is_strongly_connected,
    is_t_strongly_connected,
    safe_vertices,
    select_core_set,
    short_disjoint_paths,
    strongly_connected_components,
)


# --- Degrees ---

@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_fewer_than_k_low_degree_vertices(n):
    for mask in range(1 << math.comb(n, 2)):
        T = Tournament.from_bits(n, mask)
        for k in range(1, n + 1):
            assert len(extreme_degree_census(T, k, "in")) < k
            assert len(extreme_degree_census(T, k, "out")) < k


@pytest.mark.slow
def test_fewer_than_k_low_degree_vertices_on_six():
    for mask in range(1 << 15):
        T = Tournament.from_bits(6, mask)
        for k in range(1, 7):
            assert len(extreme_degree_census(T, k, "in")) < k
            assert len(extreme_degree_census(T, k, "out")) < k


def check_2k_th_smallest_degrees(n):
    for mask in range(1 << math.comb(n, 2)):
        T = Tournament.from_bits(n, mask)
        ins, outs = sorted(T.in_degrees()), sorted(T.out_degrees())
        for k in range(1, n // 2 + 1):
            assert ins[2 * k - 1] >= k - 1
            assert outs[2 * k - 1] >= k - 1


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_2k_th_smallest_indegree_is_at_least_k_minus_one(n):
    check_2k_th_smallest_degrees(n)


@pytest.mark.slow
def test_2k_th_smallest_indegree_on_six():
    check_2k_th_smallest_degrees(6)


def test_census_of_transitive_tournament(transitive5):
    assert extreme_degree_census(transitive5, 5, "in") == [0, 1]
    assert extreme_degree_census(transitive5, 5, "out") == [3, 4]
    with pytest.raises(ParameterError):
        extreme_degree_census(transitive5, 6)


def test_core_set_of_transitive_tournament():
    assert select_core_set(transitive_tournament(12), 4) == [4, 5, 6, 7]
    with pytest.raises(ParameterError):
        select_core_set(transitive_tournament(12), 5)


def test_degree_retention(regular5, transitive5):
    assert degree_retention(regular5, regular5) == 1.0
    # reversing every arc of the transitive tournament swaps in- and out-degrees
    flipped = Tournament(5, frozenset((v, u) for u, v in transitive5.arcs))
    assert degree_retention(transitive5, flipped) == pytest.approx(0.6)
    with pytest.raises(ParameterError):
        degree_retention(regular5, transitive_tournament(4))


# --- Strong connectivity ---

def test_components_in_topological_order():
    T = transitive_cluster_tournament(3, 1)
    assert strongly_connected_components(T) == [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
    assert not is_strongly_connected(T)
    assert is_strongly_connected(regular_tournament(3))


def test_diameter(regular5, transitive5, cycle5):
    assert diameter(regular5) == 2
    assert diameter(cycle5) == 4
    assert diameter(transitive5) == math.inf


def _brute_force_t_strong(D, t):
    for removed in combinations(range(D.n), t - 1):
        rest, _ = D.induced(x for x in range(D.n) if x not in removed)
        if not is_strongly_connected(rest):
            return False
    return True


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("t", [1, 2, 3])
def test_t_strong_connectivity_matches_brute_force(seed, t):
    T = random_tournament(7, seed)
    report = is_t_strongly_connected(T, t)
    assert report.connected == _brute_force_t_strong(T, t)
    if not report.connected:
        assert len(report.witness) == t - 1


def test_t_strong_connectivity_reports(transitive5):
    report = is_t_strongly_connected(regular_tournament(3), 3)
    assert report.connected and report.witness is None and report.diameter is not None
    broken = is_t_strongly_connected(transitive5, 2)
    assert not broken.connected and broken.diameter is None
    assert broken.witness == [1]
    with pytest.raises(ParameterError):
        is_t_strongly_connected(transitive5, 5)
    with pytest.raises(ParameterError):
        is_t_strongly_connected(transitive5, 0)


# --- Short disjoint paths ---

def test_short_paths_in_complete_digraph():
    paths = short_disjoint_paths(complete_digraph(6), 0, 1, target=10)
    assert len(paths) == 5
    assert paths[0] == [0, 1]


@pytest.mark.parametrize("seed", range(5))
def test_short_paths_are_disjoint_and_short(seed):
    T = random_tournament(15, seed)
    for maxlen in (3, 4):
        paths = short_disjoint_paths(T, 0, 1, target=15, maxlen=maxlen, safe=[2, 3])
        inner = [v for p in paths for v in p[1:-1]]
        assert len(inner) == len(set(inner))
        for p in paths:
            assert p[0] == 0 and p[-1] == 1 and len(p) - 1 <= maxlen
            assert all(T.has_arc(u, v) for u, v in zip(p, p[1:]))


def test_short_paths_parameter_checks(k6):
    with pytest.raises(ParameterError):
        short_disjoint_paths(k6, 1, 1, target=2)
    with pytest.raises(ParameterError):
        short_disjoint_paths(k6, 0, 1, target=2, maxlen=5)


def test_safe_vertices():
    assert safe_vertices(complete_digraph(7), 0, 1) == [1, 2, 3, 4, 5, 6]
    assert safe_vertices(Digraph(4), 0, 1) == []


# --- Arc-disjoint Hamilton cycles ---

def test_regular_tournament_splits_into_two_cycles(regular5):
    cycles = arc_disjoint_hamilton_cycles(regular5, 2)
    assert len(cycles) == 2
    assert all(validate_hamilton_cycle(regular5, c) for c in cycles)
    arcs = [{(c[i], c[(i + 1) % 5]) for i in range(5)} for c in cycles]
    assert not arcs[0] & arcs[1]
    assert arc_disjoint_hamilton_cycles(regular5, 3) is None


def test_transitive_tournament_has_no_cycles(transitive5):
    assert arc_disjoint_hamilton_cycles(transitive5, 1) is None


def test_arc_disjoint_parameter_checks(regular5, k6):
    with pytest.raises(ParameterError):
        arc_disjoint_hamilton_cycles(k6, 1)
    with pytest.raises(ParameterError):
        arc_disjoint_hamilton_cycles(regular5, 0)
    with pytest.raises(ResourceGuardError):
        arc_disjoint_hamilton_cycles(regular_tournament(7), 1)
