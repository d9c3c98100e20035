from collections import Counter
from math import comb, sqrt

import pytest
from hypothesis import given, settings as hyp_settings, strategies as st
from pydantic import ValidationError

from src.perturbed.errors import ParameterError
from src.perturbed.generators import complete_graph, empty_digraph, regular_tournament, transitive_tournament
from src.perturbed.perturb import (
    PerturbMode,
    PerturbSpec,
    add_random_edges,
    flip_probability,
    perturb,
    random_digraph,
    random_hypergraph,
    resample,
    symmetric_difference,
    tournament_flip,
)
from src.perturbed.structures import Digraph, Graph, KUniformHypergraph, Tournament


def spec(mode, **kwargs):
    return PerturbSpec(mode=mode, **kwargs)


def test_spec_needs_exactly_one_size():
    with pytest.raises(ValidationError):
        spec(PerturbMode.ADD_M, m=3, p=0.1)
    with pytest.raises(ValidationError):
        spec(PerturbMode.RESAMPLE)
    with pytest.raises(ValidationError):
        spec(PerturbMode.ADD_M, p=0.5)
    with pytest.raises(ValidationError):
        spec(PerturbMode.ADD_P, m=2)
    with pytest.raises(ValidationError):
        spec(PerturbMode.SYMMETRIC_DIFFERENCE, m=2, new_only=True)


def test_random_structures_have_exactly_m_items():
    assert random_digraph(10, 37, seed=1).num_arcs == 37
    assert random_hypergraph(8, 3, 20, seed=1).num_edges == 20
    assert random_digraph(10, 37, seed=1) == random_digraph(10, 37, seed=1)


def test_add_m_unites_with_the_base():
    base = Graph(8, frozenset({(0, 1), (2, 3)}))
    result = add_random_edges(base, spec(PerturbMode.ADD_M, m=10, seed=5))
    assert base.edges <= result.edges
    assert 10 <= result.num_edges <= 12


def test_add_m_new_only_adds_exactly_m_new_edges():
    base = Graph(8, frozenset({(0, 1), (2, 3), (4, 7)}))
    result = add_random_edges(base, spec(PerturbMode.ADD_M, m=20, seed=5, new_only=True))
    assert base.edges <= result.edges
    assert result.num_edges == 23
    full = add_random_edges(base, spec(PerturbMode.ADD_M, m=25, seed=1, new_only=True))
    assert full == complete_graph(8)
    with pytest.raises(ParameterError):
        add_random_edges(base, spec(PerturbMode.ADD_M, m=26, new_only=True))


def test_add_m_on_complete_structure_is_identity():
    assert add_random_edges(complete_graph(6), spec(PerturbMode.ADD_M, m=15)) == complete_graph(6)
    with pytest.raises(ParameterError):
        add_random_edges(complete_graph(6), spec(PerturbMode.ADD_M, m=16))


@pytest.mark.parametrize(
    "base, m",
    [(Graph(4), 2), (empty_digraph(4), 5), (KUniformHypergraph(5, 3), 3)],
)
def test_add_m_picks_every_item_with_frequency_m_over_n(base, m):
    runs = 3000
    seen = Counter()
    for seed in range(runs):
        result = add_random_edges(base, spec(PerturbMode.ADD_M, m=m, seed=seed))
        items = result.arcs if isinstance(result, Digraph) else result.edges
        seen.update(items)
    total = {Graph: comb(4, 2), Digraph: 12, KUniformHypergraph: comb(5, 3)}[type(base)]
    assert len(seen) == total
    p = m / total
    sigma = sqrt(runs * p * (1 - p))
    for count in seen.values():
        assert abs(count - runs * p) <= 4 * sigma


def test_add_p_extremes():
    assert add_random_edges(empty_digraph(5), spec(PerturbMode.ADD_P, p=0.0)).num_arcs == 0
    assert add_random_edges(empty_digraph(5), spec(PerturbMode.ADD_P, p=1.0)).num_arcs == 20
    H = add_random_edges(KUniformHypergraph(6, 3), spec(PerturbMode.ADD_P, p=1.0))
    assert H.num_edges == comb(6, 3)


def test_add_rejects_tournaments():
    with pytest.raises(ParameterError):
        add_random_edges(regular_tournament(2), spec(PerturbMode.ADD_M, m=1))


def test_symmetric_difference_toggles_exactly_m_pairs():
    base = Graph(9, frozenset({(0, 1), (1, 2), (5, 8)}))
    result = symmetric_difference(base, spec(PerturbMode.SYMMETRIC_DIFFERENCE, m=12, seed=3))
    assert len(base.edges ^ result.edges) == 12


@hyp_settings(max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=9),
    fraction=st.floats(min_value=0.0, max_value=1.0),
    seed=st.integers(min_value=0, max_value=2**63),
    directed=st.booleans(),
)
def test_symmetric_difference_is_an_involution(n, fraction, seed, directed):
    base = random_digraph(n, n, seed) if directed else Graph(n, frozenset({(0, 1)}))
    size = n * (n - 1) if directed else comb(n, 2)
    toggle = spec(PerturbMode.SYMMETRIC_DIFFERENCE, m=int(fraction * size), seed=seed)
    assert symmetric_difference(symmetric_difference(base, toggle), toggle) == base


def test_resample_only_touches_designated_pairs():
    base = complete_graph(10)
    result = resample(base, spec(PerturbMode.RESAMPLE, m=8, seed=2))
    assert len(base.edges ^ result.edges) <= 8
    assert result.edges <= base.edges


def test_resample_toggles_half_the_designated_pairs_on_average():
    base = random_digraph(10, 45, seed=0)
    m, runs = 8, 10_000
    toggles = sum(
        len(base.arcs ^ resample(base, spec(PerturbMode.RESAMPLE, m=m, seed=seed)).arcs)
        for seed in range(runs)
    )
    # each designated pair changes state with probability 1/2
    sigma = sqrt(runs * m * 0.25)
    assert abs(toggles - runs * m / 2) <= 3 * sigma


def test_resample_rejects_hypergraphs():
    with pytest.raises(ParameterError):
        resample(KUniformHypergraph(5, 3), spec(PerturbMode.RESAMPLE, m=1))


def test_tournament_flip_with_p():
    T = transitive_tournament(6)
    flipped = tournament_flip(T, spec(PerturbMode.TOURNAMENT_FLIP, p=1.0))
    assert flipped.arcs == frozenset((v, u) for u, v in T.arcs)
    assert tournament_flip(T, spec(PerturbMode.TOURNAMENT_FLIP, p=0.0)) == T


def test_tournament_flip_with_m_stays_a_tournament():
    T = transitive_tournament(12)
    result = tournament_flip(T, spec(PerturbMode.TOURNAMENT_FLIP, m=30, seed=8))
    assert isinstance(result, Tournament)
    assert len(T.arcs - result.arcs) <= 30
    with pytest.raises(ParameterError):
        tournament_flip(Digraph(3), spec(PerturbMode.TOURNAMENT_FLIP, m=1))


def test_flip_probability():
    assert flip_probability(10, 45) == pytest.approx(0.5)
    assert flip_probability(10, 1000) == 1.0
    assert flip_probability(1, 3) == 0.0


def test_flip_forms_agree_on_average():
    # m re-oriented pairs flip m/2 arcs on average, as does p = flip_probability(n, m)
    T = transitive_tournament(12)
    p = flip_probability(12, 30)
    by_m = [len(T.arcs - tournament_flip(T, spec(PerturbMode.TOURNAMENT_FLIP, m=30, seed=s)).arcs) for s in range(300)]
    by_p = [len(T.arcs - tournament_flip(T, spec(PerturbMode.TOURNAMENT_FLIP, p=p, seed=s)).arcs) for s in range(300)]
    assert sum(by_m) / 300 == pytest.approx(15, abs=1.0)
    assert sum(by_p) / 300 == pytest.approx(15, abs=1.0)


def test_dispatch_by_mode():
    base = empty_digraph(6)
    assert perturb(base, spec(PerturbMode.ADD_M, m=4, seed=1)) == add_random_edges(base, spec(PerturbMode.ADD_M, m=4, seed=1))
    with pytest.raises(ParameterError):
        perturb(base, spec(PerturbMode.TOURNAMENT_FLIP, m=1))
