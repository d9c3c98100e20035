"""
Random perturbation models, each a deterministic function of (input, spec).

The add-m model samples m items uniformly from ALL possible edges and unites,
so the sample may overlap the input; ``new_only`` restricts the draw to absent
edges. Pairs are addressed by colex rank, arcs by (tail, head) rank and
hypergraph edges by combination rank; see ``src.perturbed.rng``.
"""

import logging
from enum import Enum
from math import comb
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.perturbed.errors import ParameterError
from src.perturbed.rng import (
    make_rng,
    rank_arc,
    rank_combination,
    rank_pair,
    sample_distinct,
    unrank_arc,
    unrank_combination,
    unrank_pair,
)
from src.perturbed.structures import Digraph, Graph, KUniformHypergraph, Tournament

logger = logging.getLogger(__name__)

Perturbable = Union[Graph, Digraph, KUniformHypergraph]


class PerturbMode(str, Enum):
    ADD_M = "add-m"
    ADD_P = "add-p"
    SYMMETRIC_DIFFERENCE = "symmetric-difference"
    RESAMPLE = "resample"
    TOURNAMENT_FLIP = "tournament-flip"


class PerturbSpec(BaseModel):
    """Mode, size (exactly one of m and p) and seed of a perturbation."""

    mode: PerturbMode
    m: Optional[int] = Field(None, ge=0)
    p: Optional[float] = Field(None, ge=0.0, le=1.0)
    seed: int = Field(0, ge=0, lt=2**64)
    new_only: bool = False

    @model_validator(mode="after")
    def _one_size(self):
        if (self.m is None) == (self.p is None):
            raise ValueError("exactly one of m and p must be set")
        if self.mode == PerturbMode.ADD_M and self.m is None:
            raise ValueError("mode add-m needs m")
        if self.mode == PerturbMode.ADD_P and self.p is None:
            raise ValueError("mode add-p needs p")
        if self.new_only and self.mode != PerturbMode.ADD_M:
            raise ValueError("new_only applies to add-m only")
        return self


# --- Universe of possible items for each structure ---

def _universe(X: Perturbable) -> Tuple[int, Callable[[int], tuple], Callable[[tuple], int]]:
    """Size of the item universe with its unrank and rank functions."""
    if isinstance(X, KUniformHypergraph):
        return comb(X.n, X.k), lambda r: unrank_combination(r, X.k), rank_combination
    if isinstance(X, Digraph):
        return X.n * (X.n - 1), lambda r: unrank_arc(r, X.n), lambda a: rank_arc(a[0], a[1], X.n)
    return comb(X.n, 2), unrank_pair, lambda e: rank_pair(*e)


def _items(X: Perturbable) -> frozenset:
    return X.edges if isinstance(X, (Graph, KUniformHypergraph)) else X.arcs


def _rebuild(X: Perturbable, items) -> Perturbable:
    items = frozenset(items)
    if isinstance(X, KUniformHypergraph):
        return KUniformHypergraph(X.n, X.k, items)
    if isinstance(X, Digraph):
        return Digraph(X.n, items)
    return Graph(X.n, items)


def _chosen_ranks(rng: np.random.Generator, N: int, spec: PerturbSpec) -> List[int]:
    """m uniform distinct ranks, or each rank independently with probability p."""
    if spec.m is not None:
        if spec.m > N:
            raise ParameterError(f"m={spec.m} exceeds the {N} possible items")
        return sample_distinct(rng, N, spec.m)
    return [int(r) for r in np.flatnonzero(rng.random(N) < spec.p)]


# --- Operations ---

def add_random_edges(X: Perturbable, spec: PerturbSpec) -> Perturbable:
    """X united with a uniform random structure of m items (or density p)."""
    if isinstance(X, Tournament):
        raise ParameterError("tournaments are perturbed with tournament_flip")
    if spec.mode not in (PerturbMode.ADD_M, PerturbMode.ADD_P):
        raise ParameterError(f"add_random_edges needs mode add-m or add-p, got {spec.mode.value}")
    N, unrank, rank = _universe(X)
    rng = make_rng(spec.seed)
    existing = _items(X)
    if spec.new_only:
        present = sorted(rank(item) for item in existing)
        absent = N - len(present)
        if spec.m > absent:
            raise ParameterError(f"m={spec.m} exceeds the {absent} absent items")
        # Map draws over the absent ranks back to ranks in the full universe.
        ranks = []
        for r in sample_distinct(rng, absent, spec.m):
            for p in present:
                if p <= r:
                    r += 1
                else:
                    break
            ranks.append(r)
    else:
        ranks = _chosen_ranks(rng, N, spec)
    sample = {unrank(r) for r in ranks}
    result = _rebuild(X, existing | sample)
    if len(_items(result)) < max(len(existing), len(sample)):
        raise ParameterError("union lost items")
    logger.debug(f"add: {len(sample)} sampled, {len(_items(result)) - len(existing)} new")
    return result


def random_digraph(n: int, m: int, seed: int) -> Digraph:
    """A draw of the uniform m-arc digraph on n vertices."""
    return add_random_edges(Digraph(n), PerturbSpec(mode=PerturbMode.ADD_M, m=m, seed=seed))


def random_hypergraph(n: int, k: int, m: int, seed: int) -> KUniformHypergraph:
    """A draw of the uniform m-edge k-uniform hypergraph on n vertices."""
    return add_random_edges(
        KUniformHypergraph(n, k), PerturbSpec(mode=PerturbMode.ADD_M, m=m, seed=seed)
    )


def symmetric_difference(X: Union[Graph, Digraph], spec: PerturbSpec) -> Union[Graph, Digraph]:
    """Toggle m uniform pairs (or each pair with probability p)."""
    if spec.mode != PerturbMode.SYMMETRIC_DIFFERENCE:
        raise ParameterError(f"symmetric_difference needs mode symmetric-difference, got {spec.mode.value}")
    if isinstance(X, (Tournament, KUniformHypergraph)):
        raise ParameterError(f"symmetric_difference does not apply to {type(X).__name__}")
    N, unrank, _ = _universe(X)
    toggled = {unrank(r) for r in _chosen_ranks(make_rng(spec.seed), N, spec)}
    return _rebuild(X, _items(X) ^ toggled)


def resample(X: Union[Graph, Digraph], spec: PerturbSpec) -> Union[Graph, Digraph]:
    """Designate m uniform pairs (or each with probability p) and redraw each with probability 1/2."""
    if spec.mode != PerturbMode.RESAMPLE:
        raise ParameterError(f"resample needs mode resample, got {spec.mode.value}")
    if isinstance(X, (Tournament, KUniformHypergraph)):
        raise ParameterError(f"resample does not apply to {type(X).__name__}")
    N, unrank, _ = _universe(X)
    rng = make_rng(spec.seed)
    ranks = _chosen_ranks(rng, N, spec)
    coins = rng.integers(0, 2, size=len(ranks))
    items = set(_items(X))
    for r, coin in zip(ranks, coins):
        item = unrank(r)
        if coin:
            items.add(item)
        else:
            items.discard(item)
    return _rebuild(X, items)


def tournament_flip(T: Tournament, spec: PerturbSpec) -> Tournament:
    """Re-orient m uniform pairs uniformly, or flip each pair with probability p."""
    if spec.mode != PerturbMode.TOURNAMENT_FLIP:
        raise ParameterError(f"tournament_flip needs mode tournament-flip, got {spec.mode.value}")
    if not isinstance(T, Tournament):
        raise ParameterError(f"tournament_flip needs a Tournament, got {type(T).__name__}")
    N = comb(T.n, 2)
    rng = make_rng(spec.seed)
    arcs = set(T.arcs)
    if spec.m is not None:
        ranks = _chosen_ranks(rng, N, spec)
        coins = rng.integers(0, 2, size=len(ranks))
        for r, coin in zip(ranks, coins):
            i, j = unrank_pair(r)
            arcs.discard((i, j))
            arcs.discard((j, i))
            arcs.add((i, j) if coin else (j, i))
    else:
        for r in _chosen_ranks(rng, N, spec):
            i, j = unrank_pair(r)
            if (i, j) in arcs:
                arcs.remove((i, j))
                arcs.add((j, i))
            else:
                arcs.remove((j, i))
                arcs.add((i, j))
    return Tournament(T.n, frozenset(arcs))


def flip_probability(n: int, m: int) -> float:
    """Flip probability p with 2p*C(n, 2) = m."""
    return min(1.0, m / (2 * comb(n, 2))) if n >= 2 else 0.0


def perturb(X, spec: PerturbSpec):
    """Apply ``spec`` to X with the operation its mode names."""
    if spec.mode in (PerturbMode.ADD_M, PerturbMode.ADD_P):
        return add_random_edges(X, spec)
    if spec.mode == PerturbMode.SYMMETRIC_DIFFERENCE:
        return symmetric_difference(X, spec)
    if spec.mode == PerturbMode.RESAMPLE:
        return resample(X, spec)
    return tournament_flip(X, spec)
