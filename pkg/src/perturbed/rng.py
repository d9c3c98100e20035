"""
Seeded randomness for reproducible experiments.

Every random draw in the package goes through a numpy ``Generator`` backed by the
counter-based Philox bit generator, so a 64-bit seed fixes an experiment exactly.
Sampling of m distinct items uses Floyd's algorithm, whose output depends only on
the sequence of drawn integers and never on set iteration order.
"""

from math import comb, isqrt
from typing import List, Tuple

import numpy as np

from src.perturbed.errors import ParameterError

SEED_BOUND = 2**64


def make_rng(seed: int) -> np.random.Generator:
    """Return a Philox-backed generator for a 64-bit seed."""
    if not 0 <= int(seed) < SEED_BOUND:
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.Philox(int(seed)))


def derive_seed(master: int, *keys: int) -> int:
    """Deterministic child seed of ``master`` for the key path ``keys``."""
    if any(key < 0 for key in keys):
        raise ParameterError(f"seed keys must be non-negative, got {keys}")
    sequence = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(int(key) for key in keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def sample_distinct(rng: np.random.Generator, population: int, m: int) -> List[int]:
    """Floyd's algorithm: m distinct integers from [0, population), sorted."""
    if m < 0 or m > population:
        raise ParameterError(f"cannot draw {m} distinct items from {population}")
    chosen = set()
    for j in range(population - m, population):
        t = int(rng.integers(0, j + 1))
        chosen.add(j if t in chosen else t)
    return sorted(chosen)


def unrank_pair(rank: int) -> Tuple[int, int]:
    """Pair (i, j), i < j, of the given colex rank: rank = C(j, 2) + i."""
    j = (1 + isqrt(1 + 8 * rank)) // 2
    while comb(j, 2) > rank:
        j -= 1
    while comb(j + 1, 2) <= rank:
        j += 1
    return rank - comb(j, 2), j


def rank_pair(i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return comb(j, 2) + i


def unrank_arc(rank: int, n: int) -> Tuple[int, int]:
    """Ordered pair (u, v), u != v, of rank u*(n-1) + (position of v among the others)."""
    u, w = divmod(rank, n - 1)
    return u, (w if w < u else w + 1)


def rank_arc(u: int, v: int, n: int) -> int:
    return u * (n - 1) + (v if v < u else v - 1)


def unrank_combination(rank: int, k: int) -> Tuple[int, ...]:
    """k-subset of the given colex rank, as a sorted tuple."""
    out = []
    for size in range(k, 0, -1):
        c = size - 1
        while comb(c + 1, size) <= rank:
            c += 1
        rank -= comb(c, size)
        out.append(c)
    return tuple(reversed(out))


def rank_combination(subset) -> int:
    return sum(comb(c, i + 1) for i, c in enumerate(sorted(subset)))
