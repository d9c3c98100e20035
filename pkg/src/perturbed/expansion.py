"""
Expansion-based Hamiltonicity and pancyclicity.

A digraph has expansion parameter k when every two disjoint vertex sets A, B
with |A| = |B| >= k are joined by an arc from A to B. With all in- and
out-degrees at least 4k this forces a Hamilton cycle, built here constructively:
take a non-extendable path, rewire it into a cycle on the same vertices, and
while the cycle is not spanning, leave it along an outgoing arc and re-extend.
With degrees at least 8k the same machinery yields cycles of every length.

Undirected graphs are handled as symmetric digraphs.
"""

import logging
from collections import defaultdict
from enum import Enum
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel

import settings
from src.perturbed.errors import (
    HypothesisViolation,
    PancyclicityFailure,
    ParameterError,
    ResourceGuardError,
    StructuralError,
)
from src.perturbed.rng import make_rng, sample_distinct
from src.perturbed.structures import (
    Digraph,
    Graph,
    bits_to_list,
    is_directed_cycle,
    min_in_degree,
    min_out_degree,
    validate_hamilton_cycle,
)

logger = logging.getLogger(__name__)


class ExpansionMode(str, Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


class ExpansionCertificate(BaseModel):
    """Outcome of an expansion check; a sampled pass is evidence, not proof."""

    n: int
    k: int
    mode: ExpansionMode
    violated: Optional[Tuple[List[int], List[int]]] = None
    samples_checked: int = 0

    @property
    def holds(self) -> bool:
        return self.violated is None

    @property
    def proven(self) -> bool:
        return self.holds and self.mode == ExpansionMode.EXACT


def _digraph(D: Union[Graph, Digraph]) -> Digraph:
    return D.to_digraph()


def _violation_for(D: Digraph, A: Sequence[int], k: int) -> Optional[List[int]]:
    """k vertices outside A receiving no arc from A, if any."""
    reach = 0
    for a in A:
        reach |= D.out_bits[a]
    for a in A:
        reach |= 1 << a
    free = bits_to_list(((1 << D.n) - 1) & ~reach)
    return free[:k] if len(free) >= k else None


def check_expansion(
    D: Union[Graph, Digraph],
    k: int,
    mode: ExpansionMode = ExpansionMode.EXACT,
    budget: int = settings.DEFAULT_SAMPLE_BUDGET,
    seed: int = 0,
) -> ExpansionCertificate:
    """Check the expansion condition with parameter k.

    Size-k pairs suffice: a violating pair of larger sets contains a violating
    pair of k-sets. Exact mode therefore visits every k-set A and asks whether
    k vertices outside A get no arc from A. Sampled mode does the same for
    ``budget`` uniform k-sets.
    """
    D = _digraph(D)
    mode = ExpansionMode(mode)
    n = D.n
    if not 1 <= k <= n // 2:
        raise ParameterError(f"k must lie in [1, {n // 2}], got {k}")
    if mode == ExpansionMode.EXACT:
        if n > settings.EXPANSION_EXACT_MAX_N:
            raise ResourceGuardError("check_expansion", settings.EXPANSION_EXACT_MAX_N, n)
        for A in combinations(range(n), k):
            B = _violation_for(D, A, k)
            if B is not None:
                return ExpansionCertificate(n=n, k=k, mode=mode, violated=(list(A), B))
        return ExpansionCertificate(n=n, k=k, mode=mode)

    rng = make_rng(seed)
    for i in range(budget):
        A = [int(v) for v in rng.permutation(n)[:k]]
        B = _violation_for(D, A, k)
        if B is not None:
            return ExpansionCertificate(
                n=n, k=k, mode=mode, violated=(sorted(A), B), samples_checked=i + 1
            )
    logger.debug(f"Sampled expansion check passed {budget} samples (n={n}, k={k})")
    return ExpansionCertificate(n=n, k=k, mode=mode, samples_checked=budget)


def strong_connectivity_spot_check(D: Union[Graph, Digraph], samples: int = 200, seed: int = 0) -> bool:
    """Whether sampled ordered pairs are all joined by paths of length at most 3."""
    D = _digraph(D)
    n = D.n
    if n < 2:
        return True
    rng = make_rng(seed)
    for _ in range(samples):
        v, w = (int(x) for x in rng.permutation(n)[:2])
        frontier = reach = D.out_bits[v]
        for _ in range(2):
            step = 0
            for x in bits_to_list(frontier):
                step |= D.out_bits[x]
            frontier = step & ~reach
            reach |= step
        if not reach >> w & 1:
            return False
    return True


class ExpansionSolver:
    """Constructive Hamilton cycles and pancyclicity under the expansion condition."""

    def __init__(self, D: Union[Graph, Digraph], k: int, seed: int = 0):
        if k < 1:
            raise ParameterError(f"k must be positive, got {k}")
        self.D = _digraph(D)
        self.k = k
        self.seed = seed
        self.rng = make_rng(seed)
        self.stats = defaultdict(int)

    # --- Paths ---

    def _pick(self, options: List[int], free: int) -> int:
        """Fewest onward options first, ties broken at random."""
        if len(options) == 1:
            return options[0]
        ties = self.rng.random(len(options))
        return min(zip(((self.D.out_bits[v] & free).bit_count() for v in options), ties, options))[2]

    def extend_path(self, path: List[int]) -> List[int]:
        """Grow ``path`` at both ends until neither end can be extended."""
        D = self.D
        path = list(path)
        on_path = 0
        for v in path:
            on_path |= 1 << v
        full = (1 << D.n) - 1
        forward: List[int] = []
        backward: List[int] = []
        end, start = path[-1], path[0]
        while True:
            grown = False
            options = bits_to_list(D.out_bits[end] & ~on_path)
            if options:
                end = self._pick(options, full & ~on_path)
                forward.append(end)
                on_path |= 1 << end
                grown = True
            options = bits_to_list(D.in_bits[start] & ~on_path)
            if options:
                start = options[int(self.rng.integers(0, len(options)))]
                backward.append(start)
                on_path |= 1 << start
                grown = True
            if not grown:
                break
        result = backward[::-1] + path + forward
        self.stats["extensions"] += len(forward) + len(backward)
        self._assert_non_extendable(result)
        return result

    def maximal_path(self) -> List[int]:
        if self.D.n < 1:
            raise ParameterError("the digraph has no vertices")
        start = int(self.rng.integers(0, self.D.n))
        return self.extend_path([start])

    def _assert_non_extendable(self, path: Sequence[int]) -> None:
        on_path = 0
        for v in path:
            on_path |= 1 << v
        if self.D.out_bits[path[-1]] & ~on_path or self.D.in_bits[path[0]] & ~on_path:
            raise StructuralError(f"path {list(path)} can still be extended")

    # --- Closing a path into a cycle on its vertex set ---

    def close_path_to_cycle(self, path: Sequence[int]) -> List[int]:
        D, k = self.D, self.k
        P = list(path)
        L = len(P)
        self._assert_non_extendable(P)
        if L < 2:
            raise HypothesisViolation("min-degree", "a single vertex cannot be closed into a cycle")
        u, w = P[0], P[-1]
        if D.has_arc(w, u):
            self.stats["direct"] += 1
            return P

        pos = {v: i for i, v in enumerate(P)}
        into_u = sorted(D.in_neighbors(u), key=pos.__getitem__)
        out_of_w = sorted(D.out_neighbors(w), key=pos.__getitem__)
        if len(into_u) < 4 * k:
            raise HypothesisViolation("min-degree", f"U1/U2: first vertex has {len(into_u)} in-neighbours < {4 * k}")
        if len(out_of_w) < 4 * k:
            raise HypothesisViolation("min-degree", f"W1/W2: last vertex has {len(out_of_w)} out-neighbours < {4 * k}")
        U1, U2 = into_u[: 3 * k], into_u[-k:]
        W1, W2 = out_of_w[:k], out_of_w[-3 * k:]

        if max(pos[x] for x in W1) < min(pos[x] for x in U2):
            cycle = self._close_case_one(P, pos, W1, U2)
            self.stats["case1"] += 1
        else:
            if not max(pos[x] for x in U1) < min(pos[x] for x in W2):
                raise HypothesisViolation("expansion", "U1 does not precede W2")
            cycle = self._close_case_two(P, pos, U1, W2)
            self.stats["case2"] += 1

        if len(cycle) != L or set(cycle) != set(P) or not is_directed_cycle(D, cycle):
            raise StructuralError(f"closing step produced an invalid cycle {cycle}")
        return cycle

    def _close_case_one(self, P, pos, W1, U2) -> List[int]:
        """Arc from W1- to U2+: u2 .. w, w1+ .. u2-, u .. w1."""
        tails = [P[pos[x] - 1] for x in W1]
        heads = [P[pos[x] + 1] for x in U2]
        for x in tails:
            for y in heads:
                if self.D.has_arc(x, y):
                    i1, i2 = pos[x], pos[y]
                    return P[i2:] + P[i1 + 1:i2] + P[: i1 + 1]
        raise HypothesisViolation("expansion", "no arc from W1- to U2+")

    def _close_case_two(self, P, pos, U1, W2) -> List[int]:
        """Arc from W22- to U11+ spliced with the shortcuts into U12+ and out of W21-."""
        D, k, L = self.D, self.k, len(P)
        U12 = sorted(U1, key=pos.__getitem__)[-k:]
        W21 = sorted(W2, key=pos.__getitem__)[:k]
        U12_plus = [P[pos[x] + 1] for x in U12]
        W21_minus = [P[pos[x] - 1] for x in W21]

        U11 = [x for x in P[: 2 * k] if any(D.has_arc(x, y) for y in U12_plus)]
        if len(U11) < k:
            raise HypothesisViolation("expansion", f"U11 has {len(U11)} < {k} vertices")
        W22 = [x for x in P[-2 * k:] if any(D.has_arc(z, x) for z in W21_minus)]
        if len(W22) < k:
            raise HypothesisViolation("expansion", f"W22 has {len(W22)} < {k} vertices")

        heads = [P[pos[x] + 1] for x in U11 if pos[x] + 1 < L]
        tails = [P[pos[x] - 1] for x in W22 if pos[x] > 0]
        for x in tails:
            for y in heads:
                if not D.has_arc(x, y):
                    continue
                iy, ix = pos[y], pos[x]
                for u12 in U12_plus:
                    iu12 = pos[u12]
                    if not (iy < iu12 and D.has_arc(P[iy - 1], u12)):
                        continue
                    for w21 in W21_minus:
                        iw21 = pos[w21]
                        if iu12 <= iw21 < ix and D.has_arc(w21, P[ix + 1]):
                            return (
                                P[iy:iu12]
                                + P[:iy]
                                + P[iu12:iw21 + 1]
                                + P[ix + 1:]
                                + P[iw21 + 1:ix + 1]
                            )
        raise HypothesisViolation("expansion", "no arc from W22- to U11+ completing the splice")

    # --- Hamilton cycle ---

    def hamilton(self, check_degrees: bool = True) -> List[int]:
        D, k, n = self.D, self.k, self.D.n
        if n < 2:
            raise HypothesisViolation("min-degree", f"no Hamilton cycle on {n} vertices")
        if check_degrees:
            low = min(min_in_degree(D), min_out_degree(D))
            if low < 4 * k:
                raise HypothesisViolation("min-degree", f"minimum degree {low} < 4k = {4 * k}")
        path = self.maximal_path()
        for _ in range(n + 1):
            self.stats["iterations"] += 1
            cycle = self.close_path_to_cycle(path)
            if len(cycle) == n:
                if not validate_hamilton_cycle(D, cycle):
                    raise StructuralError(f"constructed cycle {cycle} is not Hamiltonian")
                return cycle
            exit_arc = self._exit_arc(cycle)
            if exit_arc is None:
                raise HypothesisViolation(
                    "strong-connectivity", f"no arc leaves a cycle on {len(cycle)} of {n} vertices"
                )
            i, x = exit_arc
            longer = self.extend_path(cycle[i + 1:] + cycle[: i + 1] + [x])
            if len(longer) <= len(path):
                raise StructuralError("path length did not increase")
            path = longer
        raise StructuralError(f"no Hamilton cycle after {n + 1} iterations")

    def _exit_arc(self, cycle: List[int]) -> Optional[Tuple[int, int]]:
        inside = 0
        for v in cycle:
            inside |= 1 << v
        for i, c in enumerate(cycle):
            outside = self.D.out_bits[c] & ~inside
            if outside:
                return i, bits_to_list(outside)[0]
        return None

    # --- Cycles of every length ---

    def pancyclic(self) -> Dict[int, List[int]]:
        D, k, n = self.D, self.k, self.D.n
        low = min(min_in_degree(D), min_out_degree(D)) if n else 0
        if low < 8 * k:
            raise HypothesisViolation("min-degree", f"minimum degree {low} < 8k = {8 * k}")
        cycles: Dict[int, List[int]] = {}
        failures: Dict[int, HypothesisViolation] = {}
        middle = range(4, n - 4 * k + 1)

        v = int(self.rng.integers(0, n))
        out_v, in_v = D.out_neighbors(v), D.in_neighbors(v)
        U_plus = out_v[:k]
        U_minus = [x for x in in_v if x not in U_plus][:k]
        try:
            if len(U_minus) < k:
                raise HypothesisViolation("min-degree", "U-: too few in-neighbours outside U+")
            cycles[3] = self._triangle(v, U_plus, U_minus)
        except HypothesisViolation as exc:
            failures[3] = exc

        if len(middle) and 3 not in failures:
            try:
                for length, cycle in self._middle_cycles(v, U_plus, U_minus, middle).items():
                    cycles[length] = cycle
            except HypothesisViolation as exc:
                for length in middle:
                    failures[length] = exc
        elif len(middle):
            for length in middle:
                failures[length] = failures[3]

        for length in range(max(4, n - 4 * k + 1), n + 1):
            try:
                cycles[length] = self._cycle_by_deletion(length)
            except HypothesisViolation as exc:
                failures[length] = exc

        for length, cycle in cycles.items():
            if len(cycle) != length or not is_directed_cycle(D, cycle):
                raise StructuralError(f"invalid {length}-cycle {cycle}")
        if failures:
            logger.debug(f"Pancyclic construction failed for lengths {sorted(failures)}")
            raise PancyclicityFailure(failures, cycles)
        return dict(sorted(cycles.items()))

    def _triangle(self, v: int, U_plus: List[int], U_minus: List[int]) -> List[int]:
        for a in U_plus:
            for b in U_minus:
                if self.D.has_arc(a, b):
                    return [v, a, b]
        raise HypothesisViolation("expansion", "no arc from U+ to U-")

    def _middle_cycles(self, v, U_plus, U_minus, lengths) -> Dict[int, List[int]]:
        """Cycles v, a, (segment of a Hamilton cycle of the rest), b."""
        D, k = self.D, self.k
        core = {v, *U_plus, *U_minus}
        W_plus = [x for x in range(D.n) if x not in core and not any(D.has_arc(a, x) for a in U_plus)]
        W_minus = [x for x in range(D.n) if x not in core and not any(D.has_arc(x, b) for b in U_minus)]
        if len(W_plus) >= k:
            raise HypothesisViolation("expansion", f"W+ has {len(W_plus)} >= {k} vertices")
        if len(W_minus) >= k:
            raise HypothesisViolation("expansion", f"W- has {len(W_minus)} >= {k} vertices")
        removed = core | set(W_plus) | set(W_minus)
        rest, labels = D.induced(x for x in range(D.n) if x not in removed)
        inner = ExpansionSolver(rest, k, seed=int(self.rng.integers(0, 2**63)))
        ham = [labels[x] for x in inner.hamilton(check_degrees=False)]
        self._merge_stats(inner)
        out = {}
        for length in lengths:
            segment = ham[: length - 3]
            a = next((x for x in U_plus if D.has_arc(x, segment[0])), None)
            b = next((x for x in U_minus if D.has_arc(segment[-1], x)), None)
            if a is None or b is None:
                raise HypothesisViolation("expansion", f"segment for length {length} cannot be attached")
            out[length] = [v, a] + segment + [b]
        return out

    def _cycle_by_deletion(self, length: int, attempts: int = 3) -> List[int]:
        """Hamilton cycle of a random induced sub-digraph on ``length`` vertices."""
        D = self.D
        last: Optional[HypothesisViolation] = None
        for _ in range(attempts):
            dropped = set(sample_distinct(self.rng, D.n, D.n - length))
            sub, labels = D.induced(x for x in range(D.n) if x not in dropped)
            inner = ExpansionSolver(sub, self.k, seed=int(self.rng.integers(0, 2**63)))
            try:
                cycle = [labels[x] for x in inner.hamilton(check_degrees=False)]
            except HypothesisViolation as exc:
                last = exc
                continue
            finally:
                self._merge_stats(inner)
            return cycle
        raise last

    def _merge_stats(self, other: "ExpansionSolver") -> None:
        for key, value in other.stats.items():
            self.stats[key] += value


def maximal_path(D: Union[Graph, Digraph], seed: int = 0) -> List[int]:
    """A directed path that cannot be extended at either end."""
    return ExpansionSolver(D, 1, seed).maximal_path()


def close_path_to_cycle(D: Union[Graph, Digraph], path: Sequence[int], k: int) -> List[int]:
    """A cycle on exactly the vertices of the non-extendable ``path``."""
    return ExpansionSolver(D, k).close_path_to_cycle(path)


def hamilton_via_expansion(D: Union[Graph, Digraph], k: int, seed: int = 0) -> List[int]:
    """Constructive Hamilton cycle; needs degrees >= 4k and expansion parameter k."""
    solver = ExpansionSolver(D, k, seed)
    cycle = solver.hamilton()
    logger.debug(f"Hamilton cycle via expansion: {dict(solver.stats)}")
    return cycle


def pancyclic_via_expansion(D: Union[Graph, Digraph], k: int, seed: int = 0) -> Dict[int, List[int]]:
    """Cycles of every length 3..n; needs degrees >= 8k and expansion parameter k."""
    solver = ExpansionSolver(D, k, seed)
    cycles = solver.pancyclic()
    logger.debug(f"Pancyclic construction: {dict(solver.stats)}")
    return cycles
