"""
Exhaustive tightness checks for the extremal constructions.

Confirms by exact search that the unbalanced complete bipartite graph and the
two-cluster tournament have no Hamilton cycle, and that the complete bipartite
hypergraph with a one-vertex part has no two disjoint edges and no loose path
with more than two edges. Writes a JSON report under the results directory.
"""
import json
import logging
import sys
from datetime import datetime
from itertools import combinations, product
from pathlib import Path
from typing import Any, Dict

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import settings  # noqa: E402
from src.perturbed.exact import find_hamilton_cycle_exact  # noqa: E402
from src.perturbed.generators import (  # noqa: E402
    complete_bipartite_graph,
    complete_bipartite_hypergraph,
    transitive_cluster_tournament,
)
from src.perturbed.structures import validate_loose_path  # noqa: E402

logging.basicConfig(
    level=logging.INFO,
    format='[%(asctime)s] %(levelname)s: %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)
logger = logging.getLogger(__name__)


def longest_loose_path(H, cap: int = 3) -> int:
    """Most edges in a loose path of H, searched up to ``cap`` edges."""
    edges = sorted(H.edges)
    best = 0
    for length in range(1, cap + 1):
        if any(validate_loose_path(H, list(chain)) for chain in product(edges, repeat=length)):
            best = length
        else:
            break
    return best


def collect_certificates() -> Dict[str, Any]:
    report: Dict[str, Any] = {}

    G = complete_bipartite_graph(3, 6)
    report["complete_bipartite_graph_3_6"] = {"hamiltonian": find_hamilton_cycle_exact(G) is not None}

    T = transitive_cluster_tournament(2, 1)
    report["cluster_tournament_2_1"] = {"hamiltonian": find_hamilton_cycle_exact(T) is not None}

    H = complete_bipartite_hypergraph(3, 1)
    max_matching = 1 if H.edges else 0
    if any(set(e).isdisjoint(f) for e, f in combinations(sorted(H.edges), 2)):
        max_matching = 2
    report["complete_bipartite_hypergraph_3_1"] = {
        "n": H.n,
        "edges": H.num_edges,
        "max_matching_at_least": max_matching,
        "longest_loose_path": longest_loose_path(H),
    }
    return report


def main():
    logger.info("=" * 60)
    logger.info("Tightness certificates")
    logger.info("=" * 60)

    report = collect_certificates()
    for name, facts in report.items():
        logger.info(f"{name}: {facts}")

    settings.RESULTS_DIR.mkdir(parents=True, exist_ok=True)
    out = settings.RESULTS_DIR / f"tightness_{datetime.now().strftime('%Y%m%d_%H%M%S')}.json"
    with open(out, 'w', encoding='utf-8') as f:
        json.dump(report, f, indent=2, sort_keys=True)
    logger.info(f"Report saved to: {out}")

    hamiltonian = [name for name, facts in report.items() if facts.get("hamiltonian")]
    if hamiltonian:
        logger.error(f"Expected non-Hamiltonian but found a cycle: {hamiltonian}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
