"""Shared fixtures; logs and results of the test run go to a throwaway data dir."""

import os
import tempfile

os.environ.setdefault("PHL_DATA_DIR", tempfile.mkdtemp(prefix="perturbed-tests-"))
os.environ.pop("PHL_SEED", None)

import json  # noqa: E402

import pytest  # noqa: E402

from src.perturbed.generators import (  # noqa: E402
    complete_digraph,
    complete_hypergraph,
    directed_cycle,
    regular_tournament,
    transitive_tournament,
)
from src.perturbed.structures import BipartiteGraph  # noqa: E402


@pytest.fixture
def k6():
    return complete_digraph(6)


@pytest.fixture
def cycle5():
    return directed_cycle(5)


@pytest.fixture
def regular5():
    return regular_tournament(2)


@pytest.fixture
def transitive5():
    return transitive_tournament(5)


@pytest.fixture
def complete_3graph_9():
    return complete_hypergraph(9, 3)


@pytest.fixture
def deficient_bipartite():
    """a0 and a1 both see only b0, so {a0, a1} violates Hall's condition."""
    return BipartiteGraph((0, 1, 2), (0, 1, 2), frozenset({(0, 0), (1, 0), (2, 1), (2, 2)}))


@pytest.fixture
def run_cli(capsys):
    """Run main() in-process; returns (exit code, parsed last JSON line or None, raw stdout)."""
    from main import main

    def run(*argv):
        code = main([str(a) for a in argv])
        out = capsys.readouterr().out
        lines = [line for line in out.splitlines() if line.strip()]
        payload = None
        if lines and lines[-1].startswith("{"):
            payload = json.loads(lines[-1])
        return code, payload, out

    return run
