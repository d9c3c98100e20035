import json

import pytest

from src.perturbed.generators import complete_digraph
from src.perturbed.harness import load_result
from src.perturbed.textio import loads, read_structure, write_structure


@pytest.fixture
def generated(tmp_path, run_cli):
    """Generate a family into tmp_path and return the file path."""

    def make(kind, name, *params):
        path = tmp_path / name
        code, payload, _ = run_cli("generate", kind, "--params", *params, "--out", path)
        assert code == 0 and payload["out"] == str(path)
        return path

    return make


# --- generate / perturb ---

def test_generate_to_file(generated):
    path = generated("complete-digraph", "k4.txt", "n=4")
    assert read_structure(path) == complete_digraph(4)


def test_generate_to_stdout(run_cli):
    code, payload, out = run_cli("generate", "complete-digraph", "--params", "n=3")
    assert code == 0 and payload is None
    assert loads(out) == complete_digraph(3)


@pytest.mark.parametrize("params", [["n"], [], ["size=4"]])
def test_generate_parameter_errors(run_cli, params):
    code, payload, _ = run_cli("generate", "complete-digraph", "--params", *params)
    assert code == 2 and payload["error"] == "ParameterError"


def test_perturb(generated, run_cli, tmp_path):
    base = generated("empty-digraph", "empty.txt", "n=5")
    out = tmp_path / "perturbed.txt"
    code, payload, _ = run_cli("perturb", "--in", base, "--m", 4, "--seed", 3, "--out", out)
    assert code == 0 and payload["arcs"] == 4
    assert read_structure(out).num_arcs == 4


def test_perturb_rejects_inconsistent_spec(generated, run_cli):
    base = generated("empty-digraph", "empty.txt", "n=5")
    code, payload, _ = run_cli("perturb", "--in", base, "--mode", "add-p", "--m", 3)
    assert code == 2 and payload["error"] == "ParameterError"


def test_missing_input_file(run_cli, tmp_path):
    code, payload, _ = run_cli("solve", "hamilton", "--in", tmp_path / "nope.txt")
    assert code == 2 and payload["error"] == "ParameterError"


# --- solve ---

def test_solve_hamilton(generated, run_cli):
    path = generated("directed-cycle", "c5.txt", "n=5")
    code, payload, _ = run_cli("solve", "hamilton", "--in", path)
    assert code == 0 and payload["hamiltonian"] and payload["cycle"] == [0, 1, 2, 3, 4]


def test_solve_pancyclic(generated, run_cli):
    code, payload, _ = run_cli("solve", "pancyclic", "--in", generated("complete-digraph", "k6.txt", "n=6"))
    assert code == 0 and payload["pancyclic"] and sorted(payload["cycles"]) == ["3", "4", "5", "6"]
    code, payload, _ = run_cli("solve", "pancyclic", "--in", generated("directed-cycle", "c5.txt", "n=5"))
    assert code == 0 and payload["missing"] == [3, 4]


def test_solve_matching_reports_hall_violator(run_cli, tmp_path, deficient_bipartite):
    path = tmp_path / "bip.txt"
    write_structure(path, deficient_bipartite)
    code, payload, _ = run_cli("solve", "matching", "--in", path)
    assert code == 0
    assert payload["status"] == "deficient" and payload["size"] == 2
    assert payload["certificate"] == [0, 1] and payload["certificate_side"] == "A"


def test_solve_paths(generated, run_cli):
    path = generated("complete-digraph", "k5.txt", "n=5")
    code, payload, _ = run_cli("solve", "paths", "--in", path, "--s", 0, "--t", 1)
    assert code == 0 and payload["count"] == 4 and not payload["lower_bound"]
    code, payload, _ = run_cli("solve", "paths", "--in", path, "--s", 0)
    assert code == 2


def test_solve_hamilton_expansion(generated, run_cli):
    code, payload, _ = run_cli("solve", "hamilton-expansion", "--in", generated("complete-digraph", "k10.txt", "n=10"))
    assert code == 0 and payload["reason"] == "ok" and len(payload["cycle"]) == 10
    assert payload["certificate_mode"] == "exact"
    code, payload, _ = run_cli("solve", "hamilton-expansion", "--in", generated("directed-cycle", "c6.txt", "n=6"))
    assert code == 0 and payload["reason"] == "expansion-violated" and payload["cycle"] is None


@pytest.mark.parametrize("extra", [[], ["--exact"]])
def test_solve_hyper(generated, run_cli, extra):
    dense = generated("complete-hypergraph", "h.txt", "n=9", "k=3")
    random_part = generated("empty-hypergraph", "r.txt", "n=9", "k=3")
    code, payload, _ = run_cli("solve", "hyper", "--dense", dense, "--random", random_part, *extra)
    assert code == 0 and payload["success"] and len(payload["edges"]) == 3


def test_solve_rejects_wrong_structure(generated, run_cli):
    path = generated("complete-hypergraph", "h.txt", "n=6", "k=3")
    code, payload, _ = run_cli("solve", "hamilton", "--in", path)
    assert code == 2 and payload["error"] == "ParameterError"


# --- check ---

def test_check_tournament(generated, run_cli):
    path = generated("regular-tournament", "t5.txt", "d=2")
    code, payload, _ = run_cli("check", "tournament", "--in", path, "--t", 2, "--q", 2)
    assert code == 0 and payload["connected"] and payload["arc_disjoint"]
    assert len(payload["cycles"]) == 2


def test_check_expansion(generated, run_cli):
    path = generated("complete-digraph", "k6.txt", "n=6")
    code, payload, _ = run_cli("check", "expansion", "--in", path, "--k", 1)
    assert code == 0 and payload["holds"] and payload["proven"]
    code, payload, _ = run_cli("check", "expansion", "--in", path, "--k", 4)
    assert code == 2 and payload["error"] == "ParameterError"


# --- sweep ---

@pytest.fixture
def sweep_config(tmp_path):
    path = tmp_path / "sweep.json"
    path.write_text(
        json.dumps(
            {
                "scenario": "bipartite-matching",
                "base": {"kind": "dense-bipartite", "params": {"n": 8, "alpha": 0.25}},
                "m_values": [0, 8],
                "trials": 2,
                "seed": 12,
            }
        ),
        encoding="utf-8",
    )
    return path


def test_sweep_to_csv(run_cli, sweep_config, tmp_path):
    out = tmp_path / "results" / "sweep.csv"
    code, payload, _ = run_cli("sweep", "--config", sweep_config, "--out", out)
    assert code == 0 and payload["format"] == "csv" and payload["master_seed"] == 12
    assert payload["points"][-1] == [8, 2, 2]
    assert out.read_text(encoding="utf-8").startswith("m,trials,successes,frequency,ci_low,ci_high,mean_ms\n")


def test_sweep_to_json(run_cli, sweep_config, tmp_path):
    out = tmp_path / "sweep.json.out"
    code, payload, _ = run_cli("sweep", "--config", sweep_config, "--out", out, "--format", "json")
    assert code == 0 and payload["format"] == "json"
    assert [list(c) for c in load_result(out).counts()] == payload["points"]


def test_sweep_missing_config(run_cli, tmp_path):
    code, payload, _ = run_cli("sweep", "--config", tmp_path / "none.json", "--out", tmp_path / "x.csv")
    assert code == 2 and payload["error"] == "ParameterError"
