import pytest

from src.perturbed.errors import EmissionError, ParameterError, StructuralError
from src.perturbed.generators import complete_bipartite_graph, complete_hypergraph, regular_tournament
from src.perturbed.structures import BipartiteGraph, Digraph, Graph
from src.perturbed.textio import dumps, loads, read_structure, write_structure


def test_dumps_is_canonical():
    G = Graph(4, frozenset({(3, 2), (1, 0), (0, 2)}))
    assert dumps(G) == "graph 4\n0 1\n0 2\n2 3\n"
    D = Digraph(3, frozenset({(2, 0), (0, 1)}))
    assert dumps(D) == "digraph 3\n0 1\n2 0\n"


def test_bipartite_format_carries_label_lines():
    G = BipartiteGraph((0, 1), (5, 6), frozenset({(1, 5), (0, 6)}))
    text = dumps(G)
    assert text == "bipartite 2 2\nA 0 1\nB 5 6\n0 6\n1 5\n"
    assert loads(text) == G


@pytest.mark.parametrize(
    "structure",
    [
        complete_bipartite_graph(2, 3),
        regular_tournament(3),
        complete_hypergraph(6, 4),
        Digraph(5, frozenset()),
    ],
)
def test_text_is_bit_exact(structure):
    text = dumps(structure)
    parsed = loads(text)
    assert parsed == structure
    assert type(parsed) is type(structure)
    assert dumps(parsed) == text


def test_loads_skips_comments_and_blank_lines():
    text = "# a triangle\n\ngraph 3\n0 1\n# middle\n1 2\n0 2\n"
    assert loads(text) == Graph(3, frozenset({(0, 1), (1, 2), (0, 2)}))


@pytest.mark.parametrize(
    "text",
    [
        "",
        "graph\n",
        "graph 3\n0 1 2\n",
        "graph 3\n0 x\n",
        "hypergraph 5 3\n0 1\n",
        "hypergraph 5\n",
        "bipartite 2 2\n0 1\n",
        "tournament 3\n0 1\n",
        "multigraph 3\n",
    ],
)
def test_loads_rejects_malformed_text(text):
    with pytest.raises(StructuralError):
        loads(text)


def test_file_helpers(tmp_path):
    T = regular_tournament(2)
    path = tmp_path / "nested" / "t.txt"
    write_structure(path, T)
    assert read_structure(path) == T


def test_missing_file_is_a_parameter_error(tmp_path):
    with pytest.raises(ParameterError):
        read_structure(tmp_path / "absent.txt")


def test_unwritable_path_is_an_emission_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(EmissionError):
        write_structure(blocker / "out.txt", Graph(1))
