"""
Edge-list text format.

    graph n | digraph n | tournament n | hypergraph n k | bipartite na nb
    [A a1 a2 ...]          (bipartite only)
    [B b1 b2 ...]          (bipartite only)
    u v                    one edge per line, sorted canonically

Arcs of digraphs and tournaments are ordered pairs. ``dumps(loads(text)) == text``
for any canonical text.
"""

import logging
from pathlib import Path
from typing import List, Union

from src.perturbed.errors import EmissionError, ParameterError, StructuralError
from src.perturbed.structures import (
    BipartiteGraph,
    Digraph,
    Graph,
    KUniformHypergraph,
    Tournament,
)

logger = logging.getLogger(__name__)

Structure = Union[Graph, Digraph, Tournament, KUniformHypergraph, BipartiteGraph]


def dumps(structure: Structure) -> str:
    lines: List[str] = []
    if isinstance(structure, Tournament):
        lines.append(f"tournament {structure.n}")
        body = sorted(structure.arcs)
    elif isinstance(structure, Digraph):
        lines.append(f"digraph {structure.n}")
        body = sorted(structure.arcs)
    elif isinstance(structure, Graph):
        lines.append(f"graph {structure.n}")
        body = sorted(structure.edges)
    elif isinstance(structure, KUniformHypergraph):
        lines.append(f"hypergraph {structure.n} {structure.k}")
        body = sorted(structure.edges)
    elif isinstance(structure, BipartiteGraph):
        lines.append(f"bipartite {len(structure.part_a)} {len(structure.part_b)}")
        lines.append(" ".join(["A", *map(str, structure.part_a)]))
        lines.append(" ".join(["B", *map(str, structure.part_b)]))
        body = sorted(structure.edges)
    else:
        raise StructuralError(f"cannot serialize {type(structure).__name__}")
    lines.extend(" ".join(map(str, edge)) for edge in body)
    return "\n".join(lines) + "\n"


def _ints(tokens: List[str], lineno: int) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise StructuralError(f"line {lineno}: expected integers, got {' '.join(tokens)!r}")


def loads(text: str) -> Structure:
    rows = [(i + 1, line.split()) for i, line in enumerate(text.splitlines())]
    rows = [(i, tokens) for i, tokens in rows if tokens and not tokens[0].startswith("#")]
    if not rows:
        raise StructuralError("empty structure file")
    _, header = rows[0]
    kind, params = header[0], _ints(header[1:], rows[0][0])
    body = rows[1:]

    if kind in ("graph", "digraph", "tournament"):
        if len(params) != 1:
            raise StructuralError(f"header '{kind}' takes exactly one parameter n")
        pairs = []
        for lineno, tokens in body:
            values = _ints(tokens, lineno)
            if len(values) != 2:
                raise StructuralError(f"line {lineno}: expected 2 vertices, got {len(values)}")
            pairs.append(tuple(values))
        cls = {"graph": Graph, "digraph": Digraph, "tournament": Tournament}[kind]
        return cls(params[0], frozenset(pairs))

    if kind == "hypergraph":
        if len(params) != 2:
            raise StructuralError("header 'hypergraph' takes parameters n k")
        n, k = params
        edges = []
        for lineno, tokens in body:
            values = _ints(tokens, lineno)
            if len(values) != k:
                raise StructuralError(f"line {lineno}: expected {k} vertices, got {len(values)}")
            edges.append(tuple(values))
        return KUniformHypergraph(n, k, frozenset(edges))

    if kind == "bipartite":
        if len(body) < 2 or body[0][1][0] != "A" or body[1][1][0] != "B":
            raise StructuralError("bipartite file needs 'A ...' and 'B ...' label lines")
        part_a = _ints(body[0][1][1:], body[0][0])
        part_b = _ints(body[1][1][1:], body[1][0])
        if params and params != [len(part_a), len(part_b)]:
            raise StructuralError(f"header sizes {params} disagree with label lines")
        edges = []
        for lineno, tokens in body[2:]:
            values = _ints(tokens, lineno)
            if len(values) != 2:
                raise StructuralError(f"line {lineno}: expected 2 labels, got {len(values)}")
            edges.append(tuple(values))
        return BipartiteGraph(tuple(part_a), tuple(part_b), frozenset(edges))

    raise StructuralError(f"unknown structure type {kind!r}")


def read_structure(path: Union[str, Path]) -> Structure:
    path = Path(path)
    logger.debug(f"Reading structure from {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParameterError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def write_structure(path: Union[str, Path], structure: Structure) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(structure), encoding="utf-8")
    except OSError as exc:
        raise EmissionError(path, exc) from exc
    logger.debug(f"Wrote {type(structure).__name__} to {path}")
