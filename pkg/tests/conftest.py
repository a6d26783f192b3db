import numpy as np
import pytest

from powergraph.core import (
    Configuration,
    DirectedGraph,
    add_module,
    flat_configuration,
)
from powergraph.datahandler import format_edge_list


def random_digraph(n: int, p: float, seed: int) -> DirectedGraph:
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    return DirectedGraph(n, frozenset(zip(*np.nonzero(mask), strict=True)))


def random_configuration(
    g: DirectedGraph, seed: int, steps: int = 4
) -> Configuration:
    """Configuration built from random groupings of top-level modules."""
    rng = np.random.default_rng(seed)
    c = flat_configuration(g)
    for _ in range(steps):
        top = sorted(c.top_level)
        if len(top) < 2:
            break
        size = int(rng.integers(2, min(len(top), 4) + 1))
        members = rng.choice(top, size=size, replace=False)
        c = add_module(c, [int(i) for i in members])
    return c


@pytest.fixture
def biclique() -> DirectedGraph:
    """Complete bipartite digraph {0, 1} -> {2, 3}."""
    return DirectedGraph(4, frozenset({(0, 2), (0, 3), (1, 2), (1, 3)}))


@pytest.fixture
def triangle() -> DirectedGraph:
    """Complete digraph on three vertices."""
    edges = {(u, v) for u in range(3) for v in range(3) if u != v}
    return DirectedGraph(3, frozenset(edges))


@pytest.fixture
def make_graph():
    return random_digraph


@pytest.fixture
def make_configuration():
    return random_configuration


@pytest.fixture
def small_graphs() -> list[DirectedGraph]:
    """Random digraphs with five to seven vertices of varying density."""
    return [
        random_digraph(n, p, seed)
        for seed, (n, p) in enumerate(
            [(5, 0.3), (5, 0.5), (6, 0.3), (6, 0.5), (6, 0.7), (7, 0.35)]
        )
    ]


@pytest.fixture
def biclique_file(tmp_path, biclique):
    path = tmp_path / "four.edges"
    path.write_text(format_edge_list(biclique))
    return path
