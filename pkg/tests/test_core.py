import itertools

import numpy as np
import pytest

from powergraph.core import (
    DirectedGraph,
    RepresentativeEdgeSet,
    add_module,
    boundary_crossings,
    check_solution,
    dissolve_module,
    expand,
    expand_edge,
    flat_configuration,
    is_dominated,
    iter_bits,
    representative_edges,
    signature,
    validate_configuration,
)
from powergraph.errors import DegenerateModuleError, GraphError, HierarchyError


def possible_edges(c):
    """Every module pair whose complete edge set lies inside the graph."""
    edges = c.graph.edges
    found = set()
    for a, b in itertools.product(c.modules, repeat=2):
        ma, mb = c.mask(a), c.mask(b)
        if a == b:
            if c.modules[a].is_trivial:
                continue
            pairs = [
                (u, v)
                for u in iter_bits(ma)
                for v in iter_bits(ma)
                if u != v
            ]
        elif ma & mb:
            continue
        else:
            pairs = [(u, v) for u in iter_bits(ma) for v in iter_bits(mb)]
        if all(p in edges for p in pairs):
            found.add((a, b))
    return found


def brute_force_edges(c):
    possible = possible_edges(c)
    return {
        e
        for e in possible
        if not any(is_dominated(c, e, other) for other in possible)
    }


def test_graph_rejects_self_loops_and_bad_ids():
    with pytest.raises(GraphError):
        DirectedGraph(3, frozenset({(1, 1)}))
    with pytest.raises(GraphError):
        DirectedGraph(3, frozenset({(0, 3)}))
    with pytest.raises(GraphError):
        DirectedGraph(-1)


def test_from_edges_sizes_graph():
    g = DirectedGraph.from_edges([(0, 4), (2, 1)])
    assert g.n == 5
    assert g.m == 2
    assert DirectedGraph.from_edges([]).n == 0


def test_flat_configuration(make_graph):
    empty = flat_configuration(DirectedGraph(0))
    assert len(empty.modules) == 0
    assert empty.top_level == frozenset()

    four = flat_configuration(DirectedGraph(4))
    assert len(four.modules) == 4
    assert four.top_level == {0, 1, 2, 3}
    assert four.module_count == 0

    g = make_graph(10, 0.3, 1)
    assert len(representative_edges(flat_configuration(g))) == g.m


def test_add_module_groups_members():
    c = add_module(flat_configuration(DirectedGraph(4)), [2, 3])
    assert c.nontrivial() == [4]
    assert c.modules[4].leaves == {2, 3}
    assert c.top_level == {0, 1, 4}
    assert c.parent[2] == 4


def test_add_module_order_independent():
    flat = flat_configuration(DirectedGraph(4))
    first = add_module(add_module(flat, [0, 1]), [2, 3])
    second = add_module(add_module(flat, [2, 3]), [0, 1])
    assert signature(first) == signature(second)
    assert signature(first) == "((0)(1))((2)(3))"


def test_add_module_errors():
    c = add_module(flat_configuration(DirectedGraph(4)), [0, 1])
    with pytest.raises(HierarchyError):
        add_module(c, [0, 2])
    with pytest.raises(DegenerateModuleError):
        add_module(c, [2])
    with pytest.raises(HierarchyError):
        add_module(c, [2, 9])


def test_full_vertex_module_is_allowed():
    c = add_module(flat_configuration(DirectedGraph(3)), [0, 1, 2])
    assert c.top_level == {3}
    assert validate_configuration(c) == []


def test_laminarity_after_random_additions(make_graph, make_configuration):
    for seed in range(30):
        g = make_graph(8, 0.4, seed)
        c = make_configuration(g, seed, steps=5)
        assert validate_configuration(c) == []
        masks = [m.mask for m in c.modules.values()]
        for a, b in itertools.combinations(masks, 2):
            assert a & b in (0, a, b)


def test_dissolve_module_promotes_children():
    flat = flat_configuration(DirectedGraph(4))
    c = add_module(add_module(flat, [0, 1]), [4, 2])
    reduced = dissolve_module(c, 4)
    assert reduced.modules[5].children == (0, 1, 2)
    assert validate_configuration(reduced) == []
    with pytest.raises(HierarchyError):
        dissolve_module(c, 0)


def test_biclique_collapses_to_one_edge(biclique):
    c = add_module(add_module(flat_configuration(biclique), [0, 1]), [2, 3])
    r = representative_edges(c)
    assert set(r) == {(4, 5)}
    assert expand(c, r) == biclique.edges


def test_expand_edge_to_module():
    g = DirectedGraph(6, frozenset({(5, 0), (5, 2), (5, 4)}))
    c = add_module(add_module(flat_configuration(g), [0, 2]), [6, 4])
    assert c.modules[7].leaves == {0, 2, 4}
    assert expand_edge(c, (5, 7)) == {(5, 0), (5, 2), (5, 4)}
    assert set(representative_edges(c)) == {(5, 7)}
    assert expand(c, RepresentativeEdgeSet()) == set()


def test_clique_module_carries_self_edge(triangle):
    c = add_module(flat_configuration(triangle), [0, 1])
    r = representative_edges(c)
    assert (3, 3) in r
    assert set(r) == {(3, 3), (3, 2), (2, 3)}
    assert expand(c, r) == triangle.edges


def test_representative_edges_match_brute_force(
    make_graph, make_configuration
):
    for seed in range(60):
        g = make_graph(6, [0.3, 0.5, 0.8][seed % 3], seed)
        c = make_configuration(g, seed + 100, steps=3)
        r = representative_edges(c)
        assert set(r) == brute_force_edges(c)
        assert expand(c, r) == g.edges
        assert check_solution(c, r) == []


def test_additions_never_add_edges(make_graph, make_configuration):
    rng = np.random.default_rng(7)
    for seed in range(80):
        g = make_graph(int(rng.integers(3, 9)), 0.5, seed)
        c = make_configuration(g, seed, steps=int(rng.integers(0, 3)))
        top = sorted(c.top_level)
        if len(top) < 2:
            continue
        size = int(rng.integers(2, len(top) + 1))
        members = [int(i) for i in rng.choice(top, size=size, replace=False)]
        extended = add_module(c, members)
        assert len(representative_edges(extended)) <= len(
            representative_edges(c)
        )


def test_signature_of_flat_configuration():
    assert signature(flat_configuration(DirectedGraph(3))) == "(0)(1)(2)"


def test_signature_is_construction_order_invariant():
    flat = flat_configuration(DirectedGraph(3))
    left = add_module(add_module(flat, [0, 1]), [3, 2])
    right = add_module(add_module(flat, [1, 0]), [2, 3])
    assert signature(left) == signature(right) == "(((0)(1))(2))"


def test_signature_equality_is_structural_equality(make_configuration):
    g = DirectedGraph(4)
    configurations = [
        make_configuration(g, seed, steps=2) for seed in range(60)
    ]
    for a, b in itertools.combinations(configurations, 2):
        same = {m.mask for m in a.modules.values()} == {
            m.mask for m in b.modules.values()
        }
        assert (signature(a) == signature(b)) == same


def test_boundary_crossings():
    g = DirectedGraph(6, frozenset({(5, 0), (5, 2), (5, 4)}))
    c = add_module(add_module(flat_configuration(g), [0, 2]), [6, 4])
    assert boundary_crossings(c, representative_edges(c)) == 0
    single = RepresentativeEdgeSet(frozenset({(5, 6)}))
    assert boundary_crossings(c, single) == 1
    flat = flat_configuration(g)
    assert boundary_crossings(flat, representative_edges(flat)) == 0


def test_boundary_crossings_match_direct_count(
    make_graph, make_configuration
):
    for seed in range(30):
        g = make_graph(7, 0.5, seed)
        c = make_configuration(g, seed, steps=4)
        r = representative_edges(c)
        expected = 0
        for a, b in r:
            if a == b:
                continue
            for p in c.nontrivial():
                inside_a = c.mask(a) & ~c.mask(p) == 0 and a != p
                inside_b = c.mask(b) & ~c.mask(p) == 0 and b != p
                expected += inside_a != inside_b
        assert boundary_crossings(c, r) == expected


def test_check_solution_reports_problems(biclique):
    c = add_module(add_module(flat_configuration(biclique), [0, 1]), [2, 3])
    assert check_solution(c, representative_edges(c)) == []
    partial = RepresentativeEdgeSet(frozenset({(4, 2)}))
    assert check_solution(c, partial)
    redundant = RepresentativeEdgeSet(frozenset({(4, 5), (0, 5)}))
    problems = check_solution(c, redundant)
    assert any("dominated" in p for p in problems)
