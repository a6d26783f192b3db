import time

import numpy as np
import pytest

from powergraph.beam import greedy, improving_merges
from powergraph.core import check_solution, representative_edges
from powergraph.descent import Descent
from powergraph.errors import DegenerateModuleError, HierarchyError
from powergraph.generator import generate
from powergraph.state import SearchState


def merge_until_stuck(state):
    while merges := improving_merges(state):
        _, m, n = merges[0]
        state = state.merge(m, n)
    return state


def assert_same_state(descent, state):
    result = descent.to_state()
    assert result.edges == state.edges
    assert result.signature == state.signature
    assert result.configuration.next_id == state.configuration.next_id
    assert (
        check_solution(result.configuration, result.representative_edges())
        == []
    )


def test_biclique_descent(biclique):
    descent = Descent(SearchState.flat(biclique))
    assert descent.best_merge() == (0, 1)
    assert descent.nedges(0, 1) == 2
    descent.run()
    assert descent.edge_count == 1
    assert descent.best_merge() is None


def test_triangle_collapses_to_self_edge(triangle):
    descent = Descent(SearchState.flat(triangle)).run()
    state = descent.to_state()
    assert state.edge_count == 1
    (edge,) = state.edges
    assert edge[0] == edge[1]


def test_nedges_agrees_with_state(make_graph, make_configuration):
    checked = 0
    for seed in range(30):
        g = make_graph(7, [0.3, 0.5, 0.8][seed % 3], seed)
        c = make_configuration(g, seed, steps=seed % 4)
        state = SearchState.from_configuration(c)
        descent = Descent(state)
        top = state.top_order()
        for i, m in enumerate(top):
            for n in top[i + 1 :]:
                assert descent.nedges(m, n) == state.nedges(m, n)
                checked += 1
    assert checked > 100


def test_merge_sequence_tracks_state(make_graph):
    for seed in range(20):
        rng = np.random.default_rng(seed)
        g = make_graph(8, [0.25, 0.5, 0.9][seed % 3], seed)
        state = SearchState.flat(g)
        descent = Descent(state)
        for _ in range(12):
            top = state.top_order()
            if len(top) < 2:
                break
            m, n = (int(i) for i in rng.choice(top, size=2, replace=False))
            state = state.merge(m, n)
            descent.merge(m, n)
            assert descent.edge_count == state.edge_count
            assert_same_state(descent, state)


def test_greedy_matches_first_improving_merge(make_graph):
    for seed in range(15):
        g = make_graph(9, [0.2, 0.45, 0.7][seed % 3], seed)
        expected = merge_until_stuck(SearchState.flat(g))
        found = greedy(SearchState.flat(g))
        assert found.edges == expected.edges
        assert found.signature == expected.signature


def test_greedy_from_intermediate_state(make_graph, make_configuration):
    g = make_graph(10, 0.4, 3)
    start = SearchState.from_configuration(make_configuration(g, 3))
    expected = merge_until_stuck(start)
    assert greedy(start).signature == expected.signature


def test_generated_graph_is_lossless():
    g = generate(40, seed=1)
    state = greedy(SearchState.flat(g))
    r = representative_edges(state.configuration)
    assert set(r) == set(state.edges)
    assert check_solution(state.configuration, r) == []
    assert state.edge_count < g.m


def test_past_deadline_leaves_state_flat(biclique):
    state = greedy(SearchState.flat(biclique), time.monotonic() - 1.0)
    assert state.edge_count == biclique.m
    assert state.module_count == 0


def test_start_state_is_untouched(biclique):
    start = SearchState.flat(biclique)
    Descent(start).run()
    assert start.edge_count == 4
    assert start.module_count == 0


def test_invalid_merges(biclique):
    descent = Descent(SearchState.flat(biclique))
    with pytest.raises(DegenerateModuleError):
        descent.merge(0, 0)
    descent.merge(0, 1)
    with pytest.raises(HierarchyError):
        descent.merge(0, 2)
    with pytest.raises(HierarchyError):
        descent.nedges(4, 9)
