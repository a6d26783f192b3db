import time

import numpy as np
import pytest

from powergraph.beam import (
    Beam,
    beam_search,
    improving_merges,
    merge_pairs,
    run_beam,
)
from powergraph.core import (
    DirectedGraph,
    check_solution,
    representative_edges,
    signature,
)
from powergraph.errors import PreconditionError
from powergraph.generator import generate
from powergraph.jaccard import jaccard_decompose
from powergraph.optimal import optimal_search
from powergraph.state import SearchState


def edge_count(c):
    return len(representative_edges(c))


@pytest.mark.parametrize("k", [1, 2, 5])
def test_biclique_is_solved(biclique, k):
    c = beam_search(biclique, k)
    assert edge_count(c) == 1
    assert c.module_count == 2


def test_edgeless_graph_stays_flat():
    c = beam_search(DirectedGraph(5), 3)
    assert c.module_count == 0
    assert edge_count(c) == 0


def test_invalid_beam_size(biclique):
    with pytest.raises(PreconditionError):
        beam_search(biclique, 0)


def test_improving_merges_are_sorted(biclique):
    state = SearchState.flat(biclique)
    assert improving_merges(state) == [(2, 0, 1), (2, 2, 3)]
    assert (0, 1) in merge_pairs(state)


def test_improving_merges_cover_every_improving_pair(small_graphs):
    for g in small_graphs:
        state = SearchState.flat(g).merge(0, 1)
        found = {(m, n) for _, m, n in improving_merges(state)}
        top = state.top_order()
        for i, m in enumerate(top):
            for n in top[i + 1 :]:
                improving = state.nedges(m, n) < state.edge_count
                assert ((m, n) in found) == improving


def test_beam_keeps_worst_state_first(biclique):
    beam = Beam(2)
    flat = SearchState.flat(biclique)
    half = flat.merge(0, 1)
    beam.push(half)
    beam.push(flat)
    assert beam.worst() is flat
    assert beam.best() is half
    assert beam.pop() is flat
    assert flat.signature in beam.seen
    assert len(beam) == 1


def test_results_are_valid_and_never_beat_optimum(small_graphs):
    for g in small_graphs:
        best = edge_count(optimal_search(g))
        for k in (1, 3, 10):
            c = beam_search(g, k)
            r = representative_edges(c)
            assert check_solution(c, r) == []
            assert best <= len(r) <= g.m


def test_greedy_is_deterministic(make_graph):
    g = make_graph(12, 0.3, 5)
    assert signature(beam_search(g, 1)) == signature(beam_search(g, 1))
    assert signature(beam_search(g, 4)) == signature(beam_search(g, 4))


def test_run_beam_from_intermediate_state(biclique):
    start = SearchState.flat(biclique).merge(0, 1)
    assert run_beam(start, 2).edge_count == 1


@pytest.fixture(scope="module")
def hundred_vertex_runs():
    """Seconds and edge counts of beam_1 and jaccard on 20 graphs."""
    warm_up = generate(20, seed=0)
    jaccard_decompose(warm_up)
    beam_search(warm_up, 1)
    runs = []
    for seed in range(20):
        g = generate(100, seed)
        row = {}
        for name, solver in (
            ("beam", lambda g: beam_search(g, 1)),
            ("jaccard", jaccard_decompose),
        ):
            start = time.perf_counter()
            c = solver(g)
            row[name] = (time.perf_counter() - start, edge_count(c))
        runs.append(row)
    return runs


@pytest.mark.slow
def test_width_one_is_fast_at_hundred_vertices(hundred_vertex_runs):
    faster = 0
    for row in hundred_vertex_runs:
        beam_seconds, _ = row["beam"]
        jaccard_seconds, _ = row["jaccard"]
        assert beam_seconds < 5.0
        faster += beam_seconds < jaccard_seconds
    assert faster >= 16


@pytest.mark.slow
def test_width_one_beats_jaccard_at_hundred_vertices(hundred_vertex_runs):
    beam = [row["beam"][1] for row in hundred_vertex_runs]
    jaccard = [row["jaccard"][1] for row in hundred_vertex_runs]
    assert np.median(beam) <= 0.75 * np.median(jaccard)


@pytest.mark.slow
def test_width_ten_mostly_finds_the_optimum():
    matches = total = 0
    for n in range(5, 9):
        for seed in range(13):
            g = generate(n, seed)
            total += 1
            found = edge_count(beam_search(g, 10))
            matches += found == edge_count(optimal_search(g))
    assert matches >= 0.6 * total
