import itertools

import pytest

from powergraph.core import (
    DirectedGraph,
    add_module,
    boundary_crossings,
    check_solution,
    dissolve_module,
    flat_configuration,
    representative_edges,
)
from powergraph.errors import PreconditionError
from powergraph.generator import generate
from powergraph.optimal import (
    BranchAndBound,
    Objective,
    candidate_binary_merges,
    default_module_limit,
    lower_bound,
    optimal_search,
    strip_redundant_modules,
)
from powergraph.oracle import best_single_module, exhaustive_search
from powergraph.state import SearchState


def edge_count(c):
    return len(representative_edges(c))


def test_biclique_optimum(biclique):
    c = optimal_search(biclique)
    assert edge_count(c) == 1
    assert c.module_count == 2


def test_candidates_on_biclique(biclique):
    state = SearchState.flat(biclique)
    assert candidate_binary_merges(state) == [(2, 0, 1), (2, 2, 3)]
    assert candidate_binary_merges(SearchState.flat(DirectedGraph(3))) == []


def test_candidates_are_exactly_the_improving_pairs(small_graphs):
    for g in small_graphs:
        state = SearchState.flat(g)
        listed = {(m, n): r for r, m, n in candidate_binary_merges(state)}
        for m in range(g.n):
            for n in range(m + 1, g.n):
                merged = state.add((m, n))
                reduction = state.edge_count - merged.edge_count
                if reduction > 0:
                    assert listed[m, n] == reduction
                else:
                    assert (m, n) not in listed


def test_lower_bound(biclique):
    state = SearchState.flat(biclique)
    assert lower_bound(state, 2) == 0
    assert lower_bound(state, 1) == 2
    edgeless = SearchState.flat(DirectedGraph(4))
    assert lower_bound(edgeless, 2) == 0
    sparse = SearchState.flat(DirectedGraph(3, frozenset({(0, 1)})))
    assert lower_bound(sparse, 1) == 1


def test_default_module_limit(biclique, triangle):
    assert default_module_limit(biclique) == 2
    assert default_module_limit(triangle) == 2
    assert default_module_limit(DirectedGraph(1)) == 0


def test_complete_graph_uses_self_edge(triangle):
    c = optimal_search(triangle)
    assert edge_count(c) == 1
    assert c.module_count == 1


def test_agrees_with_exhaustive_search(small_graphs):
    for g in small_graphs:
        assert edge_count(optimal_search(g)) == edge_count(
            exhaustive_search(g)
        )


def test_sibling_forbidding_keeps_optimum(small_graphs):
    for g in small_graphs[:4]:
        with_forbidding = BranchAndBound(g).solve()
        without = BranchAndBound(g, forbid_siblings=False).solve()
        assert with_forbidding.objective == without.objective


def test_returned_modules_are_not_redundant(small_graphs):
    for g in small_graphs:
        result = BranchAndBound(g).solve()
        c = result.configuration
        assert result.proven
        assert check_solution(c, result.edges) == []
        assert c.module_count <= default_module_limit(g)
        for module_id in c.nontrivial():
            reduced = dissolve_module(c, module_id)
            assert edge_count(reduced) > len(result.edges)


def test_tie_break_keeps_edge_optimum(small_graphs):
    for g in small_graphs[:4]:
        plain = BranchAndBound(g).solve()
        tied = BranchAndBound(g, tie_break=True).solve()
        assert tied.objective.edges == plain.objective.edges
        c = tied.configuration
        r = representative_edges(c)
        assert tied.objective == Objective(
            len(r), boundary_crossings(c, r), c.module_count
        )


def test_pruned_subtrees_hold_nothing_better(small_graphs):
    for g in small_graphs[:3]:
        pruned = []
        search = BranchAndBound(
            g,
            on_prune=lambda state, forbidden, bound: pruned.append(
                (state, forbidden, bound)
            ),
        )
        result = search.solve()
        unpruned = BranchAndBound(
            g, prune=False, module_limit=search.module_limit
        )
        for state, forbidden, bound in pruned:
            assert bound >= result.objective.edges
            best = unpruned.search_from(state, forbidden)
            assert best.edge_count >= result.objective.edges


def test_progress_callback(biclique):
    calls = []
    BranchAndBound(
        biclique, progress=lambda *args: calls.append(args), report_every=1
    ).solve()
    assert calls
    nodes, objective, depth = calls[0]
    assert nodes == 1
    assert objective.edges >= 1
    assert depth == 0


def test_time_limit_returns_incumbent():
    g = generate(14, seed=2)
    result = BranchAndBound(g, time_limit=1e-6).solve()
    assert not result.proven
    assert check_solution(result.configuration, result.edges) == []
    assert len(result.edges) <= g.m


def test_zero_budget_keeps_flat_incumbent():
    g = generate(30, seed=1)
    result = BranchAndBound(g, time_limit=0).solve()
    assert not result.proven
    assert len(result.edges) == g.m
    assert result.configuration.module_count == 0


def test_invalid_arguments(biclique):
    with pytest.raises(PreconditionError):
        BranchAndBound(biclique, module_limit=-1)
    with pytest.raises(PreconditionError):
        BranchAndBound(biclique, report_every=0)


def test_strip_redundant_modules(biclique):
    state = SearchState.flat(biclique).add((0, 1)).add((4, 2))
    stripped = strip_redundant_modules(state.configuration)
    assert edge_count(stripped) == edge_count(state.configuration)
    assert stripped.module_count < state.module_count


@pytest.mark.slow
def test_agrees_with_exhaustive_on_generated_corpus():
    for n in range(5, 9):
        for seed in range(13):
            g = generate(n, seed)
            assert edge_count(optimal_search(g)) == edge_count(
                exhaustive_search(g)
            )


@pytest.mark.slow
def test_ten_vertex_graphs_are_proven():
    for seed in range(5):
        result = BranchAndBound(generate(10, seed), time_limit=300).solve()
        assert result.proven


def two_module_configurations(g):
    """Flat configuration plus every laminar choice of one or two modules."""
    flat = flat_configuration(g)
    groups = [
        group
        for size in range(2, g.n + 1)
        for group in itertools.combinations(range(g.n), size)
    ]
    yield flat
    for a in groups:
        first = add_module(flat, a)
        yield first
        outer = first.next_id - 1
        for b in groups:
            if set(a).isdisjoint(b) and a < b:
                yield add_module(first, b)
            elif set(a) < set(b):
                yield add_module(first, [outer, *sorted(set(b) - set(a))])


def two_module_optima(g):
    """Module leaf sets of every optimal configuration with at most two
    modules."""
    best, winners = g.m + 1, []
    for c in two_module_configurations(g):
        edges = edge_count(c)
        if edges > best:
            continue
        if edges < best:
            best, winners = edges, []
        winners.append({c.modules[i].leaves for i in c.nontrivial()})
    return winners


def single_module_left_out(g):
    single = best_single_module(g)
    if single.savings == 0:
        return False
    return all(single.module not in found for found in two_module_optima(g))


@pytest.mark.slow
def test_best_single_module_outside_two_module_optimum(make_graph):
    instance = None
    for seed in range(400):
        g = make_graph(5 + seed % 2, [0.3, 0.45, 0.6][seed % 3], seed)
        if single_module_left_out(g):
            instance = g
            break
    assert instance is not None
    assert edge_count(optimal_search(instance)) == edge_count(
        exhaustive_search(instance)
    )
