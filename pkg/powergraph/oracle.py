"""
Brute-force reference solvers.

``exhaustive_search`` walks every sequence of improving module additions of
any arity; ``best_single_module`` finds the single module with the largest
edge savings; ``clique_reduction`` builds the bipartite graph whose best
single module reveals whether a source graph has a k-clique.
"""

import math
from dataclasses import dataclass

import networkx as nx

from powergraph.core import (
    Configuration,
    DirectedGraph,
    common_in,
    common_out,
    is_clique,
    iter_bits,
    module_signature,
)
from powergraph.errors import PreconditionError, SizeLimitError
from powergraph.logger import get_logger
from powergraph.optimal import strip_redundant_modules
from powergraph.state import SearchState

log = get_logger(__name__)

EXHAUSTIVE_MAX_N = 8
SINGLE_MODULE_MAX_SOURCES = 20


@dataclass(frozen=True)
class SingleModuleResult:
    """Biclique ``A -> B`` whose sink side ``B`` is the best single module.

    Attributes
    ----------
    sources : frozenset of int
        Source side ``A``.
    module : frozenset of int
        Sink side ``B``.
    savings : int
        ``|A||B| - |A|``.
    """

    sources: frozenset[int]
    module: frozenset[int]
    savings: int


def improving_additions(state: SearchState) -> list[tuple[int, tuple]]:
    """Every improving module over the top-level modules of ``state``.

    Returns ``(edges_after, members)`` pairs, best first. Member sets whose
    common out- and in-neighbourhoods are empty can only improve as cliques,
    and cliques stay cliques when shrunk, so such sets are not extended.
    """
    c = state.configuration
    g = c.graph
    top = c.top_order()
    found = []

    def extend(start: int, members: list[int], mask: int) -> None:
        for i in range(start, len(top)):
            member = top[i]
            grown = mask | c.mask(member)
            if (
                members
                and not common_out(g, grown)
                and not common_in(g, grown)
                and not is_clique(g, grown)
            ):
                continue
            chosen = [*members, member]
            if len(chosen) >= 2:
                e = state.edges_after(chosen)
                if e < state.edge_count:
                    found.append((e, tuple(chosen)))
            extend(i + 1, chosen, grown)

    extend(0, [], 0)
    found.sort(key=lambda t: (t[0], [c.modules[i].min_leaf for i in t[1]]))
    return found


def exhaustive_search(
    g: DirectedGraph, max_n: int = EXHAUSTIVE_MAX_N
) -> Configuration:
    """Optimal configuration by an unpruned depth-first traversal.

    Parameters
    ----------
    g : DirectedGraph
        Flat input graph.
    max_n : int
        Largest accepted vertex count.

    Raises
    ------
    SizeLimitError
        If ``g`` has more than ``max_n`` vertices.
    """
    if g.n > max_n:
        msg = f"exhaustive search is limited to {max_n} vertices, got {g.n}"
        raise SizeLimitError(msg)

    root = SearchState.flat(g)
    best = root
    visited: dict[str, list[frozenset[str]]] = {}
    nodes = 0

    def visit(state: SearchState, forbidden: frozenset[str]) -> None:
        nonlocal best, nodes
        earlier = visited.setdefault(state.signature, [])
        if any(seen <= forbidden for seen in earlier):
            return
        earlier.append(forbidden)
        nodes += 1
        if state.edge_count < best.edge_count:
            best = state

        c = state.configuration
        excluded = set(forbidden)
        for _, members in improving_additions(state):
            key = "".join(module_signature(c, i) for i in members)
            if key in excluded:
                continue
            visit(state.add(members), frozenset(excluded))
            excluded.add(key)

    visit(root, frozenset())
    log.info(
        f"exhaustive search visited {nodes} configurations, "
        f"best {best.edge_count} edges"
    )
    return strip_redundant_modules(best.configuration)


def best_single_module(
    g: DirectedGraph, max_sources: int = SINGLE_MODULE_MAX_SOURCES
) -> SingleModuleResult:
    """Biclique ``A -> B`` with ``|A| <= |B|`` maximising ``|A||B| - |A|``.

    Source sets are enumerated in increasing vertex order while tracking the
    common out-neighbourhood ``B``. Extensions of ``A`` only shrink ``B``, so
    a branch is abandoned once ``|B|(|B| - 1)`` cannot beat the incumbent.

    Raises
    ------
    SizeLimitError
        If more than ``max_sources`` vertices have outgoing edges.
    """
    sources = [v for v in range(g.n) if g.out_masks[v]]
    if len(sources) > max_sources:
        msg = (
            f"single-module search is limited to {max_sources} source "
            f"vertices, got {len(sources)}"
        )
        raise SizeLimitError(msg)

    out = g.out_masks
    best = SingleModuleResult(frozenset(), frozenset(), 0)
    best_found = False

    def extend(start: int, chosen: list[int], targets: int) -> None:
        nonlocal best, best_found
        for i in range(start, len(sources)):
            v = sources[i]
            common = targets & out[v]
            size = common.bit_count()
            if size == 0:
                continue
            if best_found and size * (size - 1) <= best.savings:
                continue
            a = [*chosen, v]
            if len(a) <= size:
                savings = len(a) * size - len(a)
                if not best_found or savings > best.savings:
                    best = SingleModuleResult(
                        frozenset(a), frozenset(iter_bits(common)), savings
                    )
                    best_found = True
            extend(i + 1, a, common)

    extend(0, [], g.vertex_mask)
    return best


def clique_reduction(source: nx.Graph, k: int) -> DirectedGraph:
    """Bipartite graph whose best single module detects a ``k``-clique.

    The source vertices (sorted) become ids ``0..|V|-1``. They are followed
    by one vertex per source edge (sorted) and ``C(k, 2)`` filler vertices.
    Every source vertex points to the edges it is not incident to and to
    every filler vertex.

    Raises
    ------
    PreconditionError
        Unless ``k >= 5`` and the source has exactly ``2k`` vertices.
    """
    if k < 5 or source.number_of_nodes() != 2 * k:
        msg = (
            f"reduction needs k >= 5 and 2k source vertices, got k={k} "
            f"and {source.number_of_nodes()} vertices"
        )
        raise PreconditionError(msg)
    vertices = sorted(source.nodes)
    index = {v: i for i, v in enumerate(vertices)}
    edges = sorted(
        tuple(sorted((index[u], index[v]))) for u, v in source.edges
    )
    nv = len(vertices)
    first_filler = nv + len(edges)
    fillers = range(first_filler, first_filler + math.comb(k, 2))

    arcs = []
    for v in range(nv):
        for j, (a, b) in enumerate(edges):
            if v not in (a, b):
                arcs.append((v, nv + j))
        arcs.extend((v, w) for w in fillers)
    return DirectedGraph(first_filler + len(fillers), frozenset(arcs))


def has_clique(source: nx.Graph, k: int) -> bool:
    """True when ``source`` contains a clique on ``k`` vertices."""
    return any(len(clique) >= k for clique in nx.find_cliques(source))


def savings_threshold(k: int) -> int:
    """Savings reached on the reduction graph exactly when a clique exists."""
    return k**3 - k**2 - k

