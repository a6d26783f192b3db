"""
Beam search over module merges.

Every round each configuration in the beam proposes its best merges of two
top-level modules; proposals that beat the worst configuration in the beam
replace it. Structurally identical configurations are filtered through a
set of signatures that is never cleared. Width one runs the in-place
descent of :mod:`powergraph.descent` instead.
"""

import heapq
import itertools
from collections.abc import Iterator

from powergraph.core import Configuration, DirectedGraph
from powergraph.descent import Descent
from powergraph.errors import PreconditionError
from powergraph.logger import get_logger
from powergraph.state import SearchState

log = get_logger(__name__)

Merge = tuple[int, int, int]


def merge_pairs(state: SearchState) -> set[tuple[int, int]]:
    """Unordered top-level pairs that can reduce the edge count.

    Two modules can only gain from a merge when they share a neighbour in
    ``R`` or are joined by an edge.
    """
    c = state.configuration
    top = c.top_level
    pairs = set()

    def add_group(group: Iterator[int]) -> None:
        ordered = sorted(
            (i for i in group if i in top),
            key=lambda i: c.modules[i].min_leaf,
        )
        pairs.update(itertools.combinations(ordered, 2))

    for x in set(state.out_index) | set(state.in_index):
        add_group(state.predecessors(x))
        add_group(state.successors(x))
    for a, b in state.edges:
        if a != b and a in top and b in top:
            pair = sorted((a, b), key=lambda i: c.modules[i].min_leaf)
            pairs.add((pair[0], pair[1]))
    return pairs


def improving_merges(state: SearchState) -> list[Merge]:
    """All merges ``(e, m, n)`` with ``e = nedges(m, n) < |R|``.

    Sorted by ``e`` and then by the smallest leaves of ``m`` and ``n``;
    ``m`` always holds the smaller leaf.
    """
    c = state.configuration
    merges = []
    for m, n in merge_pairs(state):
        e = state.nedges(m, n)
        if e < state.edge_count:
            merges.append((e, m, n))
    merges.sort(
        key=lambda t: (
            t[0], c.modules[t[1]].min_leaf, c.modules[t[2]].min_leaf
        )
    )
    return merges


def nedges(state: SearchState, m: int, n: int) -> int:
    """Representative edge count after merging top-level modules."""
    return state.nedges(m, n)


def merge(state: SearchState, m: int, n: int) -> SearchState:
    """Merge two top-level modules, dropping modules left without edges."""
    return state.merge(m, n)


class Beam:
    """Bounded collection of search states, worst state first.

    Parameters
    ----------
    capacity : int
        Maximum number of states kept.
    """

    def __init__(self, capacity: int) -> None:
        self.capacity = capacity
        self.heap: list[tuple[int, int, SearchState]] = []
        self.seen: set[str] = set()
        self._counter = itertools.count()

    def __len__(self) -> int:
        return len(self.heap)

    def __iter__(self) -> Iterator[SearchState]:
        return iter(self.states())

    def states(self) -> list[SearchState]:
        """States ordered best first, older before newer on ties."""
        ranked = sorted(self.heap, key=lambda t: (-t[0], t[1]))
        return [s for _, _, s in ranked]

    def worst(self) -> SearchState:
        return self.heap[0][2]

    def best(self) -> SearchState:
        return self.states()[0]

    def push(self, state: SearchState) -> None:
        heapq.heappush(
            self.heap, (-state.edge_count, next(self._counter), state)
        )
        self.seen.add(state.signature)

    def pop(self) -> SearchState:
        return heapq.heappop(self.heap)[2]


def greedy(state: SearchState, deadline: float | None = None) -> SearchState:
    """Best-first descent applying the best improving merge until none is
    left.

    Runs in place on one mutable copy of ``state`` without signature
    bookkeeping; the result equals repeatedly taking the first entry of
    :func:`improving_merges`.

    Parameters
    ----------
    state : SearchState
        Starting state.
    deadline : float, optional
        ``time.monotonic()`` value after which no further merge starts.
    """
    return Descent(state).run(deadline).to_state()


def run_beam(start: SearchState, k: int) -> SearchState:
    """Run beam search from ``start`` and return the best state found."""
    if k < 1:
        msg = f"beam size must be at least 1, got {k}"
        raise PreconditionError(msg)
    if k == 1:
        return greedy(start)

    beam = Beam(k)
    beam.push(start)
    improved = True
    rounds = 0
    while improved:
        improved = False
        rounds += 1
        for current in beam.states():
            kbest = []
            for e, m, n in improving_merges(current):
                if current.signature_after(m, n) in beam.seen:
                    continue
                kbest.append((e, m, n))
                if len(kbest) == k:
                    break
            for e, m, n in kbest:
                if len(beam) < k or beam.worst().edge_count > e:
                    candidate = current.merge(m, n)
                    duplicate = candidate.signature in beam.seen
                    beam.seen.add(current.signature_after(m, n))
                    if not duplicate:
                        beam.push(candidate)
                        improved = True
                if len(beam) > k:
                    beam.pop()
        log.debug(
            f"beam round {rounds}: best {beam.best().edge_count} edges, "
            f"{len(beam.seen)} signatures"
        )
    return beam.best()


def beam_search(g: DirectedGraph, k: int = 1) -> Configuration:
    """Power graph configuration found by beam search of width ``k``.

    Parameters
    ----------
    g : DirectedGraph
        Flat input graph.
    k : int
        Beam size; ``k = 1`` runs the plain best-first descent.

    Returns
    -------
    Configuration
        Best configuration held by the beam when no merge improves it.
    """
    return run_beam(SearchState.flat(g), k).configuration
