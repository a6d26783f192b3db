"""
Greedy Jaccard clustering baseline.

Vertices are agglomerated pairwise by the similarity of their in- and
out-neighbourhoods into a candidate hierarchy. Candidates are then
instantiated greedily, the one removing the most representative edges first.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from powergraph.core import (
    Configuration,
    DirectedGraph,
    iter_bits,
    min_leaf,
    to_mask,
)
from powergraph.errors import PreconditionError
from powergraph.logger import get_logger
from powergraph.state import SearchState

log = get_logger(__name__)


@dataclass(frozen=True)
class CandidateModule:
    """Cluster created by one agglomeration step.

    ``parts`` holds the leaf masks of the two clusters that were joined.
    """

    leaves: frozenset[int]
    similarity: Fraction
    parts: tuple[int, int]

    @property
    def mask(self) -> int:
        return self.parts[0] | self.parts[1]


@njit(cache=True)
def overlap_counts(out_rows, in_rows, members, active, i):
    """Shared and combined neighbour counts of cluster ``i`` against every
    active cluster, ignoring vertices inside either cluster."""
    k, n = out_rows.shape
    shared = np.zeros(k, dtype=np.int64)
    combined = np.zeros(k, dtype=np.int64)
    for j in range(k):
        if j == i or not active[j]:
            continue
        for v in range(n):
            if members[i, v] or members[j, v]:
                continue
            oi = out_rows[i, v]
            oj = out_rows[j, v]
            ii = in_rows[i, v]
            ij = in_rows[j, v]
            if oi and oj:
                shared[j] += 1
            if oi or oj:
                combined[j] += 1
            if ii and ij:
                shared[j] += 1
            if ii or ij:
                combined[j] += 1
    return shared, combined


def jaccard_similarity(g: DirectedGraph, a: set[int], b: set[int]) -> Fraction:
    """Summed in/out Jaccard index of two disjoint vertex groups.

    Neighbourhoods are unions over the group members with both groups
    removed; the index is 0 when both neighbourhoods are empty.
    """
    a_mask = to_mask(a)
    b_mask = to_mask(b)
    if not a_mask or not b_mask:
        msg = "similarity needs two non-empty groups"
        raise PreconditionError(msg)
    if a_mask & b_mask:
        msg = "similarity needs disjoint groups"
        raise PreconditionError(msg)
    adjacency = g.adjacency_matrix().astype(np.int64)
    members = np.zeros((2, g.n), dtype=np.uint8)
    members[0, list(a)] = 1
    members[1, list(b)] = 1
    out_rows = (members.astype(np.int64) @ adjacency > 0).astype(np.uint8)
    in_rows = (members.astype(np.int64) @ adjacency.T > 0).astype(np.uint8)
    shared, combined = overlap_counts(
        out_rows, in_rows, members, np.ones(2, dtype=np.bool_), 0
    )
    if combined[1] == 0:
        return Fraction(0)
    return Fraction(int(shared[1]), int(combined[1]))


class _Clusters:
    """Active clusters of the agglomeration with their neighbourhood rows."""

    def __init__(self, g: DirectedGraph) -> None:
        n = g.n
        size = max(2 * n - 1, 1)
        adjacency = g.adjacency_matrix()
        self.out_rows = np.zeros((size, n), dtype=np.uint8)
        self.in_rows = np.zeros((size, n), dtype=np.uint8)
        self.members = np.zeros((size, n), dtype=np.uint8)
        self.active = np.zeros(size, dtype=np.bool_)
        self.shared = np.zeros((size, size), dtype=np.int64)
        self.combined = np.zeros((size, size), dtype=np.int64)
        self.masks = [0] * size
        self.count = n
        self.out_rows[:n] = adjacency
        self.in_rows[:n] = adjacency.T
        self.members[:n] = np.eye(n, dtype=np.uint8)
        self.active[:n] = True
        for v in range(n):
            self.masks[v] = 1 << v
        for i in range(n):
            self._refresh(i)

    def _refresh(self, i: int) -> None:
        shared, combined = overlap_counts(
            self.out_rows, self.in_rows, self.members, self.active, i
        )
        self.shared[i, :] = shared
        self.shared[:, i] = shared
        self.combined[i, :] = combined
        self.combined[:, i] = combined

    def best_pair(self) -> tuple[int, int] | None:
        """Active pair with the highest positive similarity, ties going to
        the lowest smallest leaves."""
        idx = np.flatnonzero(self.active)
        if len(idx) < 2:
            return None
        shared = self.shared[np.ix_(idx, idx)].astype(np.float64)
        combined = self.combined[np.ix_(idx, idx)].astype(np.float64)
        similarity = np.divide(
            shared,
            combined,
            out=np.zeros_like(shared),
            where=combined > 0,
        )
        np.fill_diagonal(similarity, 0.0)
        top = similarity.max()
        if top <= 0.0:
            return None
        rows, cols = np.nonzero(similarity == top)
        best = None
        for r, c in zip(rows, cols, strict=True):
            i, j = int(idx[r]), int(idx[c])
            key = (min_leaf(self.masks[i]), min_leaf(self.masks[j]))
            if key[0] < key[1] and (best is None or key < best[0]):
                best = (key, i, j)
        return best[1], best[2]

    def join(self, i: int, j: int) -> int:
        k = self.count
        self.count += 1
        self.out_rows[k] = self.out_rows[i] | self.out_rows[j]
        self.in_rows[k] = self.in_rows[i] | self.in_rows[j]
        self.members[k] = self.members[i] | self.members[j]
        self.masks[k] = self.masks[i] | self.masks[j]
        self.active[i] = self.active[j] = False
        self.active[k] = True
        self._refresh(k)
        return k


def build_candidate_hierarchy(g: DirectedGraph) -> list[CandidateModule]:
    """Candidate modules from greedy pairwise agglomeration.

    The two active clusters with the highest positive similarity are joined
    until no pair has positive similarity. Similarities of a new cluster are
    computed from the flat neighbourhoods of its members.
    """
    clusters = _Clusters(g)
    candidates = []
    while (pair := clusters.best_pair()) is not None:
        i, j = pair
        similarity = Fraction(
            int(clusters.shared[i, j]), int(clusters.combined[i, j])
        )
        parts = (clusters.masks[i], clusters.masks[j])
        k = clusters.join(i, j)
        candidates.append(
            CandidateModule(
                frozenset(iter_bits(clusters.masks[k])), similarity, parts
            )
        )
        log.debug(f"candidate {sorted(candidates[-1].leaves)} at {similarity}")
    return candidates


def _members(state: SearchState, mask: int) -> list[int] | None:
    """Top-level modules tiling ``mask``, or None when an instantiated
    module already contains it."""
    c = state.configuration
    members = []
    for top in c.top_level:
        inside = c.mask(top) & mask
        if not inside:
            continue
        if c.mask(top) & ~mask:
            return None
        members.append(top)
    return members


def jaccard_decompose(g: DirectedGraph) -> Configuration:
    """Configuration built by instantiating Jaccard candidates greedily.

    Each step instantiates the candidate whose addition removes the most
    representative edges; the procedure stops when no candidate removes any.
    """
    state = SearchState.flat(g)
    pending = build_candidate_hierarchy(g)
    log.debug(f"{len(pending)} jaccard candidates")
    while True:
        best = None
        for candidate in pending:
            members = _members(state, candidate.mask)
            if members is None or len(members) < 2:
                continue
            e = state.edges_after(members)
            if e >= state.edge_count:
                continue
            left, right = candidate.parts
            key = (e, min_leaf(left), min_leaf(right))
            if best is None or key < best[0]:
                best = (key, candidate, members)
        if best is None:
            break
        _, candidate, members = best
        log.debug(
            f"instantiate {sorted(candidate.leaves)}: "
            f"{state.edge_count} -> {best[0][0]} edges"
        )
        state = state.add(members, dissolve=True)
        pending.remove(candidate)
    return state.configuration
