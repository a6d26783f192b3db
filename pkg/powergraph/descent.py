"""
In-place best-first descent, the beam of width one.

A single mutable hierarchy is kept together with its representative edges
and the out/in neighbour sets of every module. The gain of merging two
top-level modules is stored per pair and updated edge by edge, so a merge
only revisits the pairs around the edges it changed.
"""

import heapq
import itertools
import time
from collections import Counter
from collections.abc import Iterable

from powergraph.core import (
    Configuration,
    Edge,
    Module,
    common_in,
    common_out,
    is_clique,
)
from powergraph.errors import DegenerateModuleError, HierarchyError
from powergraph.logger import get_logger
from powergraph.state import SearchState

log = get_logger(__name__)

Pair = tuple[int, int]


class Descent:
    """Mutable search state driving the greedy merge descent.

    For top-level modules ``a`` and ``b`` the merge gain is the number of
    out-neighbours and in-neighbours they share, ignoring ``a`` and ``b``
    themselves. When ``a`` and ``b`` together form a clique, the edges
    between and on them collapse into one self-edge on the new module, which
    adds their number minus one.

    Parameters
    ----------
    state : SearchState
        Starting point; it is copied once and never modified.
    """

    def __init__(self, state: SearchState) -> None:
        c = state.configuration
        self.graph = c.graph
        self.modules: dict[int, Module] = dict(c.modules)
        self.parent: dict[int, int] = dict(c.parent)
        self.top: set[int] = set(c.top_level)
        self.next_id = c.next_id
        self.edges: set[Edge] = set(state.edges)
        self.succ = {i: set(state.successors(i)) for i in self.modules}
        self.pred = {i: set(state.predecessors(i)) for i in self.modules}
        self.leaf = {i: c.modules[i].min_leaf for i in self.top}
        # vertices every member reaches / is reached from
        self.out_mask = {i: common_out(c.graph, c.mask(i)) for i in self.top}
        self.in_mask = {i: common_in(c.graph, c.mask(i)) for i in self.top}

        self.shared: Counter[Pair] = Counter()
        for x in self.modules:
            for group in (self.pred[x], self.succ[x]):
                ordered = self._ordered(group - {x})
                self.shared.update(itertools.combinations(ordered, 2))
        candidates = set(self.shared)
        for a, b in self.edges:
            if a != b and a in self.top and b in self.top:
                candidates.add(self._key(a, b))
        self._dirty: set[Pair] = set()
        self._heap: list[tuple[int, int, int, int, int]] = []
        self._push(candidates)

    def _ordered(self, ids: Iterable[int]) -> list[int]:
        return sorted((i for i in ids if i in self.top), key=self.leaf.get)

    def _key(self, a: int, b: int) -> Pair:
        return (a, b) if self.leaf[a] < self.leaf[b] else (b, a)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def gain(self, a: int, b: int) -> int:
        """Edge reduction of merging top-level modules ``a`` and ``b``."""
        total = self.shared[self._key(a, b)]
        edges = self.edges
        if (
            (a, b) in edges
            and (b, a) in edges
            and is_clique(
                self.graph, self.modules[a].mask | self.modules[b].mask
            )
        ):
            inner = sum(e in edges for e in ((a, b), (b, a), (a, a), (b, b)))
            total += inner - 1
        return total

    def _check_pair(self, m: int, n: int) -> None:
        if m == n:
            msg = "a merge needs two distinct modules"
            raise DegenerateModuleError(msg)
        for member in (m, n):
            if member not in self.top:
                msg = f"module {member} is not a top-level module"
                raise HierarchyError(msg)

    def nedges(self, m: int, n: int) -> int:
        """Representative edge count after merging ``m`` and ``n``."""
        self._check_pair(m, n)
        return self.edge_count - self.gain(m, n)

    def _push(self, pairs: Iterable[Pair]) -> None:
        for a, b in pairs:
            if a in self.top and b in self.top:
                gain = self.gain(a, b)
                if gain > 0:
                    entry = (-gain, self.leaf[a], self.leaf[b], a, b)
                    heapq.heappush(self._heap, entry)

    def best_merge(self) -> Pair | None:
        """Pair with the largest gain, ties broken by smallest leaves."""
        heap = self._heap
        while heap:
            neg_gain, _, _, a, b = heap[0]
            current = a in self.top and b in self.top
            if current and self.gain(a, b) == -neg_gain:
                return a, b
            heapq.heappop(heap)
        return None

    def _bump(self, a: int, b: int, delta: int) -> None:
        key = self._key(a, b)
        self.shared[key] += delta
        self._dirty.add(key)

    def _shift(self, a: int, b: int, delta: int) -> None:
        # pairs sharing b as out-neighbour of a, or a as in-neighbour of b
        if a != b:
            if a in self.top:
                for s in self.pred[b]:
                    if s not in (a, b) and s in self.top:
                        self._bump(a, s, delta)
            if b in self.top:
                for t in self.succ[a]:
                    if t not in (a, b) and t in self.top:
                        self._bump(b, t, delta)

    def _link(self, a: int, b: int) -> None:
        self._shift(a, b, 1)
        self.edges.add((a, b))
        self.succ[a].add(b)
        self.pred[b].add(a)

    def _unlink(self, a: int, b: int) -> None:
        self.edges.discard((a, b))
        self.succ[a].discard(b)
        self.pred[b].discard(a)
        self._shift(a, b, -1)

    def _descendants(self, module_id: int) -> list[int]:
        found = [module_id]
        stack = list(self.modules[module_id].children)
        while stack:
            current = stack.pop()
            found.append(current)
            stack.extend(self.modules[current].children)
        return found

    def merge(self, m: int, n: int) -> None:
        """Group top-level ``m`` and ``n`` under a new module in place.

        Modules inside the new one that are left without representative
        edges are dissolved; the new module itself is dissolved when it has
        no edge.
        """
        self._check_pair(m, n)
        out_mask = self.out_mask[m] & self.out_mask[n]
        in_mask = self.in_mask[m] & self.in_mask[n]
        removed = set()
        targets = set()
        sources = set()
        for s in (m, n):
            for x in self.succ[s]:
                if x not in (m, n) and self.modules[x].mask & ~out_mask == 0:
                    removed.add((s, x))
                    targets.add(x)
            for x in self.pred[s]:
                if x not in (m, n) and self.modules[x].mask & ~in_mask == 0:
                    removed.add((x, s))
                    sources.add(x)
        mask = self.modules[m].mask | self.modules[n].mask
        clique = (
            (m, n) in self.edges
            and (n, m) in self.edges
            and is_clique(self.graph, mask)
        )
        p = self.next_id
        self.next_id += 1
        if not removed and not clique:
            return
        if clique:
            inside = set(self._descendants(m)) | set(self._descendants(n))
            for a in inside:
                removed.update((a, b) for b in self.succ[a] if b in inside)

        self.top -= {m, n}
        for a, b in removed:
            self._unlink(a, b)

        children = tuple(sorted((m, n), key=self.leaf.get))
        self.modules[p] = Module(p, mask, children)
        self.parent[m] = self.parent[n] = p
        self.succ[p] = set()
        self.pred[p] = set()
        self.leaf[p] = min(self.leaf[m], self.leaf[n])
        self.out_mask[p] = out_mask
        self.in_mask[p] = in_mask
        self.top.add(p)
        for y in targets:
            self._link(p, y)
        for x in sources:
            self._link(x, p)
        if clique:
            self._link(p, p)
        for s in self.succ[p] & self.pred[p]:
            if s != p and s in self.top:
                self._dirty.add(self._key(p, s))

        self._dissolve_unused(p)
        self._push(self._dirty)
        self._dirty.clear()

    def _dissolve_unused(self, root: int) -> None:
        unused = [
            i
            for i in self._descendants(root)[1:]
            if self.modules[i].children
            and not (self.succ[i] or self.pred[i])
        ]
        for module_id in unused:
            module = self.modules.pop(module_id)
            parent_id = self.parent.pop(module_id)
            parent = self.modules[parent_id]
            children = [i for i in parent.children if i != module_id]
            children.extend(module.children)
            children.sort(key=lambda i: self.modules[i].min_leaf)
            self.modules[parent_id] = Module(
                parent_id, parent.mask, tuple(children)
            )
            for child in module.children:
                self.parent[child] = parent_id
            del self.succ[module_id], self.pred[module_id]

    def run(self, deadline: float | None = None) -> "Descent":
        """Apply the best merge until no merge reduces the edge count.

        Parameters
        ----------
        deadline : float, optional
            ``time.monotonic()`` value after which no further merge starts.
        """
        while (pair := self.best_merge()) is not None:
            if deadline is not None and time.monotonic() >= deadline:
                log.debug("descent stopped at its deadline")
                break
            before = self.edge_count
            self.merge(*pair)
            log.debug(
                f"merge {pair[0]} + {pair[1]}: "
                f"{before} -> {self.edge_count} edges"
            )
        return self

    def to_state(self) -> SearchState:
        c = Configuration(
            self.graph, self.modules, frozenset(self.top), self.next_id
        )
        return SearchState.build(c, self.edges)
