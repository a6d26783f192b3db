"""
Search states: a configuration together with its representative edges and
module neighbour indexes, updated locally when modules are added.
"""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType

from powergraph.core import (
    Configuration,
    DirectedGraph,
    Edge,
    RepresentativeEdgeSet,
    add_module,
    common_in,
    common_out,
    dissolve_module,
    flat_configuration,
    is_clique,
    module_signature,
    representative_edges,
    signature,
)
from powergraph.errors import DegenerateModuleError, HierarchyError


def _index(edges: Iterable[Edge]) -> tuple[dict, dict]:
    out_index: dict[int, set[int]] = {}
    in_index: dict[int, set[int]] = {}
    for a, b in edges:
        out_index.setdefault(a, set()).add(b)
        in_index.setdefault(b, set()).add(a)
    return out_index, in_index


@dataclass(frozen=True, eq=False)
class EdgeChange:
    """Representative edges removed and added by one module addition."""

    mask: int
    removed: frozenset[Edge]
    added_out: tuple[int, ...]
    added_in: tuple[int, ...]
    clique: bool

    @property
    def delta(self) -> int:
        added = len(self.added_out) + len(self.added_in) + int(self.clique)
        return added - len(self.removed)


@dataclass(frozen=True, eq=False)
class SearchState:
    """Configuration with its representative edges ``R`` and the out/in
    neighbour sets ``N+``/``N-`` of every module over ``R``."""

    configuration: Configuration
    edges: frozenset[Edge]
    out_index: Mapping[int, frozenset[int]]
    in_index: Mapping[int, frozenset[int]]

    @classmethod
    def from_configuration(cls, c: Configuration) -> "SearchState":
        return cls.build(c, representative_edges(c).edges)

    @classmethod
    def flat(cls, g: DirectedGraph) -> "SearchState":
        return cls.from_configuration(flat_configuration(g))

    @classmethod
    def build(cls, c: Configuration, edges: Iterable[Edge]) -> "SearchState":
        edges = frozenset(edges)
        out_index, in_index = _index(edges)
        return cls(
            c,
            edges,
            MappingProxyType({k: frozenset(v) for k, v in out_index.items()}),
            MappingProxyType({k: frozenset(v) for k, v in in_index.items()}),
        )

    @property
    def graph(self) -> DirectedGraph:
        return self.configuration.graph

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def module_count(self) -> int:
        return self.configuration.module_count

    @cached_property
    def signature(self) -> str:
        return signature(self.configuration)

    def representative_edges(self) -> RepresentativeEdgeSet:
        return RepresentativeEdgeSet(self.edges)

    def top_order(self) -> list[int]:
        return self.configuration.top_order()

    def successors(self, module_id: int) -> frozenset[int]:
        return self.out_index.get(module_id, frozenset())

    def predecessors(self, module_id: int) -> frozenset[int]:
        return self.in_index.get(module_id, frozenset())

    def is_incident(self, module_id: int) -> bool:
        return bool(
            self.successors(module_id) or self.predecessors(module_id)
        )

    def adjacent(self, m: int, n: int) -> bool:
        return n in self.successors(m) or m in self.successors(n)

    @cached_property
    def _top_renders(self) -> dict[int, str]:
        c = self.configuration
        return {i: module_signature(c, i) for i in c.top_level}

    def merged_signature(self, m: int, n: int) -> str:
        """Signature of the module a merge of ``m`` and ``n`` would create."""
        c = self.configuration
        parts = sorted((m, n), key=lambda i: c.modules[i].min_leaf)
        return "(" + "".join(self._top_renders[i] for i in parts) + ")"

    def signature_after(self, m: int, n: int) -> str:
        """Configuration signature after merging ``m`` and ``n``, before any
        edgeless module is dissolved."""
        c = self.configuration
        lead = min(c.modules[m].min_leaf, c.modules[n].min_leaf)
        parts = []
        for i in self.top_order():
            if i in (m, n):
                if c.modules[i].min_leaf == lead:
                    parts.append(self.merged_signature(m, n))
                continue
            parts.append(self._top_renders[i])
        return "".join(parts)

    def _check_members(self, members: Iterable[int]) -> tuple[int, ...]:
        members = tuple(sorted(set(members)))
        if len(members) < 2:
            msg = f"a module needs at least two members, got {len(members)}"
            raise DegenerateModuleError(msg)
        for member in members:
            if member not in self.configuration.top_level:
                msg = f"module {member} is not a top-level module"
                raise HierarchyError(msg)
        return members

    def change(self, members: Iterable[int]) -> EdgeChange:
        """Representative edges affected by grouping ``members``.

        Grouping top-level modules ``S`` into a new module ``p`` removes the
        edges ``(s, x)`` whose target lies in the common out-neighbourhood of
        ``p`` and the edges ``(x, s)`` whose source lies in its common
        in-neighbourhood; ``p`` gains one edge per outermost module in either
        neighbourhood. When ``p`` is a clique every edge inside ``p`` is
        replaced by a self-edge on ``p``.
        """
        members = self._check_members(members)
        c = self.configuration
        g = c.graph
        mask = 0
        for member in members:
            mask |= c.mask(member)
        co = common_out(g, mask)
        ci = common_in(g, mask)
        removed = set()
        for s in members:
            for x in self.successors(s):
                if x != s and c.mask(x) & ~co == 0:
                    removed.add((s, x))
            for x in self.predecessors(s):
                if x != s and c.mask(x) & ~ci == 0:
                    removed.add((x, s))
        clique = is_clique(g, mask)
        if clique:
            inside = set()
            for s in members:
                inside.update(c.descendants(s))
            for a in inside:
                for b in self.successors(a):
                    if b in inside:
                        removed.add((a, b))
        return EdgeChange(
            mask,
            frozenset(removed),
            tuple(c.maximal_modules(co)) if co else (),
            tuple(c.maximal_modules(ci)) if ci else (),
            clique,
        )

    def edges_after(self, members: Iterable[int]) -> int:
        """Representative edge count after grouping ``members``."""
        return self.edge_count + self.change(members).delta

    def nedges(self, m: int, n: int) -> int:
        """Representative edge count after merging ``m`` and ``n``.

        Without an edge between the two modules the count is
        ``|R| - |N+(m) & N+(n)| - |N-(m) & N-(n)|``; otherwise the affected
        edges are recounted locally.
        """
        if m == n:
            msg = "a merge needs two distinct modules"
            raise DegenerateModuleError(msg)
        self._check_members((m, n))
        if self.adjacent(m, n):
            return self.edges_after((m, n))
        shared_out = self.successors(m) & self.successors(n)
        shared_in = self.predecessors(m) & self.predecessors(n)
        return self.edge_count - len(shared_out) - len(shared_in)

    def add(
        self, members: Iterable[int], dissolve: bool = False
    ) -> "SearchState":
        """Group top-level modules into a new module.

        Parameters
        ----------
        members : iterable of int
            Top-level module ids.
        dissolve : bool
            Remove modules of the new subtree that end up without any
            incident representative edge.
        """
        members = self._check_members(members)
        change = self.change(members)
        c = add_module(self.configuration, members)
        p = c.next_id - 1
        edges = set(self.edges) - change.removed
        edges.update((p, y) for y in change.added_out)
        edges.update((x, p) for x in change.added_in)
        if change.clique:
            edges.add((p, p))
        state = SearchState.build(c, edges)
        if dissolve:
            state = state.dissolve_unused(p)
        return state

    def dissolve_unused(self, root: int) -> "SearchState":
        """Dissolve edgeless non-trivial modules inside ``root``.

        Removing a module without representative edges leaves the edge set
        of the configuration unchanged.
        """
        c = self.configuration
        unused = [
            i
            for i in c.descendants(root)
            if not c.modules[i].is_trivial and not self.is_incident(i)
        ]
        if not unused:
            return self
        for module_id in unused:
            c = dissolve_module(c, module_id)
        return SearchState(c, self.edges, self.out_index, self.in_index)

    def merge(self, m: int, n: int) -> "SearchState":
        if m == n:
            msg = "a merge needs two distinct modules"
            raise DegenerateModuleError(msg)
        return self.add((m, n), dissolve=True)
