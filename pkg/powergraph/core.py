"""
Graph and module-hierarchy data model shared by every solver.

Vertex sets are stored as Python integers used as bitmasks: bit ``v`` is set
when vertex ``v`` belongs to the set. Module ids ``0..n-1`` are the trivial
modules ``{v}``; non-trivial modules receive sequential ids from ``n`` on.
"""

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType

import numpy as np

from powergraph.errors import DegenerateModuleError, GraphError, HierarchyError


Edge = tuple[int, int]


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the vertex ids contained in ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def min_leaf(mask: int) -> int:
    """Smallest vertex id contained in a non-empty ``mask``."""
    return (mask & -mask).bit_length() - 1


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


@dataclass(frozen=True)
class DirectedGraph:
    """Simple directed graph on the vertices ``0..n-1``.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : frozenset of tuple of int
        Ordered vertex pairs ``(u, v)``. Self-loops are rejected.
    """

    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.n < 0:
            msg = f"vertex count must be non-negative, got {self.n}"
            raise GraphError(msg)
        edges = frozenset((int(u), int(v)) for u, v in self.edges)
        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                msg = f"edge ({u}, {v}) outside vertex range [0, {self.n})"
                raise GraphError(msg)
            if u == v:
                msg = f"self-loop on vertex {u}"
                raise GraphError(msg)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], n: int | None = None):
        """Build a graph from an edge iterable, sizing it to the largest id
        when ``n`` is not given."""
        edges = list(edges)
        if n is None:
            n = 1 + max((max(u, v) for u, v in edges), default=-1)
        return cls(n, frozenset(edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def out_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
        return tuple(masks)

    @cached_property
    def in_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[v] |= 1 << u
        return tuple(masks)

    @property
    def is_complete(self) -> bool:
        return self.m == self.n * (self.n - 1)

    def adjacency_matrix(self) -> np.ndarray:
        """Dense ``uint8`` adjacency matrix, rows are sources."""
        matrix = np.zeros((self.n, self.n), dtype=np.uint8)
        if self.edges:
            idx = np.array(sorted(self.edges), dtype=np.int64)
            matrix[idx[:, 0], idx[:, 1]] = 1
        return matrix

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


def common_out(g: DirectedGraph, mask: int) -> int:
    """Vertices that every member of ``mask`` has an edge to."""
    acc = g.vertex_mask
    out = g.out_masks
    for u in iter_bits(mask):
        acc &= out[u]
        if not acc:
            break
    return acc


def common_in(g: DirectedGraph, mask: int) -> int:
    """Vertices that have an edge to every member of ``mask``."""
    acc = g.vertex_mask
    inc = g.in_masks
    for u in iter_bits(mask):
        acc &= inc[u]
        if not acc:
            break
    return acc


def is_clique(g: DirectedGraph, mask: int) -> bool:
    """True when ``mask`` holds at least two vertices that are pairwise
    connected in both directions."""
    if mask & (mask - 1) == 0:
        return False
    out = g.out_masks
    return all((mask & ~(1 << u)) & ~out[u] == 0 for u in iter_bits(mask))


@dataclass(frozen=True)
class Module:
    """A vertex group of a configuration.

    ``mask`` holds the leaves; ``children`` is empty for trivial modules.
    """

    id: int
    mask: int
    children: tuple[int, ...] = ()

    @property
    def is_trivial(self) -> bool:
        return not self.children

    @property
    def leaves(self) -> frozenset[int]:
        return frozenset(iter_bits(self.mask))

    @property
    def min_leaf(self) -> int:
        return min_leaf(self.mask)


@dataclass(frozen=True, eq=False)
class Configuration:
    """Laminar module hierarchy over a graph.

    Instances are immutable; every modifying operation returns a new
    configuration. Structural equality is tested through :func:`signature`.
    """

    graph: DirectedGraph
    modules: Mapping[int, Module]
    top_level: frozenset[int]
    next_id: int

    def __post_init__(self) -> None:
        modules = MappingProxyType(dict(self.modules))
        object.__setattr__(self, "modules", modules)
        object.__setattr__(self, "top_level", frozenset(self.top_level))

    @cached_property
    def parent(self) -> Mapping[int, int]:
        parents = {}
        for module in self.modules.values():
            for child in module.children:
                parents[child] = module.id
        return MappingProxyType(parents)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def module_count(self) -> int:
        """Number of non-trivial modules."""
        return len(self.modules) - self.graph.n

    def nontrivial(self) -> list[int]:
        return sorted(i for i, m in self.modules.items() if m.children)

    def mask(self, module_id: int) -> int:
        return self.modules[module_id].mask

    def ancestors(self, module_id: int) -> list[int]:
        """Proper ancestors of a module, innermost first."""
        chain = []
        current = self.parent.get(module_id)
        while current is not None:
            chain.append(current)
            current = self.parent.get(current)
        return chain

    def descendants(self, module_id: int) -> list[int]:
        """The module itself followed by everything nested inside it."""
        found = [module_id]
        stack = list(self.modules[module_id].children)
        while stack:
            current = stack.pop()
            found.append(current)
            stack.extend(self.modules[current].children)
        return found

    def lowest_common_ancestor(self, a: int, b: int) -> int | None:
        if a == b:
            return self.parent.get(a)
        above_a = set(self.ancestors(a))
        for ancestor in self.ancestors(b):
            if ancestor in above_a:
                return ancestor
        return None

    def maximal_modules(self, mask: int) -> list[int]:
        """Outermost modules whose leaves all lie inside ``mask``."""
        found = []
        stack = list(self.top_level)
        while stack:
            current = self.modules[stack.pop()]
            if current.mask & ~mask == 0:
                found.append(current.id)
            elif current.mask & mask:
                stack.extend(current.children)
        return sorted(found)

    def top_order(self) -> list[int]:
        """Top-level module ids ordered by their smallest leaf."""
        return sorted(self.top_level, key=lambda i: self.modules[i].min_leaf)


@dataclass(frozen=True)
class RepresentativeEdgeSet:
    """Module-level edges of a power graph."""

    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(sorted(self.edges))

    def __contains__(self, edge: object) -> bool:
        return edge in self.edges


def flat_configuration(g: DirectedGraph) -> Configuration:
    """Configuration holding only the trivial modules, all top-level."""
    modules = {v: Module(v, 1 << v) for v in range(g.n)}
    return Configuration(g, modules, frozenset(range(g.n)), g.n)


def add_module(c: Configuration, members: Iterable[int]) -> Configuration:
    """Group top-level modules under a new parent module.

    Parameters
    ----------
    c : Configuration
        Configuration to extend.
    members : iterable of int
        Ids of top-level modules that become the children of the new module.

    Returns
    -------
    Configuration
        A new configuration; the new module has id ``c.next_id``.

    Raises
    ------
    DegenerateModuleError
        If fewer than two distinct members are given.
    HierarchyError
        If a member is unknown or not top-level.
    """
    members = set(members)
    if len(members) < 2:
        msg = f"a module needs at least two members, got {len(members)}"
        raise DegenerateModuleError(msg)
    mask = 0
    for member in members:
        if member not in c.top_level:
            msg = f"module {member} is not a top-level module"
            raise HierarchyError(msg)
        mask |= c.modules[member].mask
    members = tuple(sorted(members, key=lambda i: c.modules[i].min_leaf))
    new = Module(c.next_id, mask, members)
    modules = dict(c.modules)
    modules[new.id] = new
    top_level = (c.top_level - set(members)) | {new.id}
    return Configuration(c.graph, modules, top_level, c.next_id + 1)


def dissolve_module(c: Configuration, module_id: int) -> Configuration:
    """Remove a non-trivial module, promoting its children to its parent."""
    module = c.modules.get(module_id)
    if module is None or module.is_trivial:
        msg = f"module {module_id} is not a non-trivial module"
        raise HierarchyError(msg)
    modules = dict(c.modules)
    del modules[module_id]
    top_level = set(c.top_level)
    parent_id = c.parent.get(module_id)
    if parent_id is None:
        top_level.discard(module_id)
        top_level.update(module.children)
    else:
        parent = modules[parent_id]
        children = [i for i in parent.children if i != module_id]
        children.extend(module.children)
        children.sort(key=lambda i: c.modules[i].min_leaf)
        modules[parent_id] = Module(parent.id, parent.mask, tuple(children))
    return Configuration(c.graph, modules, frozenset(top_level), c.next_id)


def _module_out_masks(c: Configuration) -> dict[int, int]:
    return {i: common_out(c.graph, m.mask) for i, m in c.modules.items()}


def clique_modules(c: Configuration) -> set[int]:
    return {
        i
        for i, m in c.modules.items()
        if m.children and is_clique(c.graph, m.mask)
    }


def representative_edges(c: Configuration) -> RepresentativeEdgeSet:
    """Compute the minimal set of module edges covering the graph.

    For every module ``a`` the candidate targets are the outermost modules
    inside the common out-neighbourhood of ``a``. A candidate is dominated and
    dropped when the parent of ``a`` reaches it as well, or when both
    endpoints sit inside a clique module. Non-trivial cliques whose parent is
    not a clique carry a self-edge.
    """
    co = _module_out_masks(c)
    cliques = clique_modules(c)
    edges = set()
    for a in c.modules:
        if not co[a]:
            continue
        parent_co = co[c.parent[a]] if a in c.parent else 0
        for b in c.maximal_modules(co[a]):
            if c.modules[b].mask & ~parent_co == 0:
                continue
            lca = c.lowest_common_ancestor(a, b)
            if lca is not None and lca in cliques:
                continue
            edges.add((a, b))
    for q in cliques:
        if c.parent.get(q) not in cliques:
            edges.add((q, q))
    return RepresentativeEdgeSet(frozenset(edges))


def expand_edge(c: Configuration, edge: Edge) -> set[Edge]:
    """Flat edges represented by one module edge."""
    a, b = edge
    sources = list(iter_bits(c.mask(a)))
    if a == b:
        return {(u, v) for u in sources for v in sources if u != v}
    targets = list(iter_bits(c.mask(b)))
    return {(u, v) for u in sources for v in targets}


def expand(c: Configuration, r: RepresentativeEdgeSet) -> set[Edge]:
    """Flat edge set implied by ``r``."""
    flat = set()
    for edge in r.edges:
        flat |= expand_edge(c, edge)
    return flat


def module_signature(c: Configuration, module_id: int) -> str:
    module = c.modules[module_id]
    if module.is_trivial:
        return f"({module.min_leaf})"
    inner = sorted(module.children, key=lambda i: c.modules[i].min_leaf)
    return "(" + "".join(module_signature(c, i) for i in inner) + ")"


def signature(c: Configuration) -> str:
    """Canonical text form of the module structure of ``c``.

    A trivial module prints as ``(v)``; a non-trivial module wraps the
    signatures of its children, ordered by smallest leaf, in parentheses.
    The top-level modules are concatenated in the same order.
    """
    return "".join(module_signature(c, i) for i in c.top_order())


def boundary_crossings(c: Configuration, r: RepresentativeEdgeSet) -> int:
    """Count the module boundaries crossed by the representative edges.

    An edge ``(a, b)`` crosses the boundary of every module that strictly
    contains exactly one of its endpoints. Self-edges cross nothing.
    """
    crossings = 0
    for a, b in r.edges:
        if a == b:
            continue
        crossings += len(set(c.ancestors(a)) ^ set(c.ancestors(b)))
    return crossings


def is_dominated(c: Configuration, edge: Edge, other: Edge) -> bool:
    """True when ``other`` represents every flat edge of ``edge``."""
    if edge == other:
        return False
    return (
        c.mask(edge[0]) & ~c.mask(other[0]) == 0
        and c.mask(edge[1]) & ~c.mask(other[1]) == 0
    )


def validate_configuration(c: Configuration) -> list[str]:
    """Structural problems of ``c``, empty when the hierarchy is valid."""
    problems = []
    g = c.graph
    for v in range(g.n):
        module = c.modules.get(v)
        if module is None or module.mask != 1 << v or module.children:
            problems.append(f"trivial module {v} missing or malformed")
    seen_children = set()
    for module in c.modules.values():
        if module.is_trivial:
            if module.id >= g.n:
                problems.append(f"module {module.id} has no children")
            continue
        if len(module.children) < 2:
            problems.append(f"module {module.id} has fewer than two children")
        union = 0
        for child in module.children:
            if child not in c.modules:
                problems.append(
                    f"module {module.id} has unknown child {child}"
                )
                continue
            if child in seen_children:
                problems.append(f"module {child} has more than one parent")
            seen_children.add(child)
            if union & c.modules[child].mask:
                problems.append(f"children of module {module.id} overlap")
            union |= c.modules[child].mask
        if union != module.mask:
            problems.append(
                f"leaves of module {module.id} do not match its children"
            )
    covered = 0
    for top in c.top_level:
        if top not in c.modules:
            problems.append(f"unknown top-level module {top}")
            continue
        if top in seen_children:
            problems.append(f"top-level module {top} has a parent")
        if covered & c.modules[top].mask:
            problems.append("top-level modules overlap")
        covered |= c.modules[top].mask
    if covered != g.vertex_mask:
        problems.append("top-level modules do not cover every vertex")
    orphans = set(c.modules) - seen_children - set(c.top_level)
    if orphans:
        problems.append(
            f"modules outside the hierarchy: {sorted(orphans)}"
        )
    return problems


def check_solution(c: Configuration, r: RepresentativeEdgeSet) -> list[str]:
    """Problems of a stored power graph, empty when it is lossless and
    minimal."""
    problems = validate_configuration(c)
    if problems:
        return problems
    for a, b in r.edges:
        if a not in c.modules or b not in c.modules:
            problems.append(f"edge ({a}, {b}) references an unknown module")
        elif a != b and c.mask(a) & c.mask(b):
            problems.append(f"edge ({a}, {b}) joins overlapping modules")
    if problems:
        return problems
    flat = expand(c, r)
    missing = c.graph.edges - flat
    extra = flat - c.graph.edges
    if missing:
        problems.append(f"{len(missing)} graph edges are not represented")
    if extra:
        problems.append(f"{len(extra)} represented edges are not in the graph")
    ordered = sorted(r.edges)
    for edge in ordered:
        for other in ordered:
            if is_dominated(c, edge, other):
                problems.append(f"edge {edge} is dominated by {other}")
    if not problems and r.edges != representative_edges(c).edges:
        problems.append(
            "edge set differs from the minimal representative edges"
        )
    return problems
