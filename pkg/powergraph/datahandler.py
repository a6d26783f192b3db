"""
Reading and writing graphs and power graphs.

Edge lists
----------
One edge ``u v`` per line, whitespace separated non-negative integers.
Lines starting with ``#`` and blank lines are ignored. An optional header
line ``n <count>`` fixes the vertex count, otherwise it is one more than the
largest id.

Power graph documents
---------------------
JSON objects with the keys ``version``, ``n``, ``labels``, ``modules``,
``edges`` and ``metadata``. ``modules`` lists every module as
``{"id": i, "leaf": v}`` or ``{"id": i, "children": [...]}`` sorted by id,
``edges`` lists representative edges as ``[a, b]`` module id pairs.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import pydot

from powergraph.core import (
    Configuration,
    DirectedGraph,
    Module,
    RepresentativeEdgeSet,
    check_solution,
    expand,
    validate_configuration,
)
from powergraph.errors import GraphError, ParseError, VerificationError
from powergraph.logger import get_logger

log = get_logger(__name__)

FORMAT_VERSION = 1


def _parse_int(token: str, lineno: int, path) -> int:
    # plain ASCII digits, so no sign, underscore or other script
    digits = token.removeprefix("-")
    if not (digits.isascii() and digits.isdigit()):
        msg = f"expected a non-negative integer, got {token!r}"
        raise ParseError(msg, lineno, path)
    if digits != token:
        msg = f"vertex ids must be non-negative, got {token}"
        raise ParseError(msg, lineno, path)
    return int(digits)


def parse_edge_list(
    text: str, path: Path | str | None = None
) -> DirectedGraph:
    """Parse edge-list text into a graph.

    Raises
    ------
    ParseError
        On malformed lines, self-loops, duplicate edges, a repeated header or
        ids outside the declared vertex count. The error carries the line
        number.
    """
    edges: dict[tuple[int, int], int] = {}
    n = None
    largest, largest_line = -1, 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "n":
            if len(tokens) != 2:
                msg = "header must read 'n <count>'"
                raise ParseError(msg, lineno, path)
            if n is not None:
                msg = "vertex count declared twice"
                raise ParseError(msg, lineno, path)
            n = _parse_int(tokens[1], lineno, path)
            if largest >= n:
                msg = (
                    f"vertex {largest} used on line {largest_line} "
                    f"exceeds n={n}"
                )
                raise ParseError(msg, lineno, path)
            continue
        if len(tokens) != 2:
            msg = f"expected two vertex ids, got {len(tokens)} tokens"
            raise ParseError(msg, lineno, path)
        u, v = (_parse_int(t, lineno, path) for t in tokens)
        if u == v:
            msg = f"self-loop on vertex {u}"
            raise ParseError(msg, lineno, path)
        if (u, v) in edges:
            msg = f"duplicate edge {u} {v} (first on line {edges[u, v]})"
            raise ParseError(msg, lineno, path)
        if n is not None and max(u, v) >= n:
            msg = f"vertex {max(u, v)} exceeds n={n}"
            raise ParseError(msg, lineno, path)
        edges[u, v] = lineno
        if max(u, v) > largest:
            largest, largest_line = max(u, v), lineno
    if n is None:
        n = largest + 1
    return DirectedGraph(n, frozenset(edges))


def format_edge_list(g: DirectedGraph) -> str:
    """Edge-list text with an explicit vertex count header."""
    lines = [f"n {g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


def read_edge_list(path: Path | str) -> DirectedGraph:
    path = Path(path)
    g = parse_edge_list(path.read_text(), path)
    log.debug(f"read {path}: {g.n} vertices, {g.m} edges")
    return g


def write_edge_list(g: DirectedGraph, path: Path | str) -> None:
    Path(path).write_text(format_edge_list(g))


@dataclass
class PowerGraphDocument:
    """Serializable power graph.

    Attributes
    ----------
    n : int
        Vertex count.
    modules : dict
        Non-trivial module id to its children ids. Ids ``0..n-1`` are the
        trivial modules and are not listed.
    edges : list of tuple of int
        Representative edges, sorted.
    labels : list of str, optional
        Vertex labels.
    metadata : dict
        Method, parameters and result statistics.
    """

    n: int
    modules: dict[int, tuple[int, ...]] = field(default_factory=dict)
    edges: list[tuple[int, int]] = field(default_factory=list)
    labels: list[str] | None = None
    metadata: dict[str, Any] = field(default_factory=dict)
    version: int = FORMAT_VERSION

    @classmethod
    def from_solution(
        cls,
        c: Configuration,
        r: RepresentativeEdgeSet,
        metadata: dict[str, Any] | None = None,
        labels: list[str] | None = None,
    ) -> "PowerGraphDocument":
        modules = {i: c.modules[i].children for i in c.nontrivial()}
        return cls(
            c.n,
            modules,
            list(r),
            None if labels is None else list(labels),
            dict(metadata or {}),
        )

    def to_configuration(
        self, graph: DirectedGraph | None = None
    ) -> tuple[Configuration, RepresentativeEdgeSet]:
        """Rebuild the configuration and its edge set.

        Without ``graph`` the flat graph is taken to be the expansion of the
        representative edges.

        Raises
        ------
        VerificationError
            If the module tree is not a valid hierarchy over ``n`` vertices.
        """
        masks = {v: 1 << v for v in range(self.n)}
        problems = []

        def mask_of(module_id: int, trail: tuple[int, ...]) -> int:
            if module_id in masks:
                return masks[module_id]
            if module_id in trail or module_id not in self.modules:
                problems.append(f"module {module_id} is undefined or cyclic")
                return 0
            acc = 0
            for child in self.modules[module_id]:
                acc |= mask_of(child, (*trail, module_id))
            masks[module_id] = acc
            return acc

        for module_id in sorted(self.modules):
            if module_id < self.n:
                problems.append(f"module id {module_id} is reserved")
            mask_of(module_id, ())
        if problems:
            raise VerificationError(problems)

        modules = {v: Module(v, 1 << v) for v in range(self.n)}
        for module_id, children in self.modules.items():
            ordered = tuple(
                sorted(children, key=lambda i: masks[i] & -masks[i])
            )
            modules[module_id] = Module(module_id, masks[module_id], ordered)
        nested = {
            child for children in self.modules.values() for child in children
        }
        top_level = frozenset(modules) - nested
        next_id = max(modules, default=-1) + 1
        r = RepresentativeEdgeSet(frozenset(self.edges))

        if graph is None:
            placeholder = Configuration(
                DirectedGraph(self.n), modules, top_level, next_id
            )
            problems = validate_configuration(placeholder)
            if problems:
                raise VerificationError(problems)
            for a, b in r.edges:
                if a not in modules or b not in modules:
                    msg = f"edge ({a}, {b}) references an unknown module"
                    raise VerificationError([msg])
            try:
                flat = frozenset(expand(placeholder, r))
                graph = DirectedGraph(self.n, flat)
            except GraphError as e:
                raise VerificationError([str(e)]) from e
        elif graph.n != self.n:
            msg = f"document has {self.n} vertices, graph has {graph.n}"
            raise VerificationError([msg])

        c = Configuration(graph, modules, top_level, next_id)
        problems = validate_configuration(c)
        if problems:
            raise VerificationError(problems)
        return c, r

    def verify(self, graph: DirectedGraph) -> list[str]:
        """Problems of this document as a power graph of ``graph``."""
        try:
            c, r = self.to_configuration(graph)
        except VerificationError as e:
            return e.problems
        return check_solution(c, r)

    def as_dict(self) -> dict[str, Any]:
        modules = [{"id": v, "leaf": v} for v in range(self.n)]
        modules += [
            {"id": i, "children": list(self.modules[i])}
            for i in sorted(self.modules)
        ]
        return {
            "version": self.version,
            "n": self.n,
            "labels": self.labels,
            "modules": modules,
            "edges": [list(e) for e in sorted(self.edges)],
            "metadata": self.metadata,
        }


def to_json(doc: PowerGraphDocument) -> str:
    """Canonical JSON text of a document."""
    return json.dumps(doc.as_dict(), indent=2, sort_keys=True) + "\n"


def parse_json(
    text: str, path: Path | str | None = None
) -> PowerGraphDocument:
    """Document from JSON text.

    Raises
    ------
    ParseError
        If the text is not JSON or lacks the document structure.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, path) from e
    try:
        version = int(data["version"])
        if version > FORMAT_VERSION:
            msg = f"unsupported document version {version}"
            raise ParseError(msg, path=path)
        n = int(data["n"])
        modules = {}
        for entry in data["modules"]:
            if "children" in entry:
                modules[int(entry["id"])] = tuple(
                    int(i) for i in entry["children"]
                )
            elif int(entry["id"]) != int(entry["leaf"]) or entry["id"] >= n:
                msg = f"trivial module {entry['id']} must carry its own vertex"
                raise ParseError(msg, path=path)
        edges = [(int(a), int(b)) for a, b in data["edges"]]
        labels = data.get("labels")
        metadata = dict(data.get("metadata") or {})
    except (KeyError, TypeError, ValueError) as e:
        msg = f"malformed power graph document: {e}"
        raise ParseError(msg, path=path) from e
    return PowerGraphDocument(
        n, modules, sorted(edges), labels, metadata, version
    )


def read_document(path: Path | str) -> PowerGraphDocument:
    path = Path(path)
    return parse_json(path.read_text(), path)


def write_document(doc: PowerGraphDocument, path: Path | str) -> None:
    Path(path).write_text(to_json(doc))


def _node_name(doc: PowerGraphDocument, module_id: int) -> str:
    if module_id < doc.n:
        return f"v{module_id}"
    return f"m{module_id}"


def _add_module(
    doc: PowerGraphDocument, parent: pydot.Graph, module_id: int
) -> None:
    if module_id < doc.n:
        label = doc.labels[module_id] if doc.labels else str(module_id)
        parent.add_node(pydot.Node(_node_name(doc, module_id), label=label))
        return
    cluster = pydot.Cluster(str(module_id), label="", style="rounded")
    cluster.add_node(
        pydot.Node(
            _node_name(doc, module_id),
            shape="point",
            style="invis",
            width="0",
        )
    )
    for child in doc.modules[module_id]:
        _add_module(doc, cluster, child)
    parent.add_subgraph(cluster)


def to_dot(doc: PowerGraphDocument) -> str:
    """Graphviz text drawing modules as nested clusters.

    Each non-trivial module gets a cluster ``cluster_<id>`` holding an
    invisible anchor node ``m<id>``; edges between modules attach to the
    anchors and are clipped at the cluster borders. Module self-edges are
    loops on the anchor with ``class="clique"``.
    """
    graph = pydot.Dot("powergraph", graph_type="digraph", compound="true")
    nested = {child for children in doc.modules.values() for child in children}
    top = sorted(
        (i for i in (*range(doc.n), *doc.modules) if i not in nested)
    )
    for module_id in top:
        _add_module(doc, graph, module_id)

    for a, b in sorted(doc.edges):
        attrs = {}
        if a == b:
            attrs["class"] = "clique"
        else:
            if a >= doc.n:
                attrs["ltail"] = f"cluster_{a}"
            if b >= doc.n:
                attrs["lhead"] = f"cluster_{b}"
        graph.add_edge(
            pydot.Edge(_node_name(doc, a), _node_name(doc, b), **attrs)
        )
    return graph.to_string()
