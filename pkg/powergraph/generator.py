"""
Random scale-free directed graphs for benchmark corpora.

Vertices are grown with the directed preferential attachment process of
``networkx.scale_free_graph`` (Python's Mersenne Twister seeded with the
graph seed). The simplified graph is then densified with in/out-degree biased
edge steps drawn from numpy's PCG64 generator until it holds exactly the
target number of edges.
"""

from dataclasses import dataclass

import networkx as nx
import numpy as np

from powergraph.core import DirectedGraph
from powergraph.errors import PreconditionError
from powergraph.logger import get_logger

log = get_logger(__name__)

STALL_LIMIT = 1000
SEED_GRAPH_SIZE = 3


def target_edge_count(nv: int) -> int:
    """Edge count ``round(1.5 * nv ** 1.5)`` of a generated graph."""
    if nv < 0:
        msg = f"vertex count must be non-negative, got {nv}"
        raise PreconditionError(msg)
    return round(1.5 * nv**1.5)


@dataclass(frozen=True)
class GenSpec:
    """Parameters of one generated graph.

    Attributes
    ----------
    nv : int
        Vertex count.
    seed : int
        Unsigned 64-bit seed shared by both random streams.
    alpha, beta, gamma : float
        Probabilities of the new-source, existing-pair and new-sink steps.
    delta_in, delta_out : float
        Degree smoothing of the target and source choices.
    target_edges : int
        Exact edge count of the result.
    """

    nv: int
    seed: int = 0
    alpha: float = 0.41
    beta: float = 0.54
    gamma: float = 0.05
    delta_in: float = 0.2
    delta_out: float = 0.0
    target_edges: int | None = None

    def __post_init__(self) -> None:
        if self.nv < 0:
            msg = f"vertex count must be non-negative, got {self.nv}"
            raise PreconditionError(msg)
        if not 0 <= self.seed < 2**64:
            msg = f"seed must be an unsigned 64-bit integer, got {self.seed}"
            raise PreconditionError(msg)
        if min(self.alpha, self.beta, self.gamma) < 0:
            msg = "step probabilities must be non-negative"
            raise PreconditionError(msg)
        if abs(self.alpha + self.beta + self.gamma - 1.0) > 1e-9:
            msg = (
                "step probabilities must sum to 1, got "
                f"{self.alpha + self.beta + self.gamma}"
            )
            raise PreconditionError(msg)
        if self.delta_in < 0 or self.delta_out < 0:
            msg = "degree smoothing must be non-negative"
            raise PreconditionError(msg)
        if self.target_edges is None:
            target = target_edge_count(self.nv)
            object.__setattr__(self, "target_edges", target)
        if self.target_edges < 0:
            msg = f"edge target must be non-negative, got {self.target_edges}"
            raise PreconditionError(msg)
        if self.target_edges > self.max_edges:
            msg = (
                f"target of {self.target_edges} edges is unreachable with "
                f"{self.nv} vertices (at most {self.max_edges})"
            )
            raise PreconditionError(msg)

    @property
    def max_edges(self) -> int:
        return self.nv * (self.nv - 1)

    @classmethod
    def for_size(cls, nv: int, seed: int = 0, **params) -> "GenSpec":
        """Spec with the default density, clamped to the complete digraph."""
        target = min(target_edge_count(nv), nv * (nv - 1))
        return cls(nv, seed, target_edges=target, **params)


def _grow(spec: GenSpec) -> set[tuple[int, int]]:
    multigraph = nx.scale_free_graph(
        spec.nv,
        alpha=spec.alpha,
        beta=spec.beta,
        gamma=spec.gamma,
        delta_in=spec.delta_in,
        delta_out=spec.delta_out,
        seed=spec.seed,
    )
    return {(int(u), int(v)) for u, v in multigraph.edges() if u != v}


def _missing_edges(nv: int, edges: set[tuple[int, int]]) -> list:
    return [
        (u, v)
        for u in range(nv)
        for v in range(nv)
        if u != v and (u, v) not in edges
    ]


def _densify(
    spec: GenSpec, edges: set[tuple[int, int]], rng: np.random.Generator
) -> None:
    out_degree = np.zeros(spec.nv, dtype=np.float64)
    in_degree = np.zeros(spec.nv, dtype=np.float64)
    for u, v in edges:
        out_degree[u] += 1
        in_degree[v] += 1

    stalled = 0
    while len(edges) < spec.target_edges:
        out_weight = out_degree + spec.delta_out
        in_weight = in_degree + spec.delta_in
        exhausted = out_weight.sum() <= 0 or in_weight.sum() <= 0
        if stalled >= STALL_LIMIT or exhausted:
            break
        u = int(rng.choice(spec.nv, p=out_weight / out_weight.sum()))
        v = int(rng.choice(spec.nv, p=in_weight / in_weight.sum()))
        if u == v or (u, v) in edges:
            stalled += 1
            continue
        stalled = 0
        edges.add((u, v))
        out_degree[u] += 1
        in_degree[v] += 1

    if len(edges) < spec.target_edges:
        missing = _missing_edges(spec.nv, edges)
        needed = spec.target_edges - len(edges)
        log.debug(
            f"degree-biased steps stalled, drawing {needed} of "
            f"{len(missing)} missing edges uniformly"
        )
        for i in rng.choice(len(missing), size=needed, replace=False):
            edges.add(missing[int(i)])


def bollobas_generate(spec: GenSpec) -> DirectedGraph:
    """Simple directed scale-free graph with exactly ``spec.target_edges``
    edges on ``spec.nv`` vertices.

    Graphs smaller than the growth process's seed cycle get their edges
    uniformly at random. Surplus edges of the growth phase are removed at
    random.
    """
    rng = np.random.default_rng(np.random.PCG64(spec.seed))
    if spec.nv < SEED_GRAPH_SIZE:
        edges: set[tuple[int, int]] = set()
    else:
        edges = _grow(spec)

    if len(edges) > spec.target_edges:
        ordered = sorted(edges)
        keep = rng.choice(len(ordered), size=spec.target_edges, replace=False)
        edges = {ordered[int(i)] for i in keep}
    else:
        _densify(spec, edges, rng)

    log.debug(
        f"generated graph with {spec.nv} vertices and {len(edges)} edges "
        f"(seed {spec.seed})"
    )
    return DirectedGraph(spec.nv, frozenset(edges))


def generate(nv: int, seed: int = 0, **params) -> DirectedGraph:
    """Generated graph of the default density for ``nv`` vertices."""
    return bollobas_generate(GenSpec.for_size(nv, seed, **params))
