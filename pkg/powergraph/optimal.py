"""
Exact power graph search by depth-first branch and bound.

The search tree adds one binary module per level, most edge-reducing merges
first. A node is cut when the current edge count minus the best reductions
still available cannot beat the incumbent. After a child subtree has been
searched, the module it created is forbidden for its right siblings.
"""

import time
from collections.abc import Callable
from dataclasses import dataclass, field

from powergraph.beam import greedy, improving_merges
from powergraph.core import (
    Configuration,
    DirectedGraph,
    RepresentativeEdgeSet,
    boundary_crossings,
    dissolve_module,
    representative_edges,
)
from powergraph.errors import PreconditionError
from powergraph.logger import get_logger
from powergraph.state import SearchState

log = get_logger(__name__)

Candidate = tuple[int, int, int]


@dataclass(frozen=True, order=True)
class Objective:
    """Lexicographic cost of a configuration.

    Crossings and module count stay zero unless ties are broken on them.
    """

    edges: int
    crossings: int = 0
    modules: int = 0

    @classmethod
    def of(
        cls,
        c: Configuration,
        r: RepresentativeEdgeSet,
        tie_break: bool = False,
    ) -> "Objective":
        if not tie_break:
            return cls(len(r))
        return cls(len(r), boundary_crossings(c, r), c.module_count)


def default_module_limit(g: DirectedGraph) -> int:
    """Largest number of modules an optimal configuration can hold.

    A module spanning every vertex only pays off through a self-edge, which
    needs a complete graph; otherwise at most ``n - 2`` modules are useful.
    """
    if g.n >= 2 and g.is_complete:
        return g.n - 1
    return max(g.n - 2, 0)


def candidate_binary_merges(s: SearchState) -> list[Candidate]:
    """Improving merges as ``(reduction, m, n)``, largest reduction first.

    Ties are ordered by the smallest leaves of ``m`` and ``n``.
    """
    c = s.configuration
    candidates = [(s.edge_count - e, m, n) for e, m, n in improving_merges(s)]
    candidates.sort(
        key=lambda t: (
            -t[0], c.modules[t[1]].min_leaf, c.modules[t[2]].min_leaf
        )
    )
    return candidates


def lower_bound(
    s: SearchState,
    module_limit: int,
    candidates: list[Candidate] | None = None,
) -> int:
    """Fewest edges reachable below ``s`` within ``module_limit`` modules.

    Subtracts the ``module_limit - m`` largest candidate reductions from the
    current edge count, ``m`` being the number of modules of ``s``.
    """
    if candidates is None:
        candidates = candidate_binary_merges(s)
    slots = max(module_limit - s.module_count, 0)
    reductions = sorted((r for r, _, _ in candidates), reverse=True)
    return max(s.edge_count - sum(reductions[:slots]), 0)


def strip_redundant_modules(
    c: Configuration, tie_break: bool = False
) -> Configuration:
    """Dissolve modules whose removal does not worsen the objective."""
    r = representative_edges(c)
    current = Objective.of(c, r, tie_break)
    changed = True
    while changed:
        changed = False
        for module_id in sorted(c.nontrivial(), reverse=True):
            reduced = dissolve_module(c, module_id)
            reduced_r = representative_edges(reduced)
            candidate = Objective.of(reduced, reduced_r, tie_break)
            if candidate <= current:
                log.debug(f"dropping redundant module {module_id}")
                c, current = reduced, candidate
                changed = True
                break
    return c


@dataclass
class OptimalResult:
    """Outcome of a branch-and-bound run."""

    configuration: Configuration
    edges: RepresentativeEdgeSet
    objective: Objective
    proven: bool
    nodes: int
    pruned: int
    elapsed: float = field(default=0.0)


class SearchTimeout(Exception):
    """Raised inside the search when the time budget is spent."""


class BranchAndBound:
    """Depth-first branch and bound over binary module additions.

    Parameters
    ----------
    g : DirectedGraph
        Flat input graph.
    tie_break : bool
        Minimise ``(edges, crossings, modules)`` instead of edges alone.
    module_limit : int, optional
        Depth cap; defaults to :func:`default_module_limit`.
    time_limit : float, optional
        Wall-clock budget in seconds, shared by the incumbent descent and
        the search.
    forbid_siblings : bool
        Forbid modules of searched children in their right siblings.
    prune : bool
        Cut nodes by the lower bound.
    progress : callable, optional
        Called as ``progress(nodes, objective, depth)`` every
        ``report_every`` nodes.
    report_every : int
        Node cadence of the progress callback.
    on_prune : callable, optional
        Called as ``on_prune(state, forbidden, bound)`` for every cut node.
    """

    def __init__(
        self,
        g: DirectedGraph,
        tie_break: bool = False,
        module_limit: int | None = None,
        time_limit: float | None = None,
        forbid_siblings: bool = True,
        prune: bool = True,
        progress: Callable[[int, Objective, int], None] | None = None,
        report_every: int = 5000,
        on_prune: Callable[[SearchState, frozenset, int], None] | None = None,
    ) -> None:
        if module_limit is not None and module_limit < 0:
            msg = f"module limit must be non-negative, got {module_limit}"
            raise PreconditionError(msg)
        if report_every < 1:
            msg = f"report cadence must be positive, got {report_every}"
            raise PreconditionError(msg)
        self.graph = g
        self.tie_break = tie_break
        self.module_limit = (
            default_module_limit(g) if module_limit is None else module_limit
        )
        self.time_limit = time_limit
        self.forbid_siblings = forbid_siblings
        self.prune = prune
        self.progress = progress
        self.report_every = report_every
        self.on_prune = on_prune

        self.nodes = 0
        self.pruned = 0
        self.incumbent: SearchState | None = None
        self.best: Objective | None = None
        self._deadline: float | None = None

    def _evaluate(self, state: SearchState) -> tuple[SearchState, Objective]:
        if not self.tie_break:
            return state, Objective(state.edge_count)
        stripped = SearchState.from_configuration(
            strip_redundant_modules(state.configuration, tie_break=True)
        )
        objective = Objective.of(
            stripped.configuration,
            stripped.representative_edges(),
            tie_break=True,
        )
        return stripped, objective

    def _offer(self, state: SearchState) -> None:
        if self.best is not None and state.edge_count > self.best.edges:
            return
        if (
            self.best is not None
            and not self.tie_break
            and state.edge_count == self.best.edges
        ):
            return
        kept, objective = self._evaluate(state)
        if self.best is None or objective < self.best:
            self.incumbent, self.best = kept, objective
            log.debug(f"new incumbent {objective} at node {self.nodes}")

    def _cut(self, bound: int) -> bool:
        if not self.prune or self.best is None:
            return False
        if self.tie_break:
            return bound > self.best.edges
        return bound >= self.best.edges

    def _visit(self, state: SearchState, forbidden: frozenset[str]) -> None:
        self.nodes += 1
        if self._deadline is not None and time.monotonic() >= self._deadline:
            raise SearchTimeout
        if self.progress is not None and self.nodes % self.report_every == 0:
            self.progress(self.nodes, self.best, state.module_count)

        self._offer(state)

        candidates = [
            (r, m, n)
            for r, m, n in candidate_binary_merges(state)
            if state.merged_signature(m, n) not in forbidden
        ]
        bound = lower_bound(state, self.module_limit, candidates)
        if self._cut(bound):
            self.pruned += 1
            if self.on_prune is not None:
                self.on_prune(state, forbidden, bound)
            return

        if state.module_count >= self.module_limit:
            return
        excluded = set(forbidden)
        for _, m, n in candidates:
            self._visit(state.add((m, n)), frozenset(excluded))
            if self.forbid_siblings:
                excluded.add(state.merged_signature(m, n))

    def search_from(
        self,
        state: SearchState,
        forbidden: frozenset[str] = frozenset(),
    ) -> SearchState:
        """Best state of the subtree below ``state``, found without an
        incumbent from outside the subtree."""
        saved = self.incumbent, self.best
        self.incumbent, self.best = None, None
        try:
            self._visit(state, frozenset(forbidden))
            found = self.incumbent
        finally:
            self.incumbent, self.best = saved
        return found

    def solve(
        self, incumbent_seed: Configuration | None = None
    ) -> OptimalResult:
        """Run the search and return the best configuration found.

        Parameters
        ----------
        incumbent_seed : Configuration, optional
            Starting incumbent; a best-first descent is used when omitted.
            The descent counts against the time limit.
        """
        start = time.monotonic()
        self._deadline = (
            None if self.time_limit is None else start + self.time_limit
        )
        root = SearchState.flat(self.graph)
        if incumbent_seed is None:
            seed = greedy(root, self._deadline)
        else:
            seed = SearchState.from_configuration(incumbent_seed)
        self._offer(seed)
        log.info(
            f"optimal search on {self.graph.n} vertices, "
            f"{self.graph.m} edges, "
            f"incumbent {self.best.edges} edges, module limit "
            f"{self.module_limit}"
        )

        proven = True
        try:
            self._visit(root, frozenset())
        except SearchTimeout:
            proven = False
            log.warning(
                f"time limit reached after {self.nodes} nodes; "
                "returning best configuration found so far"
            )

        configuration = strip_redundant_modules(
            self.incumbent.configuration, self.tie_break
        )
        edges = representative_edges(configuration)
        elapsed = time.monotonic() - start
        log.info(
            f"optimal search finished: {len(edges)} edges, "
            f"{self.nodes} nodes, "
            f"{self.pruned} pruned, {elapsed:.2f}s"
        )
        return OptimalResult(
            configuration,
            edges,
            Objective.of(configuration, edges, self.tie_break),
            proven,
            self.nodes,
            self.pruned,
            elapsed,
        )


def optimal_search(
    g: DirectedGraph,
    tie_break: bool = False,
    incumbent_seed: Configuration | None = None,
    **options,
) -> Configuration:
    """Configuration with the fewest representative edges.

    With ``tie_break`` the lexicographic objective ``(edges, crossings,
    modules)`` is minimised. Further keyword options are passed to
    :class:`BranchAndBound`.
    """
    search = BranchAndBound(g, tie_break=tie_break, **options)
    return search.solve(incumbent_seed).configuration
