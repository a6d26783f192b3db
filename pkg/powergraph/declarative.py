"""
Declarative models of the minimum power graph problem for external solvers.

``emit_ilp`` builds the integer program with PuLP and returns it in LP file
format; ``emit_cp`` writes a MiniZinc model with the graph embedded. Neither
model is solved here.
"""

import tempfile
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import pulp

from powergraph.core import DirectedGraph
from powergraph.errors import PreconditionError
from powergraph.logger import get_logger

log = get_logger(__name__)

MINIZINC_DIALECT = "MiniZinc 2.8"


@dataclass
class IlpModel:
    """Integer program maximising the number of flat edges saved.

    Attributes
    ----------
    problem : pulp.LpProblem
        The model, objective and constraints included.
    variables : dict
        Variable family name to a mapping of index tuples to variables.
    family_counts : dict
        Number of rows emitted for each constraint family 1-27.
    """

    n: int
    extra_modules: int
    problem: pulp.LpProblem
    variables: dict[str, dict[tuple, pulp.LpVariable]] = field(
        default_factory=dict
    )
    family_counts: dict[int, int] = field(default_factory=dict)

    @property
    def module_count(self) -> int:
        return self.n + self.extra_modules

    def add(self, family: int, constraint, *index: int) -> None:
        name = "_".join(str(i) for i in (f"c{family}", *index))
        self.problem += constraint, name
        self.family_counts[family] = self.family_counts.get(family, 0) + 1

    def to_lp(self) -> str:
        """Model text in LP file format."""
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder) / "model.lp"
            self.problem.writeLP(str(path))
            text = path.read_text()
        header = (
            f"\\ power graph edge savings, {self.n} vertices, "
            f"{self.extra_modules} extra modules\n"
            "\\ edges = |E| - objective at the optimum\n"
            f"\\ modules 0..{self.n - 1} are pinned to singletons by c26/c27, "
            "so c1-c25 also range over them\n"
        )
        return header + text


def _binary(name: str, *index: int) -> pulp.LpVariable:
    return pulp.LpVariable(
        "_".join(str(i) for i in (name, *index)), cat=pulp.LpBinary
    )


def build_ilp_model(
    g: DirectedGraph, extra_modules: int | None = None
) -> IlpModel:
    """Build the edge-savings integer program.

    Parameters
    ----------
    g : DirectedGraph
        Flat input graph with ``n`` vertices.
    extra_modules : int, optional
        Number ``m`` of non-singleton modules; defaults to ``n - 2``.

    Notes
    -----
    Vertices are ``V = 0..n-1`` and modules ``M = 0..n+m-1``. ``mInd`` is
    tied to ``ind[v, m2]`` and the first ``ind`` row to ``ind[v, m1]``, as
    the variable definitions require. Families 18-21 range over all module
    pairs, so ``bic`` is declared on the diagonal as well.
    """
    n = g.n
    if extra_modules is None:
        extra_modules = max(n - 2, 0)
    if extra_modules < 0:
        msg = f"extra module count must be non-negative, got {extra_modules}"
        raise PreconditionError(msg)
    nm = n + extra_modules
    V = range(n)  # noqa: N806
    M = range(nm)  # noqa: N806
    pairs = [(a, b) for a, b in product(M, M) if a != b]

    def e(u: int, v: int) -> int:
        return int((u, v) in g.edges)

    model = IlpModel(
        n, extra_modules, pulp.LpProblem("powergraph_ilp", pulp.LpMaximize)
    )
    sav = {
        (a, b): pulp.LpVariable(
            f"sav_{a}_{b}", lowBound=0, upBound=n * n, cat=pulp.LpInteger
        )
        for a, b in pairs
    }
    s_mod = {(a, b): _binary("sMod", a, b) for a, b in pairs}
    mod = {(v, m): _binary("mod", v, m) for v in V for m in M}
    ind = {(v, m): _binary("ind", v, m) for v in V for m in M}
    bic = {(a, b): _binary("bic", a, b) for a in M for b in M}
    dis = {(a, b): _binary("dis", a, b) for a, b in pairs}
    sub = {(a, b): _binary("sub", a, b) for a, b in pairs}
    m_ind = {(v, a, b): _binary("mInd", v, a, b) for v in V for a, b in pairs}
    v_mod = {(v, a, b): _binary("vMod", v, a, b) for v in V for a, b in pairs}
    s_ver = {
        (v1, v2, a, b): _binary("sVer", v1, v2, a, b)
        for v1 in V
        for v2 in V
        for a in M
        for b in M
    }
    model.variables = {
        "sav": sav,
        "sMod": s_mod,
        "mod": mod,
        "ind": ind,
        "bic": bic,
        "dis": dis,
        "sub": sub,
        "mInd": m_ind,
        "vMod": v_mod,
        "sVer": s_ver,
    }

    model.problem += pulp.lpSum(sav[p] - s_mod[p] for p in pairs), "savings"

    def missing(v: int, m: int) -> pulp.LpAffineExpression:
        return pulp.lpSum(
            (e(v, u) - 1) * mod[u, m] for u in V if e(v, u) != 1
        )

    # ind[v, m]: v has an edge to every member of m
    for v, m in product(V, M):
        model.add(1, missing(v, m) >= n * (ind[v, m] - 1), v, m)
    for v, m in product(V, M):
        model.add(2, missing(v, m) <= ind[v, m] - 1, v, m)
    # mInd[v, m1, m2]: v in m1 and ind[v, m2]
    for v, (a, b) in product(V, pairs):
        model.add(3, m_ind[v, a, b] <= mod[v, a], v, a, b)
    for v, (a, b) in product(V, pairs):
        model.add(4, m_ind[v, a, b] <= ind[v, b], v, a, b)
    for v, (a, b) in product(V, pairs):
        model.add(5, m_ind[v, a, b] >= mod[v, a] + ind[v, b] - 1, v, a, b)
    # bic[m1, m2]: every member of m1 points to every member of m2
    for a, b in pairs:
        gap = pulp.lpSum(m_ind[v, a, b] - mod[v, a] for v in V)
        model.add(6, gap >= n * (bic[a, b] - 1), a, b)
    for a, b in pairs:
        gap = pulp.lpSum(m_ind[v, a, b] - mod[v, a] for v in V)
        model.add(7, gap <= bic[a, b] - 1, a, b)
    # vMod[v, m1, m2]: v in both modules
    for v, (a, b) in product(V, pairs):
        model.add(8, v_mod[v, a, b] <= mod[v, a], v, a, b)
    for v, (a, b) in product(V, pairs):
        model.add(9, v_mod[v, a, b] <= mod[v, b], v, a, b)
    for v, (a, b) in product(V, pairs):
        model.add(10, v_mod[v, a, b] >= mod[v, a] + mod[v, b] - 1, v, a, b)
    # dis[m1, m2]: disjoint modules
    for a, b in pairs:
        shared = pulp.lpSum(v_mod[v, a, b] for v in V)
        model.add(11, shared <= n * (1 - dis[a, b]), a, b)
    for a, b in pairs:
        shared = pulp.lpSum(v_mod[v, a, b] for v in V)
        model.add(12, shared >= 1 - dis[a, b], a, b)
    for a, b in pairs:
        model.add(13, dis[a, b] == dis[b, a], a, b)
    # sub[m1, m2]: m1 is a proper subset of m2
    for a, b in pairs:
        gap = pulp.lpSum(v_mod[v, a, b] - mod[v, a] for v in V)
        model.add(14, gap >= n * (sub[a, b] - 1), a, b)
    for a, b in pairs:
        gap = pulp.lpSum(v_mod[v, a, b] - mod[v, a] for v in V)
        model.add(15, gap <= sub[a, b] - 1, a, b)
    for a, b in pairs:
        shared = pulp.lpSum(v_mod[v, a, b] for v in V)
        size = pulp.lpSum(mod[v, b] for v in V)
        model.add(16, shared <= size - sub[a, b], a, b)
    # laminarity
    for a, b in pairs:
        if a < b:
            model.add(17, dis[a, b] + sub[a, b] + sub[b, a] == 1, a, b)
    # sVer[v1, v2, m1, m2]: edge (v1, v2) saved by the module pair
    for v1, v2, a, b in product(V, V, M, M):
        model.add(18, s_ver[v1, v2, a, b] <= e(v1, v2), v1, v2, a, b)
    for v1, v2, a, b in product(V, V, M, M):
        model.add(19, s_ver[v1, v2, a, b] <= mod[v1, a], v1, v2, a, b)
    for v1, v2, a, b in product(V, V, M, M):
        model.add(20, s_ver[v1, v2, a, b] <= mod[v2, b], v1, v2, a, b)
    for v1, v2, a, b in product(V, V, M, M):
        model.add(21, s_ver[v1, v2, a, b] <= bic[a, b], v1, v2, a, b)
    # no flat edge is saved twice
    for v1, v2 in product(V, V):
        once = pulp.lpSum(s_ver[v1, v2, a, b] for a, b in pairs)
        model.add(22, once <= 1, v1, v2)
    # sav and sMod
    for a, b in pairs:
        saved = pulp.lpSum(
            s_ver[v1, v2, a, b] for v1 in V for v2 in V if v1 != v2
        )
        model.add(23, sav[a, b] <= saved, a, b)
    for a, b in pairs:
        model.add(24, s_mod[a, b] <= sav[a, b], a, b)
    for a, b in pairs:
        model.add(25, sav[a, b] <= n * n * s_mod[a, b], a, b)
    # singleton modules
    for m in V:
        model.add(26, pulp.lpSum(mod[v, m] for v in V) == 1, m)
    for m in V:
        model.add(27, mod[m, m] == 1, m)

    log.debug(
        f"ilp model with {len(model.problem.constraints)} rows over "
        f"{nm} modules"
    )
    return model


def emit_ilp(g: DirectedGraph, extra_modules: int | None = None) -> str:
    """LP file text of the edge-savings integer program."""
    return build_ilp_model(g, extra_modules).to_lp()


def expected_family_counts(n: int, extra_modules: int) -> dict[int, int]:
    """Rows per constraint family implied by the quantifier ranges."""
    nm = n + extra_modules
    ordered = nm * (nm - 1)
    counts = {1: n * nm, 2: n * nm}
    counts.update({f: n * ordered for f in (3, 4, 5, 8, 9, 10)})
    counts.update({f: ordered for f in (6, 7, 11, 12, 13, 14, 15, 16)})
    counts[17] = ordered // 2
    counts.update({f: n * n * nm * nm for f in (18, 19, 20, 21)})
    counts[22] = n * n
    counts.update({f: ordered for f in (23, 24, 25)})
    counts.update({26: n, 27: n})
    return counts


def twin_vertices(g: DirectedGraph) -> list[tuple[int, int]]:
    """Vertex pairs with identical in- and out-neighbourhoods."""
    out, inc = g.out_masks, g.in_masks
    twins = []
    for u in range(g.n):
        for v in range(u + 1, g.n):
            pair = (1 << u) | (1 << v)
            if (
                out[u] & ~pair == out[v] & ~pair
                and inc[u] & ~pair == inc[v] & ~pair
                and bool(out[u] >> v & 1) == bool(out[v] >> u & 1)
            ):
                twins.append((u, v))
    return twins


def _edge_rows(g: DirectedGraph) -> str:
    rows = []
    for u in range(g.n):
        row = ", ".join(
            "true" if g.out_masks[u] >> v & 1 else "false" for v in range(g.n)
        )
        rows.append(f"    {row}")
    return ",\n".join(rows)


def emit_cp(
    g: DirectedGraph,
    module_limit: int | None = None,
    upper_bound: int | None = None,
    lex: bool = True,
    twins: bool = True,
    scalar: bool = True,
    support: bool = True,
) -> str:
    """MiniZinc model minimising the power graph edge count.

    Parameters
    ----------
    g : DirectedGraph
        Flat input graph.
    module_limit : int, optional
        Number of non-trivial module slots; defaults to ``n - 2``.
    upper_bound : int, optional
        Upper bound on the objective; ``n * n`` (at least 1) when omitted.
    lex, twins, scalar, support : bool
        Include the lexicographic module ordering, the twin-vertex rule, the
        scalar-product containment and the edge-support requirement.
    """
    nv = g.n
    if module_limit is None:
        module_limit = max(nv - 2, 0)
    if module_limit < 0:
        msg = f"module limit must be non-negative, got {module_limit}"
        raise PreconditionError(msg)
    if upper_bound is None:
        upper_bound = max(nv * nv, 1)
    if upper_bound <= 0:
        msg = f"upper bound must be positive, got {upper_bound}"
        raise PreconditionError(msg)

    lines = [
        f"% {MINIZINC_DIALECT}",
        f"% minimum power graph of a directed graph, {nv} vertices, "
        f"{g.m} edges, {module_limit} module slots",
        'include "globals.mzn";',
        "",
        f"int: nv = {nv};",
        f"int: ml = {module_limit};",
        "int: nm = nv + ml;",
        "set of int: V = 1..nv;",
        "set of int: MOD = 1..nm;",
    ]
    if nv:
        lines.append("array[V, V] of bool: edge = array2d(V, V, [")
        lines.append(_edge_rows(g))
        lines.append("]);")
    else:
        lines.append("array[V, V] of bool: edge = array2d(V, V, []);")
    lines += [
        "",
        "% modules anm+1..nm are dummy",
        "var nv..nm: anm;",
        "array[V, MOD] of var bool: module;",
        "array[MOD, MOD] of var bool: mcontains;",
        "array[MOD, MOD] of var bool: possible;",
        "array[MOD, MOD] of var bool: actual;",
        "",
        "% module v is the trivial module {v}",
        "constraint forall(m in V, v in V)(module[v, m] = (v = m));",
        "% real modules hold at least two vertices, dummy modules none",
        "constraint forall(m in nv+1..nm)(",
        "    (m <= anm -> sum(v in V)(bool2int(module[v, m])) >= 2)",
        "    /\\ (m > anm -> forall(v in V)(not module[v, m])));",
        "% real modules are pairwise distinct",
        "constraint forall(m, n in nv+1..nm where m < n)(",
        "    n <= anm -> exists(v in V)(module[v, m] != module[v, n]));",
        "% mcontains[m, n] holds if module m contains module n",
        "constraint forall(m, n in MOD)(",
        "    mcontains[m, n] <->",
        "        forall(v in V)(module[v, n] -> module[v, m]));",
        "% modules form a hierarchy",
        "constraint forall(m, n in MOD where m < n)(",
        "    mcontains[m, n] \\/ mcontains[n, m]",
        "    \\/ forall(v in V)(not (module[v, m] /\\ module[v, n])));",
        "",
        "% possible edge: all member pairs are edges",
        "% and m = n or m, n disjoint",
        "constraint forall(m, n in MOD)(",
        "    possible[m, n] <-> (m <= anm /\\ n <= anm",
        "        /\\ forall(u, v in V where u != v)(",
        "            (module[u, m] /\\ module[v, n]) -> edge[u, v])",
        "        /\\ if m = n then m > nv",
        "           else forall(v in V)(not (module[v, m] /\\ module[v, n]))",
        "           endif));",
        "% actual edge: possible and not dominated by another possible edge",
        "constraint forall(m, n in MOD)(",
        "    actual[m, n] <-> (possible[m, n]",
        "        /\\ not exists(p, q in MOD where p != m \\/ q != n)(",
        "            possible[p, q] /\\ mcontains[p, m]",
        "            /\\ mcontains[q, n])));",
        "",
        "var 0..nv*nv: objective =",
        "    sum(m, n in MOD)(bool2int(actual[m, n]));",
        f"constraint objective <= {upper_bound};",
    ]
    if lex:
        lines += [
            "",
            "% real and dummy modules in decreasing lexicographic order",
            "constraint forall(m in nv+1..nm-1)(",
            "    lex_greatereq([module[v, m] | v in V],"
            " [module[v, m + 1] | v in V]));",
        ]
    if twins:
        pairs = twin_vertices(g)
        if pairs:
            lines += [
                "",
                "% vertices with the same in- and out-edges share modules",
            ]
            for u, v in pairs:
                lines.append(
                    f"constraint forall(m in nv+1..nm)"
                    f"(module[{u + 1}, m] = module[{v + 1}, m]);"
                )
    if scalar:
        lines += [
            "",
            "% scalar product sp[m, n] equals |m| iff m is a subset of n",
            "array[MOD, MOD] of var 0..nv: sp;",
            "constraint forall(m, n in MOD)(",
            "    sp[m, n] =",
            "        sum(v in V)(bool2int(module[v, m] /\\ module[v, n])));",
            "constraint forall(m, n in MOD)(",
            "    mcontains[n, m] <->",
            "        sp[m, n] = sum(v in V)(bool2int(module[v, m])));",
        ]
    if support:
        lines += [
            "",
            "% every real module has at least one potential edge",
            "constraint forall(m in nv+1..nm)(m <= anm -> (",
            "    exists(u in V)(not module[u, m]",
            "        /\\ forall(v in V)(module[v, m] -> edge[u, v]))",
            "    \\/ exists(u in V)(not module[u, m]",
            "        /\\ forall(v in V)(module[v, m] -> edge[v, u]))",
            "    \\/ forall(u, v in V where u != v)(",
            "        (module[u, m] /\\ module[v, m]) -> edge[u, v])));",
        ]
    lines += [
        "",
        "solve minimize objective;",
        "",
        'output ["edges = \\(objective)\\n", "modules = \\(anm - nv)\\n"];',
        "",
    ]
    return "\n".join(lines)
