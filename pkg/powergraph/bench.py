"""
Benchmark harness comparing the decomposition methods on generated graphs.

Methods are named ``jaccard``, ``beam_<k>``, ``optimal`` (edge count only),
``optimal_tb`` (ties broken on crossings and module count) and
``exhaustive``. Every (method, size, seed) cell generates its graph from the
seed, so cells are independent and run in a process pool.
"""

import csv
import io
import multiprocessing
import re
import time
from collections.abc import Iterable
from dataclasses import asdict, dataclass, fields
from functools import partial
from pathlib import Path

from powergraph.beam import beam_search
from powergraph.core import (
    Configuration,
    DirectedGraph,
    boundary_crossings,
    representative_edges,
)
from powergraph.errors import PreconditionError, SizeLimitError
from powergraph.generator import generate
from powergraph.jaccard import jaccard_decompose
from powergraph.logger import get_logger, get_progress
from powergraph.optimal import optimal_search
from powergraph.oracle import exhaustive_search

log = get_logger(__name__)

BEAM_METHOD = re.compile(r"beam_(\d+)")
FIXED_METHODS = ("jaccard", "optimal", "optimal_tb", "exhaustive")


@dataclass(frozen=True)
class BenchRecord:
    """One benchmark row; ``ms`` is the solver wall time in milliseconds."""

    method: str
    n: int
    m_edges: int
    r_edges: int
    modules: int
    crossings: int
    ms: float
    seed: int


CSV_COLUMNS = [f.name for f in fields(BenchRecord)]


def check_method(method: str) -> str:
    if method in FIXED_METHODS:
        return method
    match = BEAM_METHOD.fullmatch(method)
    if match is None or int(match.group(1)) < 1:
        msg = (
            f"unknown method {method!r}; expected one of "
            f"{', '.join(FIXED_METHODS)} or beam_<k> with k >= 1"
        )
        raise PreconditionError(msg)
    return method


def solve(method: str, g: DirectedGraph) -> Configuration:
    """Configuration computed by a named method."""
    check_method(method)
    if method == "jaccard":
        return jaccard_decompose(g)
    if method == "optimal":
        return optimal_search(g)
    if method == "optimal_tb":
        return optimal_search(g, tie_break=True)
    if method == "exhaustive":
        return exhaustive_search(g)
    k = int(BEAM_METHOD.fullmatch(method).group(1))
    return beam_search(g, k)


def run_cell(
    cell: tuple[str, int, int], gen_params: dict | None = None
) -> BenchRecord:
    """Generate the graph of one cell and time the method on it."""
    method, n, seed = cell
    g = generate(n, seed, **(gen_params or {}))
    start = time.perf_counter()
    c = solve(method, g)
    elapsed = (time.perf_counter() - start) * 1000.0
    r = representative_edges(c)
    return BenchRecord(
        method,
        n,
        g.m,
        len(r),
        c.module_count,
        boundary_crossings(c, r),
        round(elapsed, 3),
        seed,
    )


def run_benchmark(
    sizes: Iterable[int],
    seeds: int | Iterable[int],
    methods: Iterable[str],
    workers: int = 1,
    gen_params: dict | None = None,
    optimal_max_n: int = 10,
    exhaustive_max_n: int = 8,
    show_progress: bool = False,
) -> list[BenchRecord]:
    """Run every method on every generated graph.

    Parameters
    ----------
    sizes : iterable of int
        Vertex counts.
    seeds : int or iterable of int
        Seeds, or a count ``K`` standing for seeds ``0..K-1``.
    methods : iterable of str
        Method names.
    workers : int
        Worker processes; cells run in-process when 1.

    Returns
    -------
    list of BenchRecord
        Sorted by method, size and seed.

    Raises
    ------
    SizeLimitError
        If an exact method is requested for a size above its cap.
    """
    sizes = sorted(set(sizes))
    seeds = range(seeds) if isinstance(seeds, int) else sorted(set(seeds))
    methods = [check_method(m) for m in dict.fromkeys(methods)]
    caps = {
        "optimal": optimal_max_n,
        "optimal_tb": optimal_max_n,
        "exhaustive": exhaustive_max_n,
    }
    for method in methods:
        cap = caps.get(method)
        if cap is not None and sizes and sizes[-1] > cap:
            msg = f"{method} is limited to {cap} vertices, got {sizes[-1]}"
            raise SizeLimitError(msg)

    cells = [(m, n, s) for m in methods for n in sizes for s in seeds]
    msg = f"Benchmarking {len(cells)} cells on {workers} worker(s)"
    log.info(msg)
    runner = partial(run_cell, gen_params=gen_params)
    records = []
    with get_progress(disable=not show_progress) as pbar:
        task = pbar.add_task("Benchmark", total=len(cells))
        if workers > 1 and len(cells) > 1:
            pool = multiprocessing.Pool(workers)
            try:
                for record in pool.imap_unordered(runner, cells):
                    records.append(record)
                    pbar.update(task, advance=1)
            finally:
                pool.terminate()
        else:
            for cell in cells:
                records.append(runner(cell))
                pbar.update(task, advance=1)

    records.sort(key=lambda r: (r.method, r.n, r.seed))
    return records


def format_csv(records: Iterable[BenchRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(asdict(record))
    return buffer.getvalue()


def write_csv(records: Iterable[BenchRecord], path: Path | str) -> None:
    Path(path).write_text(format_csv(records))
