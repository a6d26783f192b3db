import time
from contextlib import contextmanager
from enum import Enum
from pathlib import Path

import typer

from powergraph.beam import beam_search
from powergraph.bench import format_csv, run_benchmark, write_csv
from powergraph.config import RunConfig
from powergraph.core import (
    Configuration,
    boundary_crossings,
    representative_edges,
)
from powergraph.datahandler import (
    PowerGraphDocument,
    format_edge_list,
    read_document,
    read_edge_list,
    to_dot,
    to_json,
)
from powergraph.declarative import emit_cp, emit_ilp
from powergraph.errors import PowerGraphError
from powergraph.generator import GenSpec, bollobas_generate
from powergraph.jaccard import jaccard_decompose
from powergraph.logger import configure_logging, get_logger
from powergraph.optimal import BranchAndBound
from powergraph.workers import get_worker_count

app = typer.Typer(pretty_exceptions_show_locals=False)
log = get_logger(__name__)

EXIT_INVALID = 1
EXIT_VERIFICATION = 2
EXIT_TIME_LIMIT = 3


class Method(str, Enum):
    jaccard = "jaccard"
    beam = "beam"
    optimal = "optimal"


@contextmanager
def handle_errors():
    """Turn library and file errors into a logged message and exit code 1."""
    try:
        yield
    except (PowerGraphError, OSError) as e:
        log.error(str(e))
        raise typer.Exit(EXIT_INVALID) from e


def emit(text: str, output: Path | None) -> None:
    if output is None:
        typer.echo(text, nl=False)
    else:
        output.write_text(text)
        msg = f"Wrote {output}"
        log.info(msg)


def get_config(ctx: typer.Context) -> RunConfig:
    return ctx.obj


@app.callback()
def main(
    ctx: typer.Context,
    verbosity: int = typer.Option(
        0,
        "-v",
        "--verbose",
        help="Verbosity level, e.g. -v or -vv.",
        count=True,
    ),
    log_to_file: bool = typer.Option(
        False,
        "--save-logs",
        help="Store logs to file.",
    ),
    config: Path | None = typer.Option(
        None,
        "--config",
        help="Configuration file; searched for in the working directory "
        "when omitted.",
    ),
) -> None:
    """Lossless power graph decomposition of directed graphs."""
    configure_logging(verbosity, log_to_file)
    with handle_errors():
        ctx.obj = RunConfig(file=config) if config else RunConfig(".")


@app.command()
def compress(
    ctx: typer.Context,
    input_path: Path = typer.Argument(..., help="Edge-list file."),
    method: Method = typer.Option(Method.beam, "--method"),
    k: int | None = typer.Option(None, "-k", help="Beam size."),
    tie_break: bool | None = typer.Option(
        None,
        "--tie-break/--no-tie-break",
        help="Break edge-count ties on crossings, then module count.",
    ),
    time_limit: float | None = typer.Option(
        None, "--time-limit", help="Optimal search budget in seconds."
    ),
    module_limit: int | None = typer.Option(
        None, "--module-limit", help="Override the optimal search depth."
    ),
    output: Path | None = typer.Option(None, "-o", "--output"),
    dot: Path | None = typer.Option(None, "--dot", help="Graphviz output."),
) -> None:
    """Compute a power graph and write it as JSON."""
    cfg = get_config(ctx)
    proven = None
    with handle_errors():
        g = read_edge_list(input_path)
        parameters = {}
        start = time.perf_counter()
        if method is Method.jaccard:
            c = jaccard_decompose(g)
        elif method is Method.beam:
            parameters["k"] = k if k is not None else cfg.beam["k"]
            c = beam_search(g, parameters["k"])
        else:
            c, proven, parameters = run_optimal(
                cfg, g, tie_break, time_limit, module_limit
            )
        elapsed = time.perf_counter() - start

        r = representative_edges(c)
        metadata = {
            "method": method.value,
            "parameters": parameters,
            "input_edges": g.m,
            "edge_count": len(r),
            "crossing_count": boundary_crossings(c, r),
            "module_count": c.module_count,
            "wall_time": round(elapsed, 6),
        }
        if proven is not None:
            metadata["optimality_proven"] = proven
        msg = (
            f"{method.value}: {g.m} edges -> {len(r)} representative edges, "
            f"{c.module_count} modules in {elapsed:.3f}s"
        )
        log.info(msg)
        doc = PowerGraphDocument.from_solution(c, r, metadata)
        emit(to_json(doc), output)
        if dot is not None:
            dot.write_text(to_dot(doc))
    if proven is False:
        raise typer.Exit(EXIT_TIME_LIMIT)


def run_optimal(
    cfg: RunConfig,
    g,
    tie_break: bool | None,
    time_limit: float | None,
    module_limit: int | None,
) -> tuple[Configuration, bool, dict]:
    tie_break = cfg.optimal["tie_break"] if tie_break is None else tie_break
    if time_limit is None:
        time_limit = cfg.optimal["time_limit"]

    def report(nodes, objective, depth):
        log.info(f"{nodes} nodes, incumbent {objective}, depth {depth}")

    search = BranchAndBound(
        g,
        tie_break=tie_break,
        module_limit=module_limit,
        time_limit=time_limit,
        forbid_siblings=cfg.optimal["forbid_siblings"],
        progress=report,
        report_every=cfg.optimal["report_every"],
    )
    result = search.solve()
    parameters = {
        "tie_break": tie_break,
        "time_limit": time_limit,
        "module_limit": search.module_limit,
        "nodes": result.nodes,
    }
    return result.configuration, result.proven, parameters


@app.command()
def gen(
    ctx: typer.Context,
    n: int = typer.Option(..., "--n", help="Vertex count."),
    seed: int = typer.Option(0, "--seed"),
    edges: int | None = typer.Option(
        None, "--edges", help="Edge count; 1.5 n^1.5 by default."
    ),
    output: Path | None = typer.Option(None, "-o", "--output"),
) -> None:
    """Generate a random scale-free directed graph."""
    cfg = get_config(ctx)
    with handle_errors():
        params = dict(cfg.generator)
        if edges is None:
            spec = GenSpec.for_size(n, seed, **params)
        else:
            spec = GenSpec(n, seed, target_edges=edges, **params)
        g = bollobas_generate(spec)
        emit(f"# seed {seed}\n" + format_edge_list(g), output)


@app.command("emit-ilp")
def emit_ilp_command(
    input_path: Path = typer.Argument(..., help="Edge-list file."),
    extra_modules: int | None = typer.Option(
        None, "-m", "--extra-modules", help="Non-trivial modules; n-2 default."
    ),
    output: Path | None = typer.Option(None, "-o", "--output"),
) -> None:
    """Write the edge-savings integer program in LP format."""
    with handle_errors():
        g = read_edge_list(input_path)
        emit(emit_ilp(g, extra_modules), output)


@app.command("emit-cp")
def emit_cp_command(
    input_path: Path = typer.Argument(..., help="Edge-list file."),
    module_limit: int | None = typer.Option(None, "--module-limit"),
    upper_bound: int | None = typer.Option(None, "--upper-bound"),
    lex: bool = typer.Option(True, "--lex/--no-lex"),
    twins: bool = typer.Option(True, "--twins/--no-twins"),
    scalar: bool = typer.Option(True, "--scalar/--no-scalar"),
    support: bool = typer.Option(True, "--support/--no-support"),
    output: Path | None = typer.Option(None, "-o", "--output"),
) -> None:
    """Write the MiniZinc model of the minimum power graph problem."""
    with handle_errors():
        g = read_edge_list(input_path)
        text = emit_cp(
            g,
            module_limit,
            upper_bound,
            lex=lex,
            twins=twins,
            scalar=scalar,
            support=support,
        )
        emit(text, output)


def split_list(value: str | None) -> list[str]:
    if not value:
        return []
    return [item.strip() for item in value.split(",") if item.strip()]


@app.command()
def bench(
    ctx: typer.Context,
    sizes: str | None = typer.Option(None, "--sizes", help="e.g. 10,20,30"),
    seeds: int | None = typer.Option(None, "--seeds", help="Seed count."),
    methods: str | None = typer.Option(
        None, "--methods", help="e.g. jaccard,beam_1,beam_10,optimal"
    ),
    workers: int | None = typer.Option(None, "--workers"),
    output: Path | None = typer.Option(None, "-o", "--output"),
) -> None:
    """Compare methods on generated graphs and write a CSV."""
    cfg = get_config(ctx)
    with handle_errors():
        try:
            size_list = [int(s) for s in split_list(sizes)] or list(
                cfg.bench["sizes"]
            )
        except ValueError as e:
            log.error(f"invalid --sizes {sizes!r}")
            raise typer.Exit(EXIT_INVALID) from e
        records = run_benchmark(
            size_list,
            seeds if seeds is not None else cfg.bench["seeds"],
            split_list(methods) or list(cfg.bench["methods"]),
            workers=workers if workers is not None else get_worker_count(),
            gen_params=dict(cfg.generator),
            optimal_max_n=cfg.bench["optimal_max_n"],
            exhaustive_max_n=cfg.bench["exhaustive_max_n"],
            show_progress=output is not None,
        )
        if output is None:
            typer.echo(format_csv(records), nl=False)
        else:
            write_csv(records, output)
            msg = f"Wrote {len(records)} rows to {output}"
            log.info(msg)


@app.command()
def verify(
    input_path: Path = typer.Argument(..., help="Edge-list file."),
    solution: Path = typer.Argument(..., help="Power graph JSON document."),
) -> None:
    """Check that a power graph document losslessly describes a graph."""
    with handle_errors():
        g = read_edge_list(input_path)
        doc = read_document(solution)
    problems = doc.verify(g)
    if problems:
        for problem in problems:
            log.error(f"{solution}: {problem}")
        raise typer.Exit(EXIT_VERIFICATION)
    typer.echo(f"{solution}: ok, {len(doc.edges)} representative edges")


if __name__ == "__main__":
    app()
