from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Annotated, Iterator, Optional

from rich.console import Console
from rich.panel import Panel
import typer

from . import (
    BudgetExhausted,
    ErrorCodes,
    Infeasible,
    InternalConsistencyError,
    ParameterError,
    PreconditionError,
    StructuralError,
    format_exc,
)
from .bipartite import profile_oracle
from .coloring import (
    ListAssignment,
    assignment_from_dict,
    certificate_to_json,
    coloring_from_dict,
    equity_cap,
    random_assignment,
    read_json,
    verify_certificate,
)
from .config import read_conf
from .extension import compute_d_lists
from .graph import Family, FamilySpec, build_family, read_graph, to_dot, to_json
from .oracle import (
    SearchBudget,
    Status,
    decide_equitable_vertex_arborable,
    decide_equitably_k_list_arborable,
)
from .reproduce import print_results, run_claims, select_claims
from .solvers import STRATEGIES, solve

cli = typer.Typer()
console = Console()


class GenFamily(str, Enum):
    path_power = "path-power"
    cycle_power = "cycle-power"
    complete = "complete"
    complete_minus_edge = "complete-minus-edge"
    complete_bipartite = "complete-bipartite"
    cocktail_party = "cocktail-party"
    union = "union"


Strategy = Enum(  # type: ignore[misc]
    "Strategy", {s.replace("-", "_"): s for s in STRATEGIES}, type=str
)


def path_exists(path: Path | None) -> Path | None:
    if path is not None and not path.exists():
        raise typer.BadParameter(f"'{path}' does not exist.")
    return path


ConfOpt = Annotated[
    Optional[Path],
    typer.Option(
        "--conf", "-c", callback=path_exists, help="TOML file with [tool.arboreq]"
    ),
]


def parts_exist(of: str) -> str:
    if missing := [part for part in of.split(",") if part and not Path(part).exists()]:
        raise typer.BadParameter(f"{', '.join(missing)} does not exist.")
    return of


BipartiteOpt = Annotated[
    Optional[tuple[int, int]],
    typer.Option(metavar="A B", help="Work on K_{A,B} instead of a graph file"),
]


def _sides(graph: Path | None, bipartite: tuple[int, int] | None) -> tuple[int, int] | None:
    sides = bipartite if bipartite and None not in bipartite else None
    if (graph is None) == (sides is None):
        raise ParameterError("pass either a graph file or --bipartite A B")
    return sides


def _conf(config: Path | None) -> dict:
    return read_conf(f"{config}" if config else "pyproject.toml")


@contextmanager
def exit_codes() -> Iterator[None]:
    """Map library exceptions onto the process exit codes."""
    try:
        yield
    except BudgetExhausted as exc:
        console.print(format_exc(exc, "Increase --budget or the node limit"))
        ErrorCodes.UNKNOWN_ERR.exit()
    except Infeasible as exc:
        console.print(format_exc(exc))
        ErrorCodes.VERIFY_ERR.exit()
    except InternalConsistencyError as exc:
        console.print(format_exc(exc, "This is a bug, please report it"))
        ErrorCodes.VERIFY_ERR.exit()
    except (ParameterError, PreconditionError, StructuralError) as exc:
        console.print(format_exc(exc))
        ErrorCodes.PRECONDITION_ERR.exit()


def _write(text: str, output: Path | None):
    if output is None:
        typer.echo(text)
    else:
        output.write_text(text + "\n")
        console.print(f"Wrote {output}")


def _load_lists(
    lists: Path | None, n: int, k: int | None, seed: int, universe: int
) -> ListAssignment:
    if lists is not None:
        return assignment_from_dict(read_json(lists))
    if k is None:
        raise ParameterError("pass --lists, or --k to draw random lists")
    return random_assignment(n, k, universe or 2 * k, seed)


@cli.callback()
def main(ctx: typer.Context):
    """
    Equitable list arboricity: build graphs, solve, verify and decide.
    """


@cli.command()
def gen(
    family: Annotated[GenFamily, typer.Option(help="Graph family to build")],
    n: Annotated[int, typer.Option("--n", help="Number of vertices")] = 0,
    p: Annotated[int, typer.Option("--p", help="Power of the path or cycle")] = 0,
    a: Annotated[int, typer.Option("--a", help="Size of side X")] = 0,
    b: Annotated[int, typer.Option("--b", help="Size of side Y")] = 0,
    of: Annotated[
        str,
        typer.Option(
            "--of", callback=parts_exist, help="Comma separated graph files to join"
        ),
    ] = "",
    output: Annotated[
        Optional[Path], typer.Option("--output", "-o", help="Graph JSON file")
    ] = None,
):
    """Write a family member as graph JSON."""
    with exit_codes():
        parts = tuple(read_graph(path) for path in of.split(",") if path)
        spec = FamilySpec(
            Family(family.value.replace("-", "_")), n=n, p=p, a=a, b=b, parts=parts
        )
        _write(to_json(build_family(spec)), output)


@cli.command("solve")
def solve_cmd(
    graph: Annotated[
        Optional[Path], typer.Argument(callback=path_exists, help="Graph JSON")
    ] = None,
    bipartite: BipartiteOpt = None,
    lists: Annotated[
        Optional[Path],
        typer.Option(callback=path_exists, help="List assignment JSON"),
    ] = None,
    k: Annotated[Optional[int], typer.Option("--k", help="List size")] = None,
    seed: Annotated[int, typer.Option(help="Seed for random lists")] = 0,
    universe: Annotated[int, typer.Option(help="Colors for random lists (0: 2k)")] = 0,
    strategy: Annotated[
        Strategy, typer.Option(help="Solver to use, auto picks by graph family")
    ] = Strategy("auto"),
    output: Annotated[
        Optional[Path], typer.Option("--output", "-o", help="Certificate file")
    ] = None,
    verbose: Annotated[
        bool, typer.Option("--verbose", "-v", help="Print the peel sets")
    ] = False,
    dump_context: Annotated[
        Optional[Path],
        typer.Option(help="Write the D-lists of the outermost peel to this file"),
    ] = None,
    config: ConfOpt = None,
):
    """Find an equitable arborable coloring and write its certificate."""
    conf = _conf(config)
    with exit_codes():
        if sides := _sides(graph, bipartite):
            a, b = sides
            g = build_family(FamilySpec(Family.complete_bipartite, a=a, b=b))
            strategy = Strategy("bipartite")
        else:
            g = read_graph(graph)
        L = _load_lists(lists, g.n, k, seed, universe)
        k = L.k if k is None else k
        if k is None:
            raise ParameterError("lists of different sizes, not a k-assignment")
        budget = SearchBudget(conf["node_limit"], conf["budget_secs"])
        outcome = solve(g, k, L, strategy.value, budget)
        if verbose:
            console.print(f"[b]{outcome.theorem_tag}[/b] on {g.family_name}, n={g.n}, k={k}")
            for depth, S in enumerate(outcome.recursion_trace):
                console.print(f"  peel {depth}: {S}")
            console.print(f"  base: {outcome.base}")
        if dump_context is not None and outcome.recursion_trace:
            S = outcome.recursion_trace[0]
            base = outcome.coloring.restrict(v for v in g.vertices if v not in S)
            ctx = compute_d_lists(g, S, L, base, m=max(1, len(S) // k), relaxed=True)
            dump_context.write_text(ctx.to_json() + "\n")
        report = verify_certificate(g, L, outcome.coloring, k)
        _write(
            certificate_to_json(
                outcome.coloring, report, k, L, strategy=outcome.theorem_tag
            ),
            output,
        )
    if not report.ok:
        ErrorCodes.VERIFY_ERR.exit("; ".join(report.failures()))


@cli.command()
def verify(
    graph: Annotated[Path, typer.Argument(callback=path_exists, help="Graph JSON")],
    certificate: Annotated[
        Path,
        typer.Argument(callback=path_exists, help="Certificate or coloring JSON"),
    ],
    lists: Annotated[
        Optional[Path],
        typer.Option(callback=path_exists, help="Lists, when not in the certificate"),
    ] = None,
    k: Annotated[Optional[int], typer.Option("--k", help="List size")] = None,
):
    """Check a coloring: lists, acyclic classes, totality and the equity cap."""
    with exit_codes():
        g = read_graph(graph)
        data = read_json(certificate)
        f = coloring_from_dict(data)
        if lists is not None:
            L = assignment_from_dict(read_json(lists))
        elif "lists" in data:
            L = assignment_from_dict(data)
        else:
            raise ParameterError("no lists in the certificate, pass --lists")
        k = k or data.get("k") or L.k
        if k is None:
            raise ParameterError("cannot tell the list size, pass --k")
        report = verify_certificate(g, L, f, k)
    console.print_json(data=report.to_dict())
    if not report.ok:
        for msg in report.failures():
            console.print(f"[red]{msg}")
        ErrorCodes.VERIFY_ERR.exit()


@cli.command()
def decide(
    k: Annotated[int, typer.Option("--k", help="List size or number of classes")],
    graph: Annotated[
        Optional[Path], typer.Argument(callback=path_exists, help="Graph JSON")
    ] = None,
    bipartite: BipartiteOpt = None,
    vertex: Annotated[
        bool, typer.Option(help="Decide equitable vertex k-arboricity instead")
    ] = False,
    universe: Annotated[
        Optional[int], typer.Option(help="Colors lists are drawn from (0: 2k)")
    ] = None,
    budget: Annotated[
        Optional[float], typer.Option(help="Time budget in seconds")
    ] = None,
    jobs: Annotated[
        Optional[int], typer.Option(help="Worker processes for list assignments")
    ] = None,
    config: ConfOpt = None,
):
    """Exhaustively decide equitable k-list (or vertex k-) arboricity.

    With ``--bipartite A B`` the decision is made on class profiles of
    K_{A,B}: the same k colors on every vertex, classes of size at most
    the equity cap, or of exactly the equitable sizes with ``--vertex``.
    """
    conf = _conf(config)
    secs = conf["budget_secs"] if budget is None else budget
    search = SearchBudget(conf["node_limit"], secs)
    with exit_codes():
        if sides := _sides(graph, bipartite):
            a, b = sides
            if a < 1 or b < 1 or k < 1:
                raise ParameterError(f"need a, b, k >= 1: {a=}, {b=}, {k=}")
            found = profile_oracle(a, b, k, equity_cap(a + b, k), exact_sizes=vertex)
            console.print_json(
                data={
                    "feasible": found.feasible,
                    "profile": [list(pair) for pair in found.witness.counts]
                    if found.witness
                    else None,
                }
            )
            if not found.feasible:
                ErrorCodes.VERIFY_ERR.exit()
            return
        g = read_graph(graph)
        if vertex:
            verdict = decide_equitable_vertex_arborable(g, k, search)
        else:
            colors = (conf["universe"] if universe is None else universe) or 2 * k
            verdict = decide_equitably_k_list_arborable(
                g, k, colors, search, jobs=jobs or conf["jobs"]
            )
            if not verdict.complete:
                console.print(
                    Panel(
                        f"Only lists drawn from {colors} colors were checked; "
                        f"a complete decision needs {k * g.n}.",
                        title="[bold red]INCOMPLETE",
                        style="red",
                    )
                )
    console.print_json(data=verdict.to_dict())
    match verdict.status:
        case Status.unknown:
            ErrorCodes.UNKNOWN_ERR.exit(verdict.reason)
        case Status.infeasible:
            ErrorCodes.VERIFY_ERR.exit()


@cli.command()
def reproduce(
    subset: Annotated[
        Optional[str],
        typer.Option(help="Claim id, prefix or section ref, e.g. k11-17 or thm2.7"),
    ] = None,
    all_: Annotated[bool, typer.Option("--all", help="Run every claim")] = False,
    budget: Annotated[
        Optional[float], typer.Option(help="Time budget per decision in seconds")
    ] = None,
    jobs: Annotated[Optional[int], typer.Option(help="Worker processes")] = None,
    samples: Annotated[
        Optional[int], typer.Option(help="Random assignments per sampled claim")
    ] = None,
    seed: Annotated[Optional[int], typer.Option(help="Base seed")] = None,
    json_out: Annotated[
        Optional[Path], typer.Option("--json", help="Also write the table as JSON")
    ] = None,
    config: ConfOpt = None,
):
    """Replay the catalogued claims and tabulate PASS/FAIL/SKIP."""
    if subset and all_:
        ErrorCodes.PRECONDITION_ERR.exit("`--subset` and `--all` are mutually exclusive")
    if not (subset or all_):
        ErrorCodes.PRECONDITION_ERR.exit("pass `--subset <claim>` or `--all`")
    conf = _conf(config)
    overrides = {"budget_secs": budget, "jobs": jobs, "samples": samples, "seed": seed}
    conf.update({key: val for key, val in overrides.items() if val is not None})
    try:
        claims = select_claims(subset)
    except ValueError as err:
        raise typer.BadParameter(str(err), param_hint="--subset")
    lines = run_claims(claims, conf, conf["jobs"])
    if print_results(lines, json_out) > 0:
        ErrorCodes.VERIFY_ERR.exit()


@cli.command("export-dot")
def export_dot(
    graph: Annotated[Path, typer.Argument(callback=path_exists, help="Graph JSON")],
    coloring: Annotated[
        Optional[Path],
        typer.Option(callback=path_exists, help="Certificate or coloring JSON"),
    ] = None,
    output: Annotated[
        Optional[Path], typer.Option("--output", "-o", help="DOT file")
    ] = None,
):
    """Write the graph, optionally labeled with a coloring, as DOT."""
    with exit_codes():
        g = read_graph(graph)
        colors = None
        if coloring is not None:
            colors = coloring_from_dict(read_json(coloring))
        _write(to_dot(g, colors).rstrip("\n"), output)


if __name__ == "__main__":
    cli()
