import json
import sys
from pathlib import Path
from typing import Any, Dict, List, NoReturn, Optional

import typer
from loguru import logger
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from dist_cospectra.algebra import format_poly
from dist_cospectra.errors import BudgetExhaustedError, InputError, VerificationError
from dist_cospectra.graph import INFINITY, Graph, bfs_distances, emit_edge_list
from dist_cospectra.graph6 import emit_graph6
from dist_cospectra.inputs import InputLoader, parse_rationals

app = typer.Typer(help="Exact cospectrality tools for distance-type graph matrices")
console = Console()

EXIT_INPUT = 2
EXIT_VERIFICATION = 3
EXIT_BUDGET = 4

# Store the exit code to be used by the CLI
exit_code = 0


def set_exit_code(code: int):
    """Set the exit code for the application."""
    global exit_code
    exit_code = code


def _configure_logging(verbose: bool, as_json: bool) -> None:
    logger.remove()
    level = "DEBUG" if verbose else ("ERROR" if as_json else "WARNING")
    logger.add(sys.stderr, format="<level>{level}</level>: {message}", level=level)


def _fail(error: Exception, verbose: bool) -> NoReturn:
    """Print an error and exit with the code of its family."""
    if isinstance(error, InputError):
        code = EXIT_INPUT
    elif isinstance(error, VerificationError):
        code = EXIT_VERIFICATION
    elif isinstance(error, BudgetExhaustedError):
        code = EXIT_BUDGET
    else:
        code = 1
    console.print(f"[bold red]ERROR:[/] {str(error)}")
    if verbose:
        console.print_exception()
    set_exit_code(code)
    raise typer.Exit(code)


def _finish(code: int) -> None:
    set_exit_code(code)
    if code:
        raise typer.Exit(code)


def _emit_json(data: Dict[str, Any]) -> None:
    typer.echo(json.dumps(data, indent=2, sort_keys=True))


def _graph_dict(g: Graph) -> Dict[str, Any]:
    return {"n": g.n, "graph6": emit_graph6(g), "edges": emit_edge_list(g)}


def _one_mode(**flags: bool) -> None:
    chosen = [name for name, on in flags.items() if on]
    if len(chosen) > 1:
        raise InputError(f"choose at most one of {', '.join('--' + c for c in chosen)}")


JSON_OPTION = typer.Option(False, "--json", help="Machine-readable JSON output")
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Enable verbose output")
CROSS_PART_OPTION = typer.Option(
    False, "--allow-cross-part", help="Accept B-vertices fully joined to several parts"
)


@app.command()
def dist(
    graph: str = typer.Argument(..., help="Graph file (.g6 or .edges)"),
    as_json: bool = JSON_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Print the distance matrix; 'inf' marks pairs in different components"""
    _configure_logging(verbose, as_json)
    try:
        g = InputLoader().load_graph(graph)
        dm = bfs_distances(g)
    except Exception as e:
        _fail(e, verbose)

    rows = [[None if d == INFINITY else int(d) for d in row] for row in dm.dist]
    if as_json:
        data = _graph_dict(g)
        data["distances"] = rows
        data["diameter"] = dm.diameter
        data["connected"] = all(d is not None for row in rows for d in row)
        _emit_json(data)
        return

    table = Table(title=f"Distances in {Path(graph).name}")
    table.add_column("", style="bold")
    for j in range(g.n):
        table.add_column(str(j + 1), justify="right")
    for i, row in enumerate(rows):
        table.add_row(str(i + 1), *["inf" if d is None else str(d) for d in row])
    console.print(table)


@app.command()
def charpoly(
    graph: str = typer.Argument(..., help="Graph file (.g6 or .edges)"),
    q: Optional[str] = typer.Option(None, "--q", help="Evaluate D_q at this rational q"),
    symbolic_q: bool = typer.Option(False, "--symbolic-q", help="D_q over Z[q] (default)"),
    symbolic_f: bool = typer.Option(False, "--symbolic-f", help="D_f over Z[t0..tD]"),
    distance: bool = typer.Option(False, "--distance", help="Classical distance matrix"),
    adjacency: bool = typer.Option(False, "--adjacency", help="Adjacency matrix"),
    as_json: bool = JSON_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Exact characteristic polynomial det(xI - M)"""
    from dist_cospectra.algebra import charpoly as matrix_charpoly
    from dist_cospectra.distance import adjacency_matrix, distance_matrix
    from dist_cospectra.qanalysis import charpoly_at, charpoly_f, charpoly_q

    _configure_logging(verbose, as_json)
    try:
        _one_mode(q=q is not None, symbolic_q=symbolic_q, symbolic_f=symbolic_f,
                  distance=distance, adjacency=adjacency)
        g = InputLoader().load_graph(graph)
        if q is not None:
            value = parse_rationals(q)[0]
            mode, poly = f"D_q at q={value}", charpoly_at(g, value)
        elif symbolic_f:
            mode, poly = "D_f", charpoly_f(g)
        elif distance:
            mode, poly = "distance", matrix_charpoly(distance_matrix(g))
        elif adjacency:
            mode, poly = "adjacency", matrix_charpoly(adjacency_matrix(g))
        else:
            mode, poly = "D_q", charpoly_q(g)
    except Exception as e:
        _fail(e, verbose)

    text = format_poly(poly)
    if as_json:
        _emit_json({"graph6": emit_graph6(g), "matrix": mode, "charpoly": text})
    else:
        typer.echo(text)


@app.command()
def cospectral(
    first: str = typer.Argument(..., help="First graph file"),
    second: str = typer.Argument(..., help="Second graph file"),
    q: Optional[str] = typer.Option(None, "--q", help="Compare D_q at this rational q"),
    all_q: bool = typer.Option(False, "--all-q", help="Compare D_q for every q (default)"),
    generalized: bool = typer.Option(False, "--generalized", help="Compare D_f for every f"),
    locus: bool = typer.Option(False, "--locus", help="Also report the rational q-locus"),
    as_json: bool = JSON_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Decide cospectrality; exits 3 when the graphs are not cospectral"""
    from dist_cospectra.qanalysis import cospectral_all_q, cospectral_at, cospectral_generalized, q_locus

    _configure_logging(verbose, as_json)
    try:
        _one_mode(q=q is not None, all_q=all_q, generalized=generalized)
        loader = InputLoader()
        g, h = loader.load_graph(first), loader.load_graph(second)
        if q is not None:
            value = parse_rationals(q)[0]
            mode, verdict = f"D_q at q={value}", cospectral_at(g, h, value)
        elif generalized:
            mode, verdict = "D_f", cospectral_generalized(g, h)
        else:
            mode, verdict = "D_q for all q", cospectral_all_q(g, h)
        locus_data = q_locus(g, h).to_dict() if locus else None
    except Exception as e:
        _fail(e, verbose)

    if as_json:
        data: Dict[str, Any] = {"matrix": mode, "cospectral": verdict}
        if locus_data is not None:
            data["locus"] = locus_data
        _emit_json(data)
    else:
        colour = "green" if verdict else "red"
        console.print(f"[bold {colour}]{'COSPECTRAL' if verdict else 'NOT COSPECTRAL'}:[/] {mode}")
        if locus_data is not None:
            console.print(f"q-locus gcd: {locus_data['gcd']}; rational roots: {locus_data['rational_roots']}")
    _finish(0 if verdict else EXIT_VERIFICATION)


@app.command()
def qlocus(
    first: str = typer.Argument(..., help="First graph file"),
    second: str = typer.Argument(..., help="Second graph file"),
    as_json: bool = JSON_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """gcd g(q) of the char-poly differences and its rational roots"""
    from dist_cospectra.qanalysis import q_locus

    _configure_logging(verbose, as_json)
    try:
        loader = InputLoader()
        data = q_locus(loader.load_graph(first), loader.load_graph(second)).to_dict()
    except Exception as e:
        _fail(e, verbose)

    if as_json:
        _emit_json(data)
        return
    if data["identically_zero"]:
        console.print("[bold green]Cospectral for every q[/] (the difference is identically zero)")
        return
    console.print(Panel.fit(
        f"[bold]g(q):[/] {data['gcd']}\n"
        f"[bold]Rational roots:[/] {', '.join(data['rational_roots']) or 'none'}\n"
        f"[bold]Roots in (0,1):[/] {', '.join(data['roots_in_unit_interval']) or 'none'}",
        title="q-locus",
    ))


def _certificate_table(cert) -> Table:
    table = Table(title="Similarity certificate")
    table.add_column("Level")
    table.add_column("Result")
    table.add_column("First difference")
    checks = list(cert.levels) + ([cert.infinite_level] if cert.infinite_level else [])
    for check in checks:
        where = "" if check.first_difference is None else str(tuple(i + 1 for i in check.first_difference))
        table.add_row(
            "inf" if check.level == -1 else str(check.level),
            "[green]pass[/]" if check.passed else "[red]fail[/]",
            where,
        )
    return table


@app.command()
def switch(
    graph: str = typer.Argument(..., help="Graph file"),
    config: str = typer.Option(..., "--config", "-c", help="Configuration text or file"),
    certify: bool = typer.Option(False, "--certify", help="Check S M_k(G1) = M_k(G2) S for every k"),
    output: Optional[str] = typer.Option(None, "--output", "-o", help="Write the switched graph here"),
    allow_cross_part: bool = CROSS_PART_OPTION,
    as_json: bool = JSON_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Apply a switching configuration and optionally certify the pair"""
    from dist_cospectra.errors import InvalidConfigError
    from dist_cospectra.switching import apply_switch, certify_pair, validate_config

    _configure_logging(verbose, as_json)
    try:
        loader = InputLoader()
        g = loader.load_graph(graph)
        c = loader.load_config(config)
        report = validate_config(g, c, allow_cross_part)
        for soft in (v for v in report.violations if v.soft):
            logger.warning(f"{soft.code}: {soft.message}")
        if not report.ok:
            raise InvalidConfigError("; ".join(v.message for v in report.hard), violations=report.hard)
        switched = apply_switch(g, c, validate=False)
        cert = certify_pair(g, switched, c) if certify else None
        if output:
            text = emit_edge_list(switched) if Path(output).suffix == ".edges" else emit_graph6(switched)
            Path(output).write_text(text + "\n")
    except Exception as e:
        _fail(e, verbose)

    if as_json:
        data: Dict[str, Any] = {"switched": _graph_dict(switched)}
        if cert is not None:
            data["certificate"] = cert.dict()
            data["certified"] = cert.passed
        _emit_json(data)
    else:
        console.print(f"[bold]Switched graph:[/] {emit_graph6(switched)}")
        console.print(f"[bold]Edges:[/] {emit_edge_list(switched)}")
        if cert is not None:
            console.print(_certificate_table(cert))
    _finish(EXIT_VERIFICATION if cert is not None and not cert.passed else 0)


def _parse_sizes(text: str) -> List[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"part sizes must be integers: {text!r}")


@app.command()
def match(
    first: str = typer.Argument(..., help="First graph file"),
    second: str = typer.Argument(..., help="Second graph file"),
    time_ms: int = typer.Option(60000, "--time-ms", help="Search time budget in milliseconds"),
    max_parts: int = typer.Option(2, "--max-parts", help="Largest number of parts tried"),
    part_sizes: str = typer.Option("2,4,6,8", "--part-sizes", help="Comma-separated even part sizes"),
    allow_cross_part: bool = CROSS_PART_OPTION,
    as_json: bool = JSON_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Search for a switching configuration explaining a pair"""
    from pydantic import ValidationError

    from dist_cospectra.matching import match_construction
    from dist_cospectra.models import SearchBudget

    _configure_logging(verbose, as_json)
    try:
        try:
            budget = SearchBudget(
                max_parts=max_parts,
                part_sizes=tuple(_parse_sizes(part_sizes)),
                time_ms=time_ms,
                allow_cross_part=allow_cross_part,
            )
        except ValidationError as e:
            raise InputError(f"bad search budget: {e}")
        loader = InputLoader()
        result = match_construction(
            loader.load_graph(first), loader.load_graph(second), budget, strict=True
        )
    except BudgetExhaustedError as e:
        if as_json:
            _emit_json({"exhausted": True, "candidates": e.candidates, "elapsed_ms": e.elapsed_ms})
        else:
            console.print(f"[bold yellow]BUDGET EXHAUSTED[/] after {e.candidates} candidates")
        _finish(EXIT_BUDGET)
    except Exception as e:
        _fail(e, verbose)

    if as_json:
        _emit_json(json.loads(result.json(exclude={"config"})))
    elif result.found:
        console.print(f"[bold green]CONSTRUCTION FOUND[/] ({result.orientation}): {result.config_text}")
    else:
        console.print(f"[bold red]NO CONSTRUCTION[/] among {result.candidates} candidates")
    _finish(0 if result.found else EXIT_VERIFICATION)


@app.command()
def family(
    name: str = typer.Argument(..., help="fig5 or fig6"),
    n: int = typer.Option(..., "--n", help="Total vertex count (at least 8)"),
    verify: bool = typer.Option(False, "--verify", help="Check the pair and its closed forms"),
    as_json: bool = JSON_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Generate a pair that is D_q-cospectral only at q = 1/2"""
    from dist_cospectra.families import family_pair, family_report

    _configure_logging(verbose, as_json)
    try:
        pair = family_pair(name, n)
        verdict = family_report(name, [n])[0] if verify else None
    except Exception as e:
        _fail(e, verbose)

    if as_json:
        data: Dict[str, Any] = {"family": name, "n": n, "G": _graph_dict(pair.g), "H": _graph_dict(pair.h)}
        if verdict is not None:
            data["verdict"] = verdict.dict()
            data["passed"] = verdict.passed
        _emit_json(data)
    else:
        console.print(Panel.fit(
            f"[bold]G:[/] {emit_graph6(pair.g)}\n    {emit_edge_list(pair.g)}\n"
            f"[bold]H:[/] {emit_graph6(pair.h)}\n    {emit_edge_list(pair.h)}",
            title=f"{name}, n = {n}",
        ))
        if verdict is not None:
            table = Table(title="Verification")
            table.add_column("Check")
            table.add_column("Result")
            for label, ok in (
                ("non-isomorphic", verdict.non_isomorphic),
                ("cospectral at q = 1/2", verdict.cospectral_at_half),
                ("1/2 is the only root in (0,1)", verdict.only_half),
                ("closed form of H", verdict.closed_form_h),
                ("closed form of G at 1/2", verdict.closed_form_g),
            ):
                table.add_row(label, "[green]pass[/]" if ok else "[red]fail[/]")
            console.print(table)
    _finish(EXIT_VERIFICATION if verdict is not None and not verdict.passed else 0)


@app.command()
def coalesce(
    first: str = typer.Argument(..., help="First graph of a switched pair"),
    second: str = typer.Argument(..., help="Second graph, same vertex order"),
    config: str = typer.Option(..., "--config", "-c", help="Configuration relating the pair"),
    part: int = typer.Option(1, "--part", help="1-based part index"),
    glue: str = typer.Option(..., "--glue", help="Rooted graph file glued onto every part vertex"),
    root: int = typer.Option(1, "--root", help="1-based root vertex of the glued graph"),
    as_json: bool = JSON_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Glue copies of a rooted graph onto a part and re-certify"""
    from dist_cospectra.switching import coalesce_on_part

    _configure_logging(verbose, as_json)
    try:
        loader = InputLoader()
        result = coalesce_on_part(
            loader.load_graph(first),
            loader.load_graph(second),
            loader.load_config(config),
            part - 1,
            loader.load_graph(glue),
            root - 1,
        )
    except Exception as e:
        _fail(e, verbose)

    passed = result.certificate.passed and result.charpolys_equal
    if as_json:
        _emit_json({
            "first": _graph_dict(result.h1),
            "second": _graph_dict(result.h2),
            "blocks": [[v + 1 for v in b] for b in result.similarity.blocks],
            "certified": result.certificate.passed,
            "charpolys_equal": result.charpolys_equal,
        })
    else:
        console.print(f"[bold]First:[/] {emit_graph6(result.h1)}")
        console.print(f"[bold]Second:[/] {emit_graph6(result.h2)}")
        console.print(_certificate_table(result.certificate))
        console.print(f"Char polys over Z[q] equal: {result.charpolys_equal}")
    _finish(0 if passed else EXIT_VERIFICATION)


@app.command("verify-qsample")
def verify_qsample(
    first: str = typer.Argument(..., help="First graph file"),
    second: str = typer.Argument(..., help="Second graph file"),
    sim: str = typer.Option(..., "--sim", help="JSON file with the similarity matrix"),
    q: str = typer.Option(..., "--q", help="Comma-separated rational q values"),
    scan: bool = typer.Option(False, "--scan", help="Also report every listed q where S intertwines"),
    as_json: bool = JSON_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Check S D_q(G) = D_q(H) S at finitely many q"""
    from dist_cospectra import qanalysis

    _configure_logging(verbose, as_json)
    try:
        loader = InputLoader()
        g, h = loader.load_graph(first), loader.load_graph(second)
        s = loader.load_similarity(sim)
        values = parse_rationals(q)
        cert = qanalysis.verify_qsample(g, h, s, values)
        scan_report = qanalysis.conjecture_scan(g, h, s, values) if scan else None
    except Exception as e:
        _fail(e, verbose)

    if as_json:
        data = cert.to_dict()
        if scan_report is not None:
            data["scan"] = scan_report.to_dict()
        _emit_json(data)
    else:
        colour = {"certified": "green", "incomplete": "yellow", "refuted": "red"}[cert.status]
        console.print(f"[bold {colour}]{cert.status.upper()}[/] (d = {cert.d}, {len(cert.qs)} q values)")
        if cert.failed_levels:
            console.print(f"Per-level check failed at levels {cert.failed_levels}")
        if scan_report is not None:
            console.print(f"Intertwines at: {', '.join(str(v) for v in scan_report.successes) or 'none'}")
    _finish(EXIT_VERIFICATION if cert.status == qanalysis.REFUTED else 0)


@app.command()
def survey(
    n: Optional[int] = typer.Option(None, "--n", help="Enumerate connected graphs internally (n <= 7)"),
    graph6: Optional[str] = typer.Option(
        None, "--graph6", help="graph6 file of all connected graphs on n vertices"
    ),
    out: str = typer.Option(..., "--out", help="Output directory for summary.json and pairs.csv"),
    seed: int = typer.Option(20240601, "--seed", help="Fingerprint RNG seed"),
    budget: int = typer.Option(60000, "--budget", help="Construction search budget per pair (ms)"),
    samples: int = typer.Option(3, "--samples", help="Fingerprint sample points"),
    workers: int = typer.Option(1, "--workers", help="Fingerprinting processes"),
    max_parts: int = typer.Option(2, "--max-parts", help="Largest number of parts tried"),
    part_sizes: str = typer.Option("2,4,6,8", "--part-sizes", help="Comma-separated even part sizes"),
    extra_q: str = typer.Option(
        "", "--extra-q", help="Also count pairs cospectral at these q (rationals or 'generic')"
    ),
    db: Optional[str] = typer.Option(None, "--db", help="Run ledger database path"),
    log_file: Optional[str] = typer.Option(None, "--log-file", help="Run log path"),
    compare: bool = typer.Option(True, "--compare/--no-compare", help="Compare with the reference table"),
    as_json: bool = JSON_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Count cospectral pairs among connected graphs and write the report"""
    from pydantic import ValidationError

    from dist_cospectra.analyzer import SurveyAnalyzer
    from dist_cospectra.audit import RunLogger
    from dist_cospectra.models import SearchBudget, SurveySettings
    from dist_cospectra.storage import SurveyStorage
    from dist_cospectra.survey import CospectralSurvey, emit_report

    try:
        if n is None and graph6 is None:
            raise InputError("give --n or --graph6")
        try:
            settings = SurveySettings(
                n=n,
                source=graph6 or "internal",
                seed=seed,
                samples=samples,
                workers=workers,
                budget=SearchBudget(
                    time_ms=budget, max_parts=max_parts, part_sizes=tuple(_parse_sizes(part_sizes))
                ),
                out_dir=out,
                extra_q=tuple(v.strip() for v in extra_q.split(",") if v.strip()),
            )
        except ValidationError as e:
            raise InputError(f"bad survey settings: {e}")
        console_level = "DEBUG" if verbose else ("ERROR" if as_json else "INFO")
        audit_logger = RunLogger(log_path=log_file, console_level=console_level)
        storage = SurveyStorage(db_path=db)
        try:
            runner = CospectralSurvey(audit_logger=audit_logger, storage=storage)
            if not as_json:
                console.print(Panel.fit("[bold blue]Cospectral pair survey[/]", subtitle="Starting..."))
            result = runner.run(settings)
            paths = emit_report(result, out)
            audit_logger.log_report(out)
        finally:
            storage.close()
        comparison = SurveyAnalyzer().compare(result.row) if compare else None
    except Exception as e:
        _fail(e, verbose)

    row = result.row
    if as_json:
        data: Dict[str, Any] = {"row": row.dict(), "files": paths}
        if comparison is not None:
            data["reference"] = comparison
        _emit_json(data)
        return
    table = Table(title=f"Cospectral pairs, n = {row.n}")
    for column in ("Graphs", "D_q pairs", "D_f pairs", "Construction", "% of D_q", "% of D_f"):
        table.add_column(column, justify="right")
    table.add_row(
        str(row.graphs),
        str(row.dq_pairs),
        str(row.df_pairs),
        str(row.construction_pairs),
        f"{row.construction_pct_of_dq}%",
        f"{row.construction_pct_of_df}%",
    )
    console.print(table)
    if result.summary.budget_exhausted_pairs:
        console.print(f"[yellow]{result.summary.budget_exhausted_pairs} searches hit the budget[/]")
    if comparison is not None and comparison["has_reference"]:
        state = "[green]matches[/]" if comparison["matches"] else f"[red]differs[/] {comparison['deltas']}"
        console.print(f"Reference table: {state}")
    console.print(f"\nReport written to: [cyan]{out}[/]")


@app.command("verify-reference")
def verify_reference(
    reference: Optional[str] = typer.Argument(None, help="Reference table (default: bundled)"),
    as_json: bool = JSON_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Verify the structure of a reference count table"""
    from dist_cospectra.analyzer import SurveyAnalyzer

    _configure_logging(verbose, as_json)
    try:
        analyzer = SurveyAnalyzer(reference)
        valid = analyzer.verify_reference_integrity()
    except Exception as e:
        _fail(e, verbose)

    if as_json:
        _emit_json({"reference": analyzer.reference_path, "valid": valid})
    elif valid:
        console.print(f"[bold green]VALID:[/] Reference file {analyzer.reference_path} "
                      "passed integrity checks")
    else:
        console.print(f"[bold red]INVALID:[/] Reference file {analyzer.reference_path} "
                      "failed integrity checks")
    _finish(0 if valid else EXIT_INPUT)


@app.command("enumerate")
def enumerate_graphs(
    n: int = typer.Argument(..., help="Vertex count (at most 7)"),
    as_json: bool = JSON_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Print one graph6 line per connected graph on n vertices"""
    from dist_cospectra.enumerate import enumerate_connected

    _configure_logging(verbose, True)
    try:
        lines = [emit_graph6(g) for g in enumerate_connected(n)]
    except Exception as e:
        _fail(e, verbose)
    if as_json:
        _emit_json({"n": n, "graph6": lines})
        return
    for line in lines:
        typer.echo(line)


def main():
    """Main entry point for the CLI."""
    try:
        app()
    finally:
        # Use the global exit code
        sys.exit(exit_code)


if __name__ == "__main__":
    main()
