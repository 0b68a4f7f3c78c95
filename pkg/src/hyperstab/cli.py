"""Command-line interface for hyperstab."""

import logging
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path
from typing import Dict, Iterator, List, Optional

import numpy as np
import typer
from rich.console import Console
from rich.markup import escape
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from hyperstab.config import Settings, create_example_config, get_settings
from hyperstab.errors import CapacityError, HyperstabError, VerificationFailure
from hyperstab.experiments import run_trials, trial_seeds, verify_entropy_vector
from hyperstab.hypergraph import (
    check_symmetric_submodular,
    cut_value,
    format_subset,
    load_hypergraph,
    mincut_table,
    prune_floating_components,
)
from hyperstab.network import build_omega
from hyperstab.oracle import compare_trial, haar_trial, replay_trial
from hyperstab.output_manager import OutputManager
from hyperstab.pipeline import PipelineConfig, PipelineContext, SimulationPipeline
from hyperstab.resources import check_dense_memory, default_jobs

app = typer.Typer(
    name="hyperstab",
    help="Hypergraph min-cut functions as entropies of random stabilizer tensor networks",
    add_completion=False,
)
console = Console()
logger = logging.getLogger(__name__)

INPUT_ARGUMENT = typer.Argument(
    ...,
    help="Hypergraph JSON file",
    exists=True,
    file_okay=True,
    dir_okay=False,
    readable=True,
)


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="[%(levelname)s] %(message)s",
        force=True,
    )


@contextmanager
def _exit_on_error() -> Iterator[None]:
    """Translate library errors into ``[red]Error:[/red]`` plus the matching exit code."""
    try:
        yield
    except HyperstabError as e:
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        raise typer.Exit(e.exit_code)
    except KeyboardInterrupt:
        console.print("\n[yellow]Interrupted by user[/yellow]")
        raise typer.Exit(1)


def _settings(**overrides: Optional[object]) -> Settings:
    return get_settings(cli_overrides={k: v for k, v in overrides.items() if v is not None})


def _bond_exponents(values: Optional[List[int]]) -> tuple:
    return tuple(sorted(set(values))) if values else (1,)


def _progress(show: bool) -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        console=Console(stderr=True),
        disable=not show,
        transient=True,
    )


PRIME_OPTION = typer.Option(None, "--prime", "-p", help="Qudit field prime (default 2)")
BOND_OPTION = typer.Option(
    None,
    "--bond-exponent",
    "-r",
    min=1,
    help="Bond exponent r, D = p^r (repeatable; default 1)",
)
TRIALS_OPTION = typer.Option(None, "--trials", "-n", min=1, help="Trials per bond exponent")
SEED_OPTION = typer.Option(None, "--seed", "-s", min=0, help="Master seed (default 0)")
JOBS_OPTION = typer.Option(
    None, "--jobs", "-j", min=1, help="Worker processes (default: available cores)"
)
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Enable debug logging")


@app.command()
def mincut(
    input_file: Path = INPUT_ARGUMENT,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Print m(A) and the number of minimal cuts k(A) for every terminal subset A."""
    _setup_logging(verbose)
    with _exit_on_error():
        settings = _settings()
        h = prune_floating_components(load_hypergraph(input_file))
        table = mincut_table(h, settings.max_vertices)
        console.print("[dim]A  m(A)  k(A)[/dim]")
        for subset, m, k in table.rows():
            console.print(f"{format_subset(subset, h.terminals)}  {m}  {k}", highlight=False)
        if table.is_symmetric_submodular():
            console.print("[green]✓[/green] symmetric and submodular")
        else:
            raise VerificationFailure("min-cut table is not symmetric submodular")


@app.command()
def cut(
    input_file: Path = INPUT_ARGUMENT,
    vertices: Optional[List[str]] = typer.Argument(None, help="Vertex ids of the cut S"),
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Print the cut value c(S) of a vertex subset."""
    _setup_logging(verbose)
    with _exit_on_error():
        h = load_hypergraph(input_file)
        console.print(str(cut_value(h, vertices or [])), highlight=False)


def _run_pipeline(
    input_file: Path,
    prime: Optional[int],
    bond_exponent: Optional[List[int]],
    trials: Optional[int],
    seed: Optional[int],
    delta: Optional[float],
    out: Optional[Path],
    jobs: Optional[int],
    show_progress: bool,
) -> SimulationPipeline:
    settings = _settings(prime=prime, trials=trials, seed=seed, delta=delta, jobs=jobs)
    config = PipelineConfig(
        prime=settings.prime,
        bond_exponents=_bond_exponents(bond_exponent),
        trials=settings.trials,
        seed=settings.seed,
        delta=settings.delta,
        jobs=settings.jobs,
        settings=settings,
        show_progress=show_progress,
    )
    manager = OutputManager(input_file, outdir=out)
    pipeline = SimulationPipeline(
        config, PipelineContext(input_file=input_file, manager=manager), console=console
    )
    pipeline.run()
    return pipeline


@app.command()
def simulate(
    input_file: Path = INPUT_ARGUMENT,
    prime: Optional[int] = PRIME_OPTION,
    bond_exponent: Optional[List[int]] = BOND_OPTION,
    trials: Optional[int] = TRIALS_OPTION,
    seed: Optional[int] = SEED_OPTION,
    delta: Optional[float] = typer.Option(
        None, "--delta", help="Success tolerance (default 0.3)"
    ),
    out: Optional[Path] = typer.Option(
        None,
        "--out",
        "-o",
        help="Output directory for report files (default: same as input)",
        file_okay=False,
        dir_okay=True,
    ),
    jobs: Optional[int] = JOBS_OPTION,
    progress: bool = typer.Option(True, "--progress/--no-progress", help="Show a progress bar"),
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """
    Run random projection trials and write moment and concentration reports.

    Writes <name>.report.json, <name>.moments.r<r>.csv, <name>.concentration.csv
    and <name>.summary.md, then prints one summary line per bond exponent.
    """
    _setup_logging(verbose)
    with _exit_on_error():
        _run_pipeline(input_file, prime, bond_exponent, trials, seed, delta, out, jobs, progress)


@app.command()
def moments(
    input_file: Path = INPUT_ARGUMENT,
    prime: Optional[int] = PRIME_OPTION,
    bond_exponent: Optional[List[int]] = BOND_OPTION,
    trials: Optional[int] = TRIALS_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[Path] = typer.Option(
        None,
        "--out",
        "-o",
        help="Output directory for report files (default: same as input)",
        file_okay=False,
        dir_okay=True,
    ),
    jobs: Optional[int] = JOBS_OPTION,
    max_z: Optional[float] = typer.Option(
        None, "--max-z", min=0.0, help="Exit 1 if any |z| exceeds this value"
    ),
    progress: bool = typer.Option(True, "--progress/--no-progress", help="Show a progress bar"),
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Estimate E[D_b tr Psi] and E[D_b^2 tr Psi_A^2] and compare them with the exact values."""
    _setup_logging(verbose)
    with _exit_on_error():
        pipeline = _run_pipeline(
            input_file, prime, bond_exponent, trials, seed, None, out, jobs, progress
        )
        report = pipeline.ctx.report
        assert report is not None
        worst = 0.0
        for block in report.moments:
            table = Table(title=f"r = {block.bond_exponent}  (log_p D_b = {block.log_db})")
            for column in ("A", "m", "kA", "mean", "exact", "se", "z", "ratio"):
                table.add_column(column, justify="left" if column == "A" else "right")
            table.add_row(
                "D_b tr", "", "", f"{block.trace_mean:.5g}", "1", f"{block.trace_se:.3g}",
                f"{block.trace_z:.2f}", "",
            )
            for row in block.rows:
                table.add_row(
                    format_subset(row.subset, report.mincuts.terminals),
                    str(row.m),
                    str(row.k),
                    f"{row.mean:.5g}",
                    f"{row.exact:.5g}",
                    f"{row.se:.3g}",
                    f"{row.z:.2f}",
                    f"{row.ratio_mean:.4g}",
                )
            console.print(table)
            worst = max(worst, block.max_abs_z())
        if max_z is not None and worst > max_z:
            raise VerificationFailure(f"largest |z| = {worst:.2f} exceeds {max_z}")


@app.command("oracle-check")
def oracle_check(
    input_file: Path = INPUT_ARGUMENT,
    prime: Optional[int] = PRIME_OPTION,
    bond_exponent: int = typer.Option(1, "--bond-exponent", "-r", min=1, help="Bond exponent r"),
    trials: int = typer.Option(200, "--trials", "-n", min=1, help="Trials to replay"),
    seed: Optional[int] = SEED_OPTION,
    jobs: Optional[int] = JOBS_OPTION,
    haar: bool = typer.Option(
        False, "--haar", help="Also estimate E[D_b tr Psi] with Haar-random projections"
    ),
    corrupt_entropy: bool = typer.Option(False, "--corrupt-entropy", hidden=True),
    progress: bool = typer.Option(True, "--progress/--no-progress", help="Show a progress bar"),
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Replay trials in the dense state-vector engine and compare with the stabilizer engine."""
    _setup_logging(verbose)
    with _exit_on_error():
        settings = _settings(prime=prime, seed=seed, jobs=jobs)
        h = prune_floating_components(load_hypergraph(input_file))
        layout, omega = build_omega(
            h,
            settings.prime,
            bond_exponent,
            max_qudits=settings.max_qudits,
            max_terminals=settings.max_terminals,
        )
        dimension = layout.p**layout.n_qudits
        if dimension > settings.oracle_max_dimension:
            raise CapacityError(
                f"{layout.n_qudits} qudits need {dimension} amplitudes, "
                f"oracle bound is {settings.oracle_max_dimension}"
            )
        check_dense_memory(dimension)

        seeds = trial_seeds(settings.seed, bond_exponent, trials)
        stab_results = run_trials(layout, omega, seeds, settings.jobs or default_jobs())
        if corrupt_entropy:
            for i, result in enumerate(stab_results):
                if result.entropies is not None:
                    broken = (result.entropies[0] + 1,) + result.entropies[1:]
                    stab_results[i] = replace(result, entropies=broken)
                    break

        with _progress(progress) as bar:
            task = bar.add_task("Replaying trials...", total=len(stab_results))
            for result in stab_results:
                dense = replay_trial(layout, result.seed, settings.oracle_max_dimension)
                comparison = compare_trial(result, dense)
                bar.advance(task)
                if not comparison.agrees:
                    bar.stop()
                    for line in comparison.mismatches:
                        console.print(f"  {escape(line)}", highlight=False)
                    raise VerificationFailure(f"disagreement at seed {result.seed}")

        zeros = sum(1 for r in stab_results if not r.nonzero)
        console.print(
            f"[green]✓[/green] {len(stab_results)} trials agree on nonzero flag, trace and "
            f"S_0/S_1/S_2 ({zeros} zero outcomes, {layout.n_qudits} qudits)"
        )

        if haar:
            traces = np.array(
                [haar_trial(layout, s, settings.oracle_max_dimension).trace for s in seeds]
            ) * float(layout.p) ** layout.log_db
            mean = float(traces.mean())
            se = float(traces.std(ddof=1) / np.sqrt(traces.size)) if traces.size > 1 else 0.0
            console.print(f"Haar projections: E[D_b tr Psi] = {mean:.4f} ± {se:.4f} (exact 1)")


@app.command()
def verify(
    input_file: Path = INPUT_ARGUMENT,
    prime: Optional[int] = PRIME_OPTION,
    bond_exponent: Optional[List[int]] = BOND_OPTION,
    trials: Optional[int] = TRIALS_OPTION,
    seed: Optional[int] = SEED_OPTION,
    jobs: Optional[int] = JOBS_OPTION,
    progress: bool = typer.Option(True, "--progress/--no-progress", help="Show a progress bar"),
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Check every measured entropy vector and the min-cut table for symmetry,
    submodularity and the rank bound entropy(A) <= r m(A)."""
    _setup_logging(verbose)
    with _exit_on_error():
        settings = _settings(prime=prime, trials=trials, seed=seed, jobs=jobs)
        h = prune_floating_components(load_hypergraph(input_file))
        table = mincut_table(h, settings.max_vertices)
        mincut_violations = check_symmetric_submodular(table.as_function(), tolerance=0)

        exponents = _bond_exponents(bond_exponent)
        results = []
        with _progress(progress) as bar:
            task = bar.add_task("Running trials...", total=settings.trials * len(exponents))
            for r in exponents:
                layout, omega = build_omega(
                    h,
                    settings.prime,
                    r,
                    max_qudits=settings.max_qudits,
                    max_terminals=settings.max_terminals,
                )
                results.extend(
                    run_trials(
                        layout,
                        omega,
                        trial_seeds(settings.seed, r, settings.trials),
                        settings.jobs or default_jobs(),
                        progress=lambda n: bar.advance(task, n),
                    )
                )
        check = verify_entropy_vector(results, table)

        console.print(
            f"min-cut table: {len(mincut_violations)} violations; "
            f"{check.checked} entropy vectors: {check.violations} violations, "
            f"{check.rank_bound_violations} rank-bound violations"
        )
        for violation in mincut_violations[:5]:
            console.print(f"  {escape(violation.describe(h.terminals))}", highlight=False)
        if mincut_violations or not check.passed:
            detail = f", first failing seed {check.failing_seeds[0]}" if check.failing_seeds else ""
            raise VerificationFailure(f"entropy vector checks failed{detail}")
        console.print("[green]✓[/green] all checks passed")


@app.command()
def config(
    example: bool = typer.Option(False, "--example", help="Print an example config file"),
) -> None:
    """Show the effective settings, or an example config file."""
    if example:
        console.print(create_example_config(), markup=False, highlight=False)
        return
    settings = get_settings()
    table = Table(title="Effective settings")
    table.add_column("setting")
    table.add_column("value", justify="right")
    values: Dict[str, object] = vars(settings)
    for key, value in values.items():
        table.add_row(key, "auto" if value is None else str(value))
    console.print(table)


@app.command()
def version() -> None:
    """Show version information."""
    from hyperstab import __version__

    console.print(f"hyperstab version {__version__}")


def main() -> None:
    """Entry point for the CLI."""
    app()


if __name__ == "__main__":
    main()
