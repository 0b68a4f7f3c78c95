"""Simulation pipeline orchestration.

This module contains the SimulationPipeline class that runs the steps shared
by the ``simulate`` and ``moments`` commands: loading the hypergraph, running
the trials for each bond exponent, writing the report files and printing a
summary.
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple

from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn

from hyperstab.config import Settings
from hyperstab.experiments import ExperimentConfig, ExperimentReport, run_experiment
from hyperstab.hypergraph import WeightedHypergraph, load_hypergraph, prune_floating_components
from hyperstab.output_manager import OutputManager
from hyperstab.reports import write_reports
from hyperstab.resources import default_jobs


@dataclass
class PipelineConfig:
    """Immutable configuration for pipeline execution."""

    # Simulation parameters
    prime: int = 2
    bond_exponents: Tuple[int, ...] = (1,)
    trials: int = 1000
    seed: int = 0
    delta: float = 0.3

    # Execution
    jobs: Optional[int] = None
    settings: Settings = field(default_factory=Settings)

    # Output settings
    template_dir: Optional[Path] = None
    show_progress: bool = True


@dataclass
class PipelineContext:
    """Mutable state shared across pipeline steps."""

    input_file: Path
    manager: OutputManager

    hypergraph: Optional[WeightedHypergraph] = None
    experiment: Optional[ExperimentConfig] = None
    report: Optional[ExperimentReport] = None
    written: Dict[str, Path] = field(default_factory=dict)
    duration_seconds: float = 0.0


class SimulationPipeline:
    """Orchestrates a Monte Carlo run from hypergraph file to report files."""

    def __init__(
        self,
        config: PipelineConfig,
        context: PipelineContext,
        console: Optional[Console] = None,
    ):
        """Initialize the pipeline.

        Args:
            config: Immutable pipeline configuration
            context: Mutable pipeline state
            console: Rich console for output (defaults to new Console())
        """
        self.config = config
        self.ctx = context
        self.console = console or Console()
        self.logger = logging.getLogger(__name__)

    def run(self) -> ExperimentReport:
        """Execute the complete pipeline."""
        self.load_hypergraph()
        self.configure_experiment()
        self.run_trials()
        self.write_reports()
        self.print_summary()
        assert self.ctx.report is not None
        return self.ctx.report

    def load_hypergraph(self) -> None:
        """Step 1: Parse and prune the input hypergraph."""
        h = load_hypergraph(self.ctx.input_file)
        pruned = prune_floating_components(h)
        if len(pruned.vertices) != len(h.vertices):
            self.console.print(
                f"[dim]Pruned {len(h.vertices) - len(pruned.vertices)} vertices "
                "in components without terminals[/dim]"
            )
        self.ctx.hypergraph = pruned
        self.logger.debug(
            f"Hypergraph: {len(pruned.vertices)} vertices, {len(pruned.edges)} edges, "
            f"terminals {list(pruned.terminals)}"
        )

    def configure_experiment(self) -> None:
        """Step 2: Validate the experiment parameters against the settings."""
        assert self.ctx.hypergraph is not None
        settings = self.config.settings
        jobs = self.config.jobs or settings.jobs or default_jobs()
        self.logger.debug(f"Using {jobs} worker process(es)")
        self.ctx.experiment = ExperimentConfig(
            hypergraph=self.ctx.hypergraph,
            prime=self.config.prime,
            bond_exponents=tuple(self.config.bond_exponents),
            trials=self.config.trials,
            seed=self.config.seed,
            delta=self.config.delta,
            jobs=jobs,
            source=self.ctx.input_file.name,
            max_vertices=settings.max_vertices,
            max_qudits=settings.max_qudits,
            max_terminals=settings.max_terminals,
        )

    def run_trials(self) -> None:
        """Step 3: Run all trials and aggregate them."""
        experiment = self.ctx.experiment
        assert experiment is not None
        total = experiment.trials * len(experiment.bond_exponents)
        start = time.time()
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            console=Console(stderr=True),
            disable=not self.config.show_progress,
            transient=True,
        ) as progress:
            task = progress.add_task("Running trials...", total=total)
            self.ctx.report = run_experiment(
                experiment, progress=lambda n: progress.advance(task, n)
            )
        self.ctx.duration_seconds = time.time() - start
        self.logger.debug(f"{total} trials finished in {self.ctx.duration_seconds:.2f}s")

    def write_reports(self) -> None:
        """Step 4: Write JSON, CSV and Markdown reports."""
        report = self.ctx.report
        assert report is not None
        paths = self.ctx.manager.get_report_paths(report.config.bond_exponents)
        self.ctx.written = write_reports(report, paths, self.config.template_dir)

    def print_summary(self) -> None:
        """Step 5: One line per bond exponent, then the written files."""
        report = self.ctx.report
        assert report is not None
        for row, moments in zip(report.concentration.rows, report.moments):
            self.console.print(
                f"r={row.bond_exponent}: P(nonzero)={row.p_nonzero:.4f} "
                f"success={row.success_fraction:.4f} (delta={report.concentration.delta}) "
                f"E[D_b tr]={moments.trace_mean:.4f}±{moments.trace_se:.4f}"
            )
        verification = report.verification
        if verification.passed:
            self.console.print(
                f"[green]✓[/green] {verification.checked} entropy vectors symmetric, "
                "submodular and within the rank bound"
            )
        else:
            self.console.print(
                f"[red]✗[/red] {verification.violations} entropy-vector violations, "
                f"{verification.rank_bound_violations} rank-bound violations"
            )
        self.console.print("[dim]Output files generated:[/dim]")
        for key, path in self.ctx.written.items():
            self.console.print(f"  {key}: {path}")
