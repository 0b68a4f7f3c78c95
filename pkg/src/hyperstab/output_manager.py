"""Output path management for run reports.

This module provides OutputManager for centralized path generation and
validation for all report files (JSON report, CSV tables, Markdown summary).
"""

import os
from pathlib import Path
from typing import Dict, Optional, Union

from hyperstab.errors import InputError


class OutputManager:
    """Manage output paths for the files a run writes.

    Examples:
        # Default outdir (input file's directory)
        manager = OutputManager("h1.json")
        manager.get_report_path()  # h1.report.json

        # Custom outdir
        manager = OutputManager("h1.json", outdir="/runs")
        manager.get_moments_csv_path(4)  # /runs/h1.moments.r4.csv
    """

    def __init__(
        self,
        input_path: Union[str, Path],
        outdir: Optional[Union[str, Path]] = None,
    ) -> None:
        """Initialize OutputManager.

        Args:
            input_path: Path to the hypergraph file.
            outdir: Output directory for reports. Defaults to the input
                file's directory.

        Raises:
            InputError: If the input is missing or a directory, or if outdir
                cannot be created or written.
        """
        input_path = Path(input_path).expanduser().resolve()
        if not input_path.exists():
            raise InputError(f"Input file not found: {input_path}")
        if input_path.is_dir():
            raise InputError(f"Input path is a directory, not a file: {input_path}")

        self._input_path = input_path
        self._basename = input_path.stem

        if outdir is None:
            self._outdir = input_path.parent
        else:
            self._outdir = Path(outdir).expanduser().resolve()

        self._validate_outdir()

    def _validate_outdir(self) -> None:
        """Create the output directory if needed and check it is writable."""
        if self._outdir.exists():
            if not self._outdir.is_dir():
                raise InputError(f"Output path exists but is not a directory: {self._outdir}")
        else:
            try:
                self._outdir.mkdir(parents=True, exist_ok=True)
            except OSError as e:
                raise InputError(f"Cannot create output directory: {self._outdir}") from e

        if not os.access(self._outdir, os.W_OK):
            raise InputError(f"Output directory is not writable: {self._outdir}")

    def get_report_path(self) -> Path:
        """Path of the structured report: <outdir>/<basename>.report.json."""
        return self._outdir / f"{self._basename}.report.json"

    def get_moments_csv_path(self, bond_exponent: int) -> Path:
        """Path of the moment table for one r: <outdir>/<basename>.moments.r<r>.csv."""
        return self._outdir / f"{self._basename}.moments.r{bond_exponent}.csv"

    def get_concentration_csv_path(self) -> Path:
        """Path of the per-r concentration table: <outdir>/<basename>.concentration.csv."""
        return self._outdir / f"{self._basename}.concentration.csv"

    def get_summary_path(self) -> Path:
        """Path of the Markdown summary: <outdir>/<basename>.summary.md."""
        return self._outdir / f"{self._basename}.summary.md"

    def get_report_paths(self, bond_exponents: tuple = ()) -> Dict[str, Path]:
        """All report paths of a run keyed by kind ('json', 'concentration',
        'summary', 'moments.r<r>')."""
        paths = {
            "json": self.get_report_path(),
            "concentration": self.get_concentration_csv_path(),
            "summary": self.get_summary_path(),
        }
        for r in bond_exponents:
            paths[f"moments.r{r}"] = self.get_moments_csv_path(r)
        return paths

    @property
    def outdir(self) -> Path:
        return self._outdir

    @property
    def basename(self) -> str:
        """Input file name without extension (e.g. "h1")."""
        return self._basename

    @property
    def input_path(self) -> Path:
        return self._input_path
