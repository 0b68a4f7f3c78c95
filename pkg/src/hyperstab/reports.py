"""Serialization of experiment reports.

JSON reports carry no timestamps or host details, so equal configurations
and seeds give byte-identical files.
"""

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional

from jinja2 import Environment, FileSystemLoader, TemplateNotFound

from hyperstab.experiments import ConcentrationReport, ExperimentReport, MomentReport
from hyperstab.hypergraph import format_subset

logger = logging.getLogger(__name__)

MOMENT_COLUMNS = ["A", "m", "kA", "mean", "exact", "se", "z"]
CONCENTRATION_COLUMNS = ["r", "p_nonzero", "success_fraction", "se"]


def _finite(value: Any) -> Any:
    """Replace NaN and infinities by None so the output is strict JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_finite(v) for v in value]
    return value


def report_to_json(report: ExperimentReport, indent: int = 2) -> str:
    return json.dumps(_finite(report.to_dict()), indent=indent, ensure_ascii=False) + "\n"


def _csv_number(value: float) -> str:
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return repr(value)


def moments_to_csv(moments: MomentReport) -> str:
    """``A,m,kA,mean,exact,se,z`` rows, the first row being ``D_b tr[Psi]`` as ``tr``."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(MOMENT_COLUMNS)
    writer.writerow(
        [
            "tr",
            "",
            "",
            _csv_number(moments.trace_mean),
            _csv_number(1.0),
            _csv_number(moments.trace_se),
            _csv_number(moments.trace_z),
        ]
    )
    for row in moments.rows:
        writer.writerow(
            [
                format_subset(row.subset),
                row.m,
                row.k,
                _csv_number(row.mean),
                _csv_number(row.exact),
                _csv_number(row.se),
                _csv_number(row.z),
            ]
        )
    return buffer.getvalue()


def concentration_to_csv(concentration: ConcentrationReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CONCENTRATION_COLUMNS)
    for row in concentration.rows:
        writer.writerow(
            [
                row.bond_exponent,
                _csv_number(row.p_nonzero),
                _csv_number(row.success_fraction),
                _csv_number(row.success_se),
            ]
        )
    return buffer.getvalue()


def format_number(value: Optional[float], digits: int = 4) -> str:
    """Compact number for summaries; missing or non-finite values print as ``n/a``.

    Examples:
        >>> format_number(0.123456)
        '0.1235'
        >>> format_number(None)
        'n/a'
    """
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return "n/a"
    return f"{value:.{digits}g}"


def load_template(template_name: str, custom_dir: Optional[Path] = None) -> Any:
    """Load a Jinja2 template from a custom directory, the user config or the package.

    Search order (first match wins): ``custom_dir``,
    ``~/.config/hyperstab/templates/``, bundled ``templates/``.
    """
    search_paths: List[Path] = []
    if custom_dir:
        search_paths.append(custom_dir)
    user_config = Path.home() / ".config" / "hyperstab" / "templates"
    if user_config.exists():
        search_paths.append(user_config)
    search_paths.append(Path(__file__).parent / "templates")

    for search_path in search_paths:
        try:
            env = Environment(
                loader=FileSystemLoader(str(search_path)),
                autoescape=False,  # Markdown, not HTML
                trim_blocks=True,
                lstrip_blocks=True,
                keep_trailing_newline=True,
            )
            env.filters["subset"] = format_subset
            env.filters["num"] = format_number
            return env.get_template(template_name)
        except TemplateNotFound:
            continue

    raise TemplateNotFound(
        f"Template '{template_name}' not found in: {', '.join(str(p) for p in search_paths)}"
    )


def render_summary(report: ExperimentReport, custom_dir: Optional[Path] = None) -> str:
    """Human-readable Markdown summary of a run."""
    template = load_template("summary.md", custom_dir)
    return template.render(
        config=report.config.to_dict(),
        terminals=report.mincuts.terminals,
        mincuts=report.mincuts.rows(),
        mincut_check_passed=report.mincut_check_passed,
        moments=report.moments,
        concentration=report.concentration,
        verification=report.verification,
    )


def write_reports(
    report: ExperimentReport, paths: Dict[str, Path], custom_template_dir: Optional[Path] = None
) -> Dict[str, Path]:
    """Write every report file named in ``paths`` (see ``OutputManager.get_report_paths``)."""
    written: Dict[str, Path] = {}
    contents = {
        "json": report_to_json(report),
        "concentration": concentration_to_csv(report.concentration),
        "summary": render_summary(report, custom_template_dir),
    }
    for moments in report.moments:
        contents[f"moments.r{moments.bond_exponent}"] = moments_to_csv(moments)
    for key, path in paths.items():
        if key not in contents:
            continue
        path.write_text(contents[key], encoding="utf-8")
        logger.debug(f"Wrote {key} report to {path}")
        written[key] = path
    return written
