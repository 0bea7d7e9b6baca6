"""
Export View.

This module writes reports as CSV or JSON with a run manifest next to each
data file. Numbers use 9 significant digits and a '.' separator regardless
of locale, so regression files diff cleanly.
"""

import csv
import io
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from .. import __version__
from ..exceptions import ExportError
from ..models.reports import EvaluationReport, RunManifest, SweepResult, VerificationReport

logger = logging.getLogger(__name__)

EVALUATION_HEADER = ["n", "m", "copies", "i", "absJ", "delta", "alpha", "qopt", "ratio", "violated"]
SWEEP_HEADER = ["v", "delta", "alpha", "violated"]
BOUNDS_HEADER = ["m", "alpha_m", "qopt", "ratio"]


def format_value(value: Any) -> str:
    """Fixed-precision, locale-independent rendering of one CSV cell."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def _to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(cell) for cell in row])
    return buffer.getvalue()


def evaluation_csv(report: EvaluationReport) -> str:
    """One row per term i."""
    rows = [
        (report.n, report.m, report.copies, i, value, report.delta, report.classical_bound,
         report.quantum_optimum, report.ratio, report.violated)
        for i, value in enumerate(report.per_i_values, start=1)
    ]
    return _to_csv(EVALUATION_HEADER, rows)


def sweep_csv(result: SweepResult) -> str:
    return _to_csv(SWEEP_HEADER, [(p.v, p.delta, result.alpha, p.violated) for p in result.grid])


def bounds_csv(rows: Sequence[Tuple[int, int, float, float]]) -> str:
    return _to_csv(BOUNDS_HEADER, rows)


def report_json(report: BaseModel) -> str:
    return report.model_dump_json(indent=2)


def read_csv(path: Path) -> List[Dict[str, str]]:
    """Rows of an exported CSV file as dictionaries keyed by the header."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            return list(csv.DictReader(fh))
    except OSError as e:
        raise ExportError(str(path), f"cannot read: {e}") from e


def report_to_csv(report: BaseModel) -> str:
    """CSV rendering for the report types that have a tabular form."""
    if isinstance(report, EvaluationReport):
        return evaluation_csv(report)
    if isinstance(report, SweepResult):
        return sweep_csv(report)
    if isinstance(report, VerificationReport):
        return evaluation_csv(report.evaluation)
    raise ExportError(type(report).__name__, "no CSV form for this report type")


def load_report(path: Path) -> BaseModel:
    """Load an exported JSON report, recognizing the report type by its fields."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ExportError(str(path), f"cannot load report: {e}") from e
    if not isinstance(data, dict):
        raise ExportError(str(path), "unrecognized report type")
    if "checks" in data:
        return VerificationReport.model_validate(data)
    if "per_i_values" in data:
        return EvaluationReport.model_validate(data)
    if "grid" in data:
        return SweepResult.model_validate(data)
    raise ExportError(str(path), "unrecognized report type")


def write_text(path: Path, content: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
    except OSError as e:
        raise ExportError(str(path), f"cannot write: {e}") from e
    logger.info(f"Wrote {path}")
    return path


def build_manifest(command: str, parameters: Dict[str, Any], outputs: Sequence[Path],
                   seed: Optional[int] = None, argv: Optional[Sequence[str]] = None) -> RunManifest:
    return RunManifest(
        command=command,
        parameters=parameters,
        argv=list(argv if argv is not None else sys.argv),
        version=__version__,
        seed=seed,
        timestamp=datetime.now(timezone.utc).isoformat(),
        outputs=[str(p) for p in outputs],
    )


def export(report: Any, out: Path, fmt: str, command: str, parameters: Dict[str, Any],
           seed: Optional[int] = None, argv: Optional[Sequence[str]] = None) -> List[Path]:
    """
    Write a report and its manifest.

    Args:
        report: A pydantic report, or bounds rows for the bounds table
        out: Output file path; the manifest goes to <out>.manifest.json
        fmt: 'csv' or 'json'
        command: Command name recorded in the manifest
        parameters: Full parameter set recorded in the manifest
        seed: Seed recorded in the manifest
        argv: Command line recorded in the manifest

    Returns:
        Paths written (data file, manifest)
    """
    out = Path(out)
    if fmt == "csv":
        content = bounds_csv(report) if isinstance(report, list) else report_to_csv(report)
    elif fmt == "json":
        if isinstance(report, list):
            content = json.dumps([dict(zip(BOUNDS_HEADER, row)) for row in report], indent=2)
        else:
            content = report_json(report)
    else:
        raise ExportError(str(out), f"unknown format '{fmt}'")

    data_path = write_text(out, content)
    manifest_path = out.with_name(out.name + ".manifest.json")
    manifest = build_manifest(command, parameters, [data_path], seed=seed, argv=argv)
    write_text(manifest_path, manifest.model_dump_json(indent=2))
    return [data_path, manifest_path]
