"""CSV and text artifacts of a verification run."""

import csv
import logging
from pathlib import Path
from typing import Union

from ..errors import IoFailure
from ..schemas.reports import SuiteReport, Table

logger = logging.getLogger(__name__)


def format_cell(value) -> str:
    """Floats at 17 significant digits so reruns are byte-identical."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def emit_csv(path: Union[str, Path], table: Table) -> Path:
    """Write a header row and the table rows with LF line endings.

    Raises:
        IoFailure: the file cannot be written.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(table.header)
            writer.writerows([format_cell(v) for v in row] for row in table.rows)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    logger.debug("wrote %s (%d rows)", path, len(table.rows))
    return path


def write_report(path: Union[str, Path], report: SuiteReport) -> Path:
    """Write the rendered check list of one suite.

    Raises:
        IoFailure: the file cannot be written.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.render() + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path


def write_artifacts(output_dir: Union[str, Path], report: SuiteReport) -> list[Path]:
    """Every table of a suite as <output_dir>/<table>.csv, plus <output_dir>/<suite>.txt."""
    root = Path(output_dir)
    written = [emit_csv(root / f"{table.name}.csv", table) for table in report.tables]
    written.append(write_report(root / f"{report.suite}.txt", report))
    return written
