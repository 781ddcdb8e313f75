"""CSV and JSON report writers.

Output is deterministic: fixed float formatting, column order taken from
the first row, sorted JSON keys and "\n" line endings, so re-running an
experiment with the same spec reproduces its files byte for byte.
"""

import csv
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from ..messages import LogMessages
from ..models.experiment import ExperimentReport
from ..utils.formatting import format_value, to_jsonable

logger = logging.getLogger(__name__)


def _columns(rows: Sequence[dict[str, Any]]) -> list[str]:
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns


def write_csv(
    path: Path, rows: Sequence[dict[str, Any]], columns: Sequence[str] | None = None
) -> Path:
    """Write rows as a CSV with a header line.

    Args:
        path: Destination file; parent directories are created
        rows: Records to write; missing cells are left empty
        columns: Column order; defaults to first-seen key order

    Returns:
        The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fieldnames = list(columns) if columns is not None else _columns(rows)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: format_value(row.get(key)) for key in fieldnames})
    logger.info(LogMessages.REPORT_WRITTEN, path)
    return path


def write_json(path: Path, payload: dict[str, Any]) -> Path:
    """Write a JSON document with sorted keys and two-space indent."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(to_jsonable(payload), ensure_ascii=False, sort_keys=True, indent=2)
    path.write_text(text + "\n", encoding="utf-8")
    logger.info(LogMessages.REPORT_WRITTEN, path)
    return path


def summary_payload(report: ExperimentReport) -> dict[str, Any]:
    """Summary document of a report; CSV paths are relative to the summary."""
    base = report.summary_path.parent
    return {
        "experiment": report.spec.name,
        "spec": report.spec.to_dict(),
        "params": report.params,
        "files": {
            name: path.relative_to(base).as_posix()
            for name, path in sorted(report.csv_paths.items())
        },
        "checks": [check.to_dict() for check in report.checks],
        "passed": report.passed,
    }


def write_summary(report: ExperimentReport) -> Path:
    """Write the summary JSON of a report to report.summary_path."""
    return write_json(report.summary_path, summary_payload(report))
