"""Write run reports to disk: JSON, one CSV per table, a Markdown summary and metadata.

The main JSON holds only the deterministic `RunReport`, so identical runs write
identical bytes. Timestamps, durations and resolved settings go to the sibling
`<name>.meta.json`.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import pandas as pd
from pydantic import ValidationError

from burkholder_lab.errors import ConfigurationError
from burkholder_lab.models import RunMetadata, RunReport
from burkholder_lab.reporting.markdown import report_to_markdown
from burkholder_lab.reporting.tables import records_table

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def report_json(report: RunReport, indent: int = 2) -> str:
    payload = report.model_dump(mode="json", by_alias=True)
    return json.dumps(payload, indent=indent, ensure_ascii=False) + "\n"


def write_report(
    report: RunReport,
    directory: Path,
    name: str,
    metadata: RunMetadata | None = None,
    *,
    indent: int = 2,
) -> dict[str, Path]:
    """Write every artifact of a run under `directory`; returns them keyed by kind."""
    directory.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}

    written["json"] = directory / f"{name}.json"
    written["json"].write_text(report_json(report, indent), encoding="utf-8")

    written["records"] = directory / f"{name}.records.csv"
    records_table(report.records).to_csv(
        written["records"], index=False, float_format=CSV_FLOAT_FORMAT
    )
    for table, rows in report.tables.items():
        path = directory / f"{name}.{table}.csv"
        pd.DataFrame(rows).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        written[table] = path

    written["markdown"] = directory / f"{name}.md"
    written["markdown"].write_text(report_to_markdown(report), encoding="utf-8")

    if metadata is not None:
        written["meta"] = directory / f"{name}.meta.json"
        written["meta"].write_text(metadata.model_dump_json(indent=indent) + "\n", encoding="utf-8")

    logger.info("wrote %d report files to %s", len(written), directory)
    return written


def load_report(path: Path) -> RunReport:
    try:
        return RunReport.model_validate_json(path.read_text(encoding="utf-8"))
    except (OSError, ValidationError) as exc:
        raise ConfigurationError(f"cannot read report {path}: {exc}") from exc
