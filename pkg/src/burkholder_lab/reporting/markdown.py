"""Render run reports to Markdown.

Plain functions of the report models, so a summary can be checked in tests
without touching the filesystem.
"""

from __future__ import annotations

from typing import Any

from burkholder_lab.models import CheckRecord, RunReport


def _lines(*parts: str) -> str:
    """Join sections, collapsing the blank-line runs that empty sections leave."""
    text = "\n".join(part for part in parts if part is not None)
    while "\n\n\n" in text:
        text = text.replace("\n\n\n", "\n\n")
    return text.strip() + "\n"


def _bullets(heading: str, items: list[str]) -> str:
    if not items:
        return ""
    body = "\n".join(f"- {item}" for item in items)
    return f"\n## {heading}\n\n{body}\n"


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def table_to_markdown(heading: str, rows: list[dict[str, Any]]) -> str:
    if not rows:
        return ""
    columns = list(rows[0])
    header = "| " + " | ".join(columns) + " |"
    rule = "| " + " | ".join("---" for _ in columns) + " |"
    body = "\n".join("| " + " | ".join(_cell(row.get(c)) for c in columns) + " |" for row in rows)
    return f"\n## {heading}\n\n{header}\n{rule}\n{body}\n"


def _record_line(record: CheckRecord) -> str:
    return f"**{record.suite}** {record.failure_message()}"


def report_to_markdown(report: RunReport) -> str:
    status = "passed" if report.passed else f"{len(report.failures)} check(s) failed"
    rows = [
        {
            "suite": r.suite,
            "paper_ref": r.citation,
            "check": r.check,
            "value": r.value,
            "bound": r.bound,
            "pass": r.passed,
        }
        for r in report.records
    ]
    tables = "".join(table_to_markdown(name, table) for name, table in report.tables.items())
    return _lines(
        f"# {report.command} run: {status}\n",
        table_to_markdown("Checks", rows),
        tables,
        _bullets("Failures", [_record_line(r) for r in report.failures]),
    )
