"""Pydantic schemas for runs and reports, the typed shape of everything the CLI writes.

A report is a flat list of `CheckRecord`s. Each record names the suite that
produced it, the `paper_ref` citation of the result being checked (an equation,
theorem or section label), the observed value and the bound it was held to, and
whether it passed. A short descriptive name of the check rides along in
`details["check"]`. Anything that varies between identical re-runs (timestamps,
durations) lives in `RunMetadata`, which is written to a separate file.

This module imports nothing from the rest of the package.
"""

from __future__ import annotations

from enum import StrEnum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# --------------------------------------------------------------------------- #
# Run configuration
# --------------------------------------------------------------------------- #


class Command(StrEnum):
    CONSTANTS = "constants"
    VERIFY = "verify"
    MULTIPLIER = "multiplier"
    LEHTO = "lehto"
    SIMULATE = "simulate"
    QUASICONVEX = "quasiconvex"
    PROBE = "probe"


# Commands whose output depends on a random stream; they must carry a seed.
STOCHASTIC_COMMANDS = frozenset(
    {Command.VERIFY, Command.SIMULATE, Command.QUASICONVEX, Command.PROBE}
)


class RunConfig(BaseModel):
    """One CLI invocation after flags, the optional JSON file and settings are merged."""

    model_config = ConfigDict(extra="forbid")

    command: Command
    p_list: list[float] = Field(default_factory=lambda: [2.0])
    seed: int | None = None

    samples: int | None = None
    grid: int | None = None
    paths: int | None = None
    steps: int | None = None
    tolerance: float | None = None

    suite: str = "all"
    kind: str | None = None
    symbol: str | None = None
    theta: list[float] = Field(default_factory=list)

    input_path: Path | None = None
    output_path: Path | None = None

    @field_validator("p_list")
    @classmethod
    def _exponents_above_one(cls, value: list[float]) -> list[float]:
        if not value:
            raise ValueError("at least one exponent is required")
        bad = [p for p in value if not p > 1]
        if bad:
            raise ValueError(f"every exponent must exceed 1, got {bad}")
        return value

    @field_validator("samples", "grid", "paths", "steps")
    @classmethod
    def _positive_sizes(cls, value: int | None) -> int | None:
        if value is not None and value <= 0:
            raise ValueError("sizes must be positive")
        return value

    @field_validator("tolerance")
    @classmethod
    def _positive_tolerance(cls, value: float | None) -> float | None:
        if value is not None and not value > 0:
            raise ValueError("tolerance must be positive")
        return value

    @model_validator(mode="after")
    def _stochastic_needs_seed(self) -> RunConfig:
        if self.command in STOCHASTIC_COMMANDS and self.seed is None:
            raise ValueError(f"{self.command} needs a seed")
        if self.input_path is not None and not self.input_path.exists():
            raise ValueError(f"input file does not exist: {self.input_path}")
        return self


# --------------------------------------------------------------------------- #
# Reports
# --------------------------------------------------------------------------- #


class CheckRecord(BaseModel):
    """One checked property. Serialises with the keys `paper_ref` and `pass`."""

    model_config = ConfigDict(populate_by_name=True)

    suite: str
    citation: str = Field(alias="paper_ref")
    value: float | None = None
    bound: float | None = None
    passed: bool = Field(alias="pass")
    # Free-form context: p, sample counts, worst-case parameters.
    details: dict[str, Any] = Field(default_factory=dict)

    @property
    def check(self) -> str:
        return str(self.details.get("check", ""))

    def failure_message(self) -> str:
        """E.g. "eq. (sub2) supermartingale-monotonicity violated: 3 (bound 0)"."""
        subject = " ".join(part for part in (self.citation, self.check) if part)
        observed = "" if self.value is None else f": {self.value:.10g}"
        bound = "" if self.bound is None else f" (bound {self.bound:.10g})"
        return f"{subject} violated{observed}{bound}"


class RunReport(BaseModel):
    """The deterministic part of a run: its records and the tables it produced."""

    command: Command
    records: list[CheckRecord] = Field(default_factory=list)
    # Table name -> list of row dicts; rendered to CSV and Markdown by the reporting layer.
    tables: dict[str, list[dict[str, Any]]] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(record.passed for record in self.records)

    @property
    def failures(self) -> list[CheckRecord]:
        return [record for record in self.records if not record.passed]


class RunMetadata(BaseModel):
    """Everything that legitimately changes between identical re-runs."""

    version: str = ""
    started_at: str = ""
    finished_at: str = ""
    duration_seconds: float = 0.0
    argv: list[str] = Field(default_factory=list)
    settings: dict[str, Any] = Field(default_factory=dict)
