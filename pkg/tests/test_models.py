"""Run configuration and report schemas."""

from __future__ import annotations

import json

import pytest
from pydantic import ValidationError

from burkholder_lab.models import CheckRecord, Command, RunConfig, RunMetadata, RunReport


def _record(passed: bool, check: str = "check") -> CheckRecord:
    return CheckRecord(
        suite="unit",
        citation="eq. (u)",
        value=1.0,
        bound=2.0,
        passed=passed,
        details={"check": check},
    )


# --------------------------------------------------------------------------- #
# RunConfig
# --------------------------------------------------------------------------- #


def test_defaults_give_a_single_hilbert_exponent():
    config = RunConfig(command=Command.CONSTANTS)
    assert config.p_list == [2.0]
    assert config.suite == "all"
    assert config.seed is None


@pytest.mark.parametrize("p_list", [[], [1.0], [3.0, 0.5]])
def test_exponents_must_exceed_one(p_list):
    with pytest.raises(ValidationError):
        RunConfig(command=Command.CONSTANTS, p_list=p_list)


@pytest.mark.parametrize("field", ["samples", "grid", "paths", "steps"])
def test_sizes_must_be_positive(field):
    with pytest.raises(ValidationError, match="sizes must be positive"):
        RunConfig(command=Command.CONSTANTS, **{field: 0})


def test_tolerance_must_be_positive():
    with pytest.raises(ValidationError):
        RunConfig(command=Command.CONSTANTS, tolerance=0.0)


@pytest.mark.parametrize(
    "command", [Command.VERIFY, Command.SIMULATE, Command.QUASICONVEX, Command.PROBE]
)
def test_stochastic_commands_need_a_seed(command):
    with pytest.raises(ValidationError, match="needs a seed"):
        RunConfig(command=command)
    assert RunConfig(command=command, seed=0).seed == 0


def test_deterministic_commands_run_without_a_seed():
    assert RunConfig(command=Command.LEHTO, theta=[0.5]).theta == [0.5]


def test_input_file_must_exist(tmp_path):
    with pytest.raises(ValidationError, match="does not exist"):
        RunConfig(command=Command.MULTIPLIER, input_path=tmp_path / "missing.csv")
    present = tmp_path / "field.csv"
    present.write_text("x1,x2,re,im\n", encoding="utf-8")
    assert RunConfig(command=Command.MULTIPLIER, input_path=present).input_path == present


def test_unknown_keys_are_rejected():
    with pytest.raises(ValidationError):
        RunConfig(command=Command.CONSTANTS, exponent=3.0)


def test_command_is_parsed_from_its_name():
    assert RunConfig.model_validate({"command": "lehto"}).command is Command.LEHTO


# --------------------------------------------------------------------------- #
# Reports
# --------------------------------------------------------------------------- #


def test_check_record_serialises_pass_under_its_alias():
    dumped = _record(True).model_dump(by_alias=True)
    assert dumped["pass"] is True
    assert "passed" not in dumped
    assert dumped["paper_ref"] == "eq. (u)"
    assert "citation" not in dumped
    assert CheckRecord.model_validate(dumped).passed


def test_check_record_accepts_either_name():
    by_alias = CheckRecord.model_validate({"suite": "s", "paper_ref": "r", "pass": False})
    assert not by_alias.passed
    assert by_alias.citation == "r"
    assert by_alias.details == {}


def test_report_passes_only_when_every_record_does():
    report = RunReport(command=Command.VERIFY, records=[_record(True), _record(False, "bad")])
    assert not report.passed
    assert [r.check for r in report.failures] == ["bad"]
    assert RunReport(command=Command.VERIFY).passed


def test_report_json_round_trips_through_the_alias():
    report = RunReport(
        command=Command.LEHTO,
        records=[_record(False)],
        tables={"lehto": [{"p": 3.0, "theta": 0.5}]},
    )
    payload = report.model_dump_json(by_alias=True)
    assert json.loads(payload)["records"][0]["pass"] is False
    assert RunReport.model_validate_json(payload) == report


def test_metadata_defaults_are_empty():
    metadata = RunMetadata()
    assert metadata.argv == []
    assert metadata.duration_seconds == 0.0


def test_failure_message_names_the_reference_and_the_check():
    record = CheckRecord(
        suite="functions",
        paper_ref="eq. (sub2)",
        value=3.0,
        bound=0.0,
        passed=False,
        details={"check": "supermartingale-monotonicity"},
    )
    assert record.failure_message() == (
        "eq. (sub2) supermartingale-monotonicity violated: 3 (bound 0)"
    )
    bare = CheckRecord(suite="constants", citation="", passed=False, details={"check": "x"})
    assert bare.failure_message() == "x violated"
