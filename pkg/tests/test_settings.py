"""Tests for settings.py, the single configuration source.

Two things are worth pinning down here. First, that the documented env names in
`.env.example` actually reach the fields they claim to. Second, that invalid
values fail loudly rather than falling back to a default.

Every settings object is built with `_env_file=None` so the repository's own
`.env` cannot leak into a test; the environment is then controlled explicitly.
"""

from __future__ import annotations

import os
import re
from pathlib import Path

import pytest
from pydantic import ValidationError

from burkholder_lab.settings import (
    AppSettings,
    GridSettings,
    QuadratureSettings,
    ScanSettings,
    SimulationSettings,
    get_settings,
    reload_settings,
)

ENV_EXAMPLE = Path(__file__).resolve().parents[1] / ".env.example"
_PREFIXES = ("QUAD__", "SCAN__", "SIM__", "GRID__", "APP__")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch: pytest.MonkeyPatch):
    """Remove every settings-relevant variable, including the short LOG_LEVEL alias."""
    for name in list(os.environ):
        if name.startswith(_PREFIXES):
            monkeypatch.delenv(name, raising=False)
    monkeypatch.delenv("LOG_LEVEL", raising=False)

    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


# --------------------------------------------------------------------------- #
# Defaults
# --------------------------------------------------------------------------- #


def test_scan_defaults_match_the_documented_tolerance_and_sizes():
    scan = ScanSettings(_env_file=None)
    assert scan.tolerance == 1e-6
    assert scan.samples == 100_000
    assert scan.block_count == 16


def test_simulation_defaults_use_three_standard_errors():
    sim = SimulationSettings(_env_file=None)
    assert sim.stderr_multiplier == 3.0
    assert sim.paths == 100_000
    assert sim.steps == 1_000


def test_quadrature_node_counts_are_multiples_of_four():
    quad = QuadratureSettings(_env_file=None)
    assert quad.sigma_nodes % 4 == 0
    assert quad.sphere_nodes == 1024


def test_app_report_dir_defaults_to_reports():
    app = AppSettings(_env_file=None)
    assert app.report_dir == Path("reports")
    assert app.log_level == "INFO"


# --------------------------------------------------------------------------- #
# Environment overrides
# --------------------------------------------------------------------------- #


def test_prefixed_env_overrides_reach_their_sections(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setenv("SCAN__TOLERANCE", "1e-8")
    monkeypatch.setenv("SIM__PATHS", "5000")
    monkeypatch.setenv("GRID__SIZE", "128")
    assert ScanSettings(_env_file=None).tolerance == 1e-8
    assert SimulationSettings(_env_file=None).paths == 5000
    assert GridSettings(_env_file=None).size == 128


def test_app_accepts_both_prefixed_and_short_log_level(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setenv("LOG_LEVEL", "DEBUG")
    assert AppSettings(_env_file=None).log_level == "DEBUG"
    monkeypatch.setenv("APP__LOG_LEVEL", "WARNING")
    assert AppSettings(_env_file=None).log_level == "WARNING"


def test_unknown_log_level_is_rejected(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setenv("APP__LOG_LEVEL", "VERBOSE")
    with pytest.raises(ValidationError):
        AppSettings(_env_file=None)


@pytest.mark.parametrize("value", ["1e-1", "1e-9"])
def test_finite_difference_step_outside_its_range_is_rejected(
    monkeypatch: pytest.MonkeyPatch, value: str
):
    monkeypatch.setenv("SCAN__STEP", value)
    with pytest.raises(ValidationError):
        ScanSettings(_env_file=None)


def test_sigma_nodes_must_be_a_multiple_of_four(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setenv("QUAD__SIGMA_NODES", "1026")
    with pytest.raises(ValidationError):
        QuadratureSettings(_env_file=None)


def test_every_documented_variable_names_a_real_field():
    """A typo in `.env.example` would otherwise be ignored silently (extra="ignore")."""
    sections = {
        "QUAD__": QuadratureSettings,
        "SCAN__": ScanSettings,
        "SIM__": SimulationSettings,
        "GRID__": GridSettings,
        "APP__": AppSettings,
    }
    names = re.findall(r"^([A-Z_]+)=", ENV_EXAMPLE.read_text(encoding="utf-8"), re.M)
    assert names
    for name in names:
        prefix = next(p for p in sections if name.startswith(p))
        field = name.removeprefix(prefix).lower()
        assert field in sections[prefix].model_fields, f"{name} has no matching field"


# --------------------------------------------------------------------------- #
# Access
# --------------------------------------------------------------------------- #


def test_get_settings_is_cached_and_reload_picks_up_changes(monkeypatch: pytest.MonkeyPatch):
    first = get_settings()
    assert get_settings() is first

    monkeypatch.setenv("SCAN__SAMPLES", "1234")
    assert get_settings().scan.samples == first.scan.samples

    assert reload_settings().scan.samples == 1234
