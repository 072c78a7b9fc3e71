"""The single source of configuration.

Every tolerance, node count, default sample size and output path the lab uses is
declared here once, typed, and overridable from the environment. Numerical
modules take explicit keyword arguments and fall back to these values only when
the caller leaves them out, so a test can pin a number without touching the
environment.

Layout
------
    Settings
    ├── quad → QuadratureSettings  (env prefix `QUAD__`)  series and quad tolerances
    ├── scan → ScanSettings        (env prefix `SCAN__`)  scan sizes and tolerance
    ├── sim  → SimulationSettings  (env prefix `SIM__`)   Monte Carlo ensemble shape
    ├── grid → GridSettings        (env prefix `GRID__`)  FFT grid defaults, probe trials
    └── app  → AppSettings         (env prefix `APP__`)   logging and report output

Nested values use `__` as the separator, so the scan tolerance is
`SCAN__TOLERANCE`. See `.env.example` for the full list.

This module imports nothing from the rest of the package.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Literal

from dotenv import load_dotenv
from pydantic import AliasChoices, BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]

_PROJECT_ROOT = Path(__file__).resolve().parents[2]
# Repo checkout first, then the working directory (which wins if both exist).
_ENV_FILES = (_PROJECT_ROOT / ".env", Path(".env"))


def _config(prefix: str) -> SettingsConfigDict:
    """Shared settings config; only the env prefix differs per section."""
    return SettingsConfigDict(
        env_prefix=prefix,
        env_nested_delimiter="__",
        env_file=_ENV_FILES,
        env_file_encoding="utf-8",
        extra="ignore",
    )


# --------------------------------------------------------------------------- #
# Quadrature
# --------------------------------------------------------------------------- #


class QuadratureSettings(BaseSettings):
    """Tolerances and node sets shared by the constants, symbols and Lehto integrals."""

    model_config = _config("QUAD__")

    # Alternating series stop once the next term drops below this.
    series_tol: float = 1e-14

    epsabs: float = 1e-13
    epsrel: float = 1e-12
    limit: int = 200

    # Periodic trapezoid for sigma(p); a multiple of 4 puts the |cos| kinks on nodes.
    sigma_nodes: int = 16384

    # Log-substituted trapezoid for Laplace-transform-type symbols: s = log(u) on
    # [log_min, log_max] with spacing `laplace_step`, checked against the half-density rule.
    laplace_log_min: float = -36.0
    laplace_log_max: float = 4.0
    laplace_step: float = 0.05
    laplace_tol: float = 1e-9

    # Gauss-Legendre nodes over the unit circle, split evenly over the two half circles.
    sphere_nodes: int = 1024

    # Radial cut for the Lehto outer region; the tail beyond it is added analytically.
    lehto_r_cut: float = 64.0

    @field_validator("sigma_nodes", "sphere_nodes")
    @classmethod
    def _even_node_count(cls, value: int) -> int:
        if value < 8 or value % 4:
            raise ValueError("node counts must be a positive multiple of 4 (at least 8)")
        return value


# --------------------------------------------------------------------------- #
# Property scans
# --------------------------------------------------------------------------- #


class ScanSettings(BaseSettings):
    """Sizes and tolerances for the convexity and function-identity scans."""

    model_config = _config("SCAN__")

    samples: int = 100_000
    seed: int = 0
    block_count: int = 16
    workers: int = 1

    tolerance: float = 1e-6
    # Finite-difference step for concavity scans; the unit-ball sampling keeps the
    # curvature scale O(1), so this step is far from the rounding floor.
    step: float = 1e-2
    ratio_step: float = 1e-3
    negative_control_kappa: float = 10.0

    @field_validator("step", "ratio_step")
    @classmethod
    def _step_in_range(cls, value: float) -> float:
        if not 1e-6 <= value <= 1e-2:
            raise ValueError("finite-difference steps must lie in [1e-6, 1e-2]")
        return value


# --------------------------------------------------------------------------- #
# Monte Carlo
# --------------------------------------------------------------------------- #


class SimulationSettings(BaseSettings):
    """Euler-scheme ensemble defaults for the stochastic-integral experiments."""

    model_config = _config("SIM__")

    paths: int = 100_000
    steps: int = 1_000
    horizon: float = 1.0
    dimension: int = 2
    block_count: int = 16

    bootstrap: int = 200
    stderr_multiplier: float = 3.0

    # Space-time projection: cells with fewer terminal paths are reported as starved.
    min_cell_paths: int = 20
    time_ladder: int = 48


# --------------------------------------------------------------------------- #
# Grids
# --------------------------------------------------------------------------- #


class GridSettings(BaseSettings):
    """FFT grid defaults and probe sizes."""

    model_config = _config("GRID__")

    size: int = 64
    box_length: float = 1.0
    boundary_layer: int = 4
    probe_trials: int = 24
    refine_steps: int = 8


# --------------------------------------------------------------------------- #
# App
# --------------------------------------------------------------------------- #


class AppSettings(BaseSettings):
    """Logging and report output."""

    model_config = _config("APP__")

    log_level: LogLevel = Field(
        "INFO", validation_alias=AliasChoices("APP__LOG_LEVEL", "LOG_LEVEL")
    )
    log_to_file: bool = False
    report_dir: Path = Path("reports")
    json_indent: int = 2


# --------------------------------------------------------------------------- #
# Access
# --------------------------------------------------------------------------- #


class Settings(BaseModel):
    """The whole configuration tree; reach it through `get_settings()`."""

    quad: QuadratureSettings
    scan: ScanSettings
    sim: SimulationSettings
    grid: GridSettings
    app: AppSettings


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings, built once on first use."""
    return Settings(
        quad=QuadratureSettings(),
        scan=ScanSettings(),
        sim=SimulationSettings(),
        grid=GridSettings(),
        app=AppSettings(),
    )


def reload_settings() -> Settings:
    """Rebuild settings from the current environment (used by tests)."""
    get_settings.cache_clear()
    return get_settings()
