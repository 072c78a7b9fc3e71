"""Shared test fixtures: an isolated settings cache, seeded generators and small grids.

Everything here is deliberately small. The suites run the same code at full
size from the CLI; the tests pin behaviour on sizes that finish in seconds.
"""

from __future__ import annotations

import numpy as np
import pytest

from burkholder_lab.constants import ExponentContext
from burkholder_lab.multipliers.grid import ComplexField, FrequencyGrid


# --------------------------------------------------------------------------- #
# Settings isolation
# --------------------------------------------------------------------------- #


@pytest.fixture(autouse=True)
def _isolate_settings_cache():
    """Keep the cached settings singleton from leaking between test modules."""
    from burkholder_lab.settings import get_settings

    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


# --------------------------------------------------------------------------- #
# Numerics
# --------------------------------------------------------------------------- #


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def ctx():
    """Factory: `ctx(3.0)` is the ExponentContext for p = 3."""
    return ExponentContext


@pytest.fixture
def small_grid() -> FrequencyGrid:
    return FrequencyGrid(32, 1.0)


@pytest.fixture
def smooth_field(small_grid: FrequencyGrid) -> ComplexField:
    """A mean-zero trigonometric polynomial, resolved exactly on the small grid."""
    x1, x2 = small_grid.coordinates()
    values = np.sin(2.0 * np.pi * x1) + 0.5j * np.cos(4.0 * np.pi * x2) + np.sin(
        2.0 * np.pi * (x1 + 2.0 * x2)
    )
    return ComplexField(small_grid, values)
