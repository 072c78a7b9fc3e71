"""Space-time Brownian motion estimate of the projections S_A."""

from __future__ import annotations

import numpy as np
import pytest

from burkholder_lab.errors import DegenerateSpecError, DomainError
from burkholder_lab.martingales.simulate import EnsembleSpec
from burkholder_lab.martingales.spacetime import (
    HeatLadder,
    bilinear,
    spacetime_projection_estimate,
    step_times,
)
from burkholder_lab.multipliers.grid import ComplexField, FrequencyGrid

PROJECT_FIRST = np.diag([1.0, 0.0])


@pytest.fixture
def grid() -> FrequencyGrid:
    return FrequencyGrid(16, 1.0)


@pytest.fixture
def field(grid) -> ComplexField:
    x1, x2 = grid.coordinates()
    return ComplexField(grid, np.sin(2.0 * np.pi * x1) + 0.5 * np.cos(4.0 * np.pi * x2))


@pytest.fixture
def spec() -> EnsembleSpec:
    return EnsembleSpec(paths=40_000, steps=32, horizon=1.0, seed=0, block_count=4)


# --------------------------------------------------------------------------- #
# Interpolation
# --------------------------------------------------------------------------- #


def test_bilinear_is_exact_at_the_nodes(grid, rng):
    values = rng.standard_normal(grid.shape)
    x1, x2 = grid.coordinates()
    nodes = np.column_stack([x1.ravel(), x2.ravel()])
    np.testing.assert_allclose(bilinear(values, grid, nodes), values.ravel(), atol=1e-12)


def test_bilinear_reproduces_linear_data_between_the_nodes(grid, rng):
    x1, x2 = grid.coordinates()
    values = 2.0 * x1 - 3.0 * x2
    positions = rng.uniform(-0.4, 0.4, (50, 2))
    expected = 2.0 * positions[:, 0] - 3.0 * positions[:, 1]
    np.testing.assert_allclose(bilinear(values, grid, positions), expected, atol=1e-12)


def test_ladder_needs_two_levels_and_starts_at_the_gradient(field):
    with pytest.raises(DomainError):
        HeatLadder.build(field, 1.0, 1)
    ladder = HeatLadder.build(field, 1.0, 8)
    assert ladder.times[0] == 0.0
    assert ladder.times[-1] == pytest.approx(1.0)
    np.testing.assert_array_equal(ladder.at(0.0), ladder.values[0])
    assert np.max(np.abs(ladder.at(1.0))) < 1e-6 * np.max(np.abs(ladder.values[0]))


def test_step_times_are_refined_towards_the_horizon():
    times = step_times(1.0, 8)
    assert times[0] == 0.0
    assert times[-1] == 1.0
    widths = np.diff(times)
    assert widths.size == 8
    assert np.all(widths > 0.0)
    assert np.all(np.diff(widths[:-1]) < 0.0)


# --------------------------------------------------------------------------- #
# Input checks
# --------------------------------------------------------------------------- #


def test_field_must_have_mean_zero(grid, spec):
    with pytest.raises(DomainError, match="mean zero"):
        spacetime_projection_estimate(
            ComplexField(grid, np.ones(grid.shape)), PROJECT_FIRST, spec
        )


def test_zero_field_is_degenerate(grid, spec):
    with pytest.raises(DegenerateSpecError):
        spacetime_projection_estimate(ComplexField(grid, np.zeros(grid.shape)), np.eye(2), spec)


def test_short_horizons_are_rejected(field):
    short = EnsembleSpec(paths=100, steps=4, horizon=0.01, seed=0)
    with pytest.raises(DomainError, match="horizon too short"):
        spacetime_projection_estimate(field, PROJECT_FIRST, short)


# --------------------------------------------------------------------------- #
# Estimates
# --------------------------------------------------------------------------- #


def test_estimate_recovers_the_projection(field, spec):
    result = spacetime_projection_estimate(field, PROJECT_FIRST, spec)
    x1, _ = field.grid.coordinates()
    np.testing.assert_allclose(result.exact.values, np.sin(2.0 * np.pi * x1), atol=1e-12)
    assert result.coverage == 1.0
    assert result.rel_error < 0.2
    assert int(result.counts.sum()) == spec.paths


def test_estimate_unpacks_and_is_reproducible(field):
    spec = EnsembleSpec(paths=4_000, steps=8, horizon=1.0, seed=9, block_count=2)
    estimated, exact, rel_error = spacetime_projection_estimate(
        field, np.eye(2), spec, min_cell_paths=1
    )
    again = spacetime_projection_estimate(field, np.eye(2), spec, min_cell_paths=1)
    np.testing.assert_array_equal(estimated.values, again.estimated.values)
    np.testing.assert_allclose(exact.values, field.values, atol=1e-12)
    assert rel_error == again.rel_error


def test_uncovered_grids_are_degenerate(field):
    spec = EnsembleSpec(paths=10, steps=2, horizon=1.0, seed=0)
    with pytest.raises(DegenerateSpecError):
        spacetime_projection_estimate(field, np.eye(2), spec, min_cell_paths=1_000)
