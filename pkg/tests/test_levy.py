"""Lévy multipliers: stable, Gaussian and compound Poisson data, and the Gaussian floor."""

from __future__ import annotations

import math

import numpy as np
import pytest

from burkholder_lab.errors import DegenerateSpecError, DomainError
from burkholder_lab.multipliers.grid import FrequencyGrid
from burkholder_lab.multipliers.levy import (
    LevySpec,
    StableJumps,
    best_scale_fit,
    gaussian_scale_floor_probe,
    stable_constant,
    symbol_levy,
    symbol_levy_finiteT,
    symbol_sphere_average,
)
from burkholder_lab.multipliers.symbols import symbol_beurling

_S = math.sqrt(0.5)


def _live(grid: FrequencyGrid) -> np.ndarray:
    return (grid.modulus_squared() > 0) & ~grid.nyquist_mask(0) & ~grid.nyquist_mask(1)


# --------------------------------------------------------------------------- #
# Data validation
# --------------------------------------------------------------------------- #


def test_stable_constant_at_one_and_outside_the_range():
    assert stable_constant(1.0) == pytest.approx(math.pi / 2.0)
    assert stable_constant(0.5) == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-12)
    for alpha in (0.0, 2.0):
        with pytest.raises(DomainError):
            stable_constant(alpha)


def test_sphere_atoms_must_be_unit_vectors():
    with pytest.raises(DomainError):
        LevySpec(sphere_atoms=np.array([[2.0, 0.0]]), sphere_weights=np.ones(1))


def test_transforms_must_be_contractions():
    with pytest.raises(DomainError):
        LevySpec(jump_atoms=np.array([[0.1, 0.0]]), jump_weights=np.ones(1), phi=np.array([1.5]))


def test_jumps_at_the_origin_are_rejected():
    with pytest.raises(DomainError):
        LevySpec(jump_atoms=np.zeros((1, 2)), jump_weights=np.ones(1))


def test_an_empty_spec_has_no_symbol(small_grid):
    with pytest.raises(DegenerateSpecError):
        symbol_levy(small_grid, LevySpec())


def test_gaussian_matrix_must_be_non_negative():
    with pytest.raises(DomainError):
        LevySpec.from_gaussian_matrix(np.diag([1.0, -1.0]))


# --------------------------------------------------------------------------- #
# Beurling-Ahlfors as a Lévy multiplier
# --------------------------------------------------------------------------- #


def test_cauchy_jumps_with_double_angle_transform_give_a_third_of_beurling(small_grid):
    spec = LevySpec(stable=StableJumps(1.0, phi=lambda t: np.exp(-2j * t)))
    m = symbol_levy(small_grid, spec)
    mask = _live(small_grid)
    np.testing.assert_allclose(
        m.values[mask], symbol_beurling(small_grid).values[mask] / 3.0, atol=1e-8
    )
    assert m.within_bound()


def test_four_gaussian_directions_give_half_of_beurling(small_grid):
    spec = LevySpec(
        sphere_atoms=np.array([[1.0, 0.0], [0.0, 1.0], [_S, -_S], [_S, _S]]),
        sphere_weights=np.ones(4),
        psi=np.array([1.0, -1.0, 1j, -1j]),
    )
    mask = _live(small_grid)
    np.testing.assert_allclose(
        symbol_levy(small_grid, spec).values[mask],
        symbol_beurling(small_grid).values[mask] / 2.0,
        atol=1e-14,
    )


def test_identity_gaussian_matrix_with_unit_transform_is_the_identity(small_grid):
    m = symbol_levy(small_grid, LevySpec.from_gaussian_matrix(np.eye(2)))
    live = small_grid.modulus_squared() > 0
    np.testing.assert_allclose(m.values[live], 1.0, atol=1e-14)


def test_stable_jumps_along_the_axes_give_a_marcinkiewicz_multiplier(small_grid):
    alpha = 1.2
    spec = LevySpec(stable=StableJumps(alpha, phi=np.array([1.0, 0.0]), directions=np.eye(2)))
    xi1, xi2 = small_grid.frequencies()
    live = small_grid.modulus_squared() > 0
    a, b = np.abs(xi1[live]) ** alpha, np.abs(xi2[live]) ** alpha
    np.testing.assert_allclose(symbol_levy(small_grid, spec).values[live], a / (a + b), atol=1e-14)


def test_sphere_average_with_the_unit_transform_is_one(small_grid):
    m = symbol_sphere_average(small_grid, 3.0, np.ones_like)
    live = small_grid.modulus_squared() > 0
    np.testing.assert_allclose(m.values[live], 1.0, atol=1e-12)
    with pytest.raises(DomainError):
        symbol_sphere_average(small_grid, 0.0, np.ones_like)


# --------------------------------------------------------------------------- #
# Finite horizon
# --------------------------------------------------------------------------- #


@pytest.fixture
def poisson_spec() -> LevySpec:
    return LevySpec(
        jump_atoms=np.array([[0.0707, 0.0], [0.0, 0.0577], [0.0316, 0.0447]]),
        jump_weights=np.array([1.0, 2.0, 0.5]),
        phi=np.array([1.0, -1.0, 1j]),
    )


def test_finite_horizon_multiplier_tends_to_the_stationary_one(small_grid, poisson_spec):
    live = small_grid.modulus_squared() > 0
    np.testing.assert_allclose(
        symbol_levy_finiteT(small_grid, poisson_spec, 1e8).values[live],
        symbol_levy(small_grid, poisson_spec).values[live],
        atol=1e-10,
    )


def test_finite_horizon_multiplier_vanishes_at_time_zero(small_grid, poisson_spec):
    assert np.all(symbol_levy_finiteT(small_grid, poisson_spec, 0.0).values == 0.0)


def test_finite_horizon_needs_a_compound_poisson_spec(small_grid, poisson_spec):
    with pytest.raises(DomainError):
        symbol_levy_finiteT(small_grid, LevySpec.from_gaussian_matrix(np.eye(2)), 1.0)
    with pytest.raises(DomainError):
        symbol_levy_finiteT(small_grid, poisson_spec, -1.0)


# --------------------------------------------------------------------------- #
# Gaussian floor
# --------------------------------------------------------------------------- #


def test_no_gaussian_configuration_beats_the_factor_two():
    report = gaussian_scale_floor_probe(configurations=64, seed=5)
    assert report.reproducing > 0
    assert report.passed
    assert report.min_abs_c >= 2.0 - 1e-3
    assert report.reproducing < report.configurations
    assert report.worst_configuration["residual"] <= 1e-5


_DIRECTIONS = np.linspace(0.0, 2.0 * np.pi, 97, endpoint=False)


def test_a_balanced_square_reaches_the_factor_two():
    angles = np.arange(4) * np.pi / 4.0 + 0.3
    fit = best_scale_fit(angles, np.ones(4), _DIRECTIONS)
    assert fit.residual <= 1e-5
    assert np.all(np.abs(fit.psi) <= 1.0 + 1e-9)
    assert 2.0 - 1e-4 <= fit.abs_c <= 2.0 / math.cos(math.pi / 64) + 1e-4


def test_unbalanced_atoms_cannot_reproduce_the_double_angle_target():
    angles = np.array([0.0, 0.3, 1.0])
    fit = best_scale_fit(angles, np.array([1.0, 0.5, 0.7]), _DIRECTIONS)
    assert fit.kappa < 1e-3


def test_the_fit_never_undercuts_the_floor_on_random_balanced_unions():
    rng = np.random.default_rng(11)
    for _ in range(8):
        base = rng.uniform(0.0, np.pi, 2)
        triangle = np.arange(3) * np.pi / 3 + base[0]
        pentagon = np.arange(5) * np.pi / 5 + base[1]
        angles = np.concatenate([triangle, pentagon])
        weights = np.concatenate([np.full(3, rng.uniform(0.1, 1.0)), np.full(5, 1.0)])
        fit = best_scale_fit(angles, weights, _DIRECTIONS)
        assert fit.kappa > 1e-3
        assert fit.abs_c >= 2.0 - 1e-4


def test_the_floor_search_needs_room_for_a_hexagon():
    with pytest.raises(DomainError):
        gaussian_scale_floor_probe(configurations=4, max_atoms=3)
