"""Frequency grids, the symbol library and the FFT application of multipliers."""

from __future__ import annotations

import numpy as np
import pytest

from burkholder_lab.errors import GridError
from burkholder_lab.multipliers.grid import (
    ComplexField,
    FrequencyGrid,
    MultiplierSymbolGrid,
    apply_symbol,
    lp_norm,
)
from burkholder_lab.multipliers.symbols import (
    BEURLING_MATRIX,
    ImaginaryPowerKernel,
    symbol_beurling,
    symbol_constant_matrix,
    symbol_gradient,
    symbol_heat,
    symbol_identity,
    symbol_imaginary_power,
    symbol_laplace_heat,
    symbol_laplace_poisson,
    symbol_riesz,
    symbol_riesz_combination,
    symbol_second_riesz,
    symbol_wirtinger,
)


def _off_nyquist(grid: FrequencyGrid) -> np.ndarray:
    mod2 = grid.modulus_squared()
    return (mod2 > 0) & ~grid.nyquist_mask(0) & ~grid.nyquist_mask(1)


# --------------------------------------------------------------------------- #
# Grid
# --------------------------------------------------------------------------- #


@pytest.mark.parametrize("size", [4, 12, 48, 0])
def test_grid_sizes_must_be_powers_of_two_from_eight(size):
    with pytest.raises(GridError):
        FrequencyGrid(size)


def test_forward_and_inverse_transforms_are_mutual_inverses(small_grid, rng):
    values = rng.standard_normal(small_grid.shape) + 1j * rng.standard_normal(small_grid.shape)
    np.testing.assert_allclose(small_grid.inverse(small_grid.forward(values)), values, atol=1e-12)


def test_coordinates_are_centred(small_grid):
    x1, _ = small_grid.coordinates()
    assert x1[small_grid.size // 2, 0] == 0.0
    assert x1[0, 0] == pytest.approx(-0.5)


def test_symbol_shape_must_match_its_grid(small_grid):
    with pytest.raises(GridError):
        MultiplierSymbolGrid(small_grid, np.ones((8, 8)))
    with pytest.raises(GridError):
        MultiplierSymbolGrid(small_grid, np.full(small_grid.shape, np.nan))


def test_lp_norm_of_the_constant_on_the_unit_box(small_grid):
    assert lp_norm(ComplexField(small_grid, np.ones(small_grid.shape)), 3.0) == pytest.approx(1.0)
    with pytest.raises(GridError):
        lp_norm(np.ones(4), 2.0)


# --------------------------------------------------------------------------- #
# Riesz and Beurling-Ahlfors symbols
# --------------------------------------------------------------------------- #


def test_beurling_symbol_is_unimodular_off_the_origin(small_grid):
    values = symbol_beurling(small_grid).values
    mask = _off_nyquist(small_grid)
    np.testing.assert_allclose(np.abs(values[mask]), 1.0, atol=1e-14)
    assert values[0, 0] == 0.0


def test_beurling_is_the_constant_matrix_symbol(small_grid):
    np.testing.assert_allclose(
        symbol_constant_matrix(small_grid, BEURLING_MATRIX).values,
        symbol_beurling(small_grid).values,
        atol=1e-14,
    )
    assert symbol_constant_matrix(small_grid, BEURLING_MATRIX).bound == pytest.approx(2.0)


def test_riesz_combination_with_unit_a_is_the_real_part_of_beurling(small_grid):
    combination = symbol_riesz_combination(small_grid, 1.0, 0.0).values
    expected = symbol_second_riesz(small_grid, 2, 2).values - symbol_second_riesz(
        small_grid, 1, 1
    ).values
    np.testing.assert_allclose(combination, expected, atol=1e-14)


def test_riesz_symbols_are_hermitian_and_beurling_is_not(small_grid):
    assert symbol_riesz(small_grid, 1).is_hermitian()
    assert not symbol_beurling(small_grid).is_hermitian()


def test_coordinate_indices_are_one_based(small_grid):
    with pytest.raises(GridError):
        symbol_riesz(small_grid, 0)
    with pytest.raises(GridError):
        symbol_gradient(small_grid, 3)


def test_beurling_maps_dbar_f_to_d_f(smooth_field):
    grid = smooth_field.grid
    dbar = apply_symbol(smooth_field, symbol_wirtinger(grid, conjugate=True))
    d = apply_symbol(smooth_field, symbol_wirtinger(grid, conjugate=False))
    np.testing.assert_allclose(
        apply_symbol(dbar, symbol_beurling(grid)).values, d.values, atol=1e-9
    )


def test_beurling_is_an_l2_isometry_on_mean_zero_fields(smooth_field):
    image = apply_symbol(smooth_field, symbol_beurling(smooth_field.grid))
    assert lp_norm(image, 2.0) == pytest.approx(lp_norm(smooth_field, 2.0), rel=1e-12)


def test_identity_symbol_leaves_fields_unchanged(smooth_field):
    image = apply_symbol(smooth_field, symbol_identity(smooth_field.grid))
    np.testing.assert_allclose(image.values, smooth_field.values, atol=1e-12)


def test_composition_multiplies_bounds(small_grid):
    composed = symbol_riesz(small_grid, 1) * symbol_beurling(small_grid)
    assert composed.bound == 1.0
    assert composed.within_bound()
    assert composed.scaled(3.0).bound == 3.0


# --------------------------------------------------------------------------- #
# Heat semigroup and imaginary powers
# --------------------------------------------------------------------------- #


def test_heat_symbol_is_a_semigroup(small_grid):
    product = symbol_heat(small_grid, 0.01).values * symbol_heat(small_grid, 0.02).values
    np.testing.assert_allclose(product, symbol_heat(small_grid, 0.03).values, rtol=1e-12)
    np.testing.assert_allclose(symbol_heat(small_grid, 0.0).values, 1.0)
    with pytest.raises(GridError):
        symbol_heat(small_grid, -1.0)


def test_imaginary_power_is_unimodular(small_grid):
    values = symbol_imaginary_power(small_grid, 0.7).values
    mask = small_grid.modulus_squared() > 0
    np.testing.assert_allclose(np.abs(values[mask]), 1.0, atol=1e-14)


@pytest.mark.parametrize("builder", [symbol_laplace_heat, symbol_laplace_poisson])
def test_constant_kernel_gives_the_unit_symbol(small_grid, builder):
    values = builder(small_grid, np.ones_like).values
    mask = small_grid.modulus_squared() > 0
    np.testing.assert_allclose(values[mask], 1.0, atol=1e-9)


def test_numerical_laplace_symbol_matches_the_imaginary_power_closed_form(small_grid):
    kernel = ImaginaryPowerKernel(0.5, "heat")
    numeric = symbol_laplace_heat(small_grid, lambda t: kernel(t)).values
    closed = symbol_laplace_heat(small_grid, kernel).values
    np.testing.assert_allclose(numeric, closed, atol=1e-8)


def test_kernel_rejects_unknown_semigroups():
    with pytest.raises(ValueError):
        ImaginaryPowerKernel(0.5, "wave")
