"""Quasiconvexity probes of Psi_U and the Riesz-transform integrands."""

from __future__ import annotations

import numpy as np
import pytest

from burkholder_lab.constants import ExponentContext
from burkholder_lab.convexity.quasiconvex import (
    DeformationField,
    RadialBumpFamily,
    TrigonometricFamily,
    default_families,
    quasiconvexity_functional,
    quasiconvexity_probe,
    riesz_integrand_probe,
)
from burkholder_lab.errors import DomainError, GridError
from burkholder_lab.functions import Matrix2
from burkholder_lab.multipliers.grid import ComplexField, FrequencyGrid


@pytest.fixture
def grid() -> FrequencyGrid:
    return FrequencyGrid(64, 1.0)


# --------------------------------------------------------------------------- #
# Deformations
# --------------------------------------------------------------------------- #


def test_deformation_must_vanish_on_the_boundary_layer(grid):
    values = np.zeros(grid.shape, dtype=complex)
    values[1, 30] = 1.0
    with pytest.raises(GridError, match="boundary layer"):
        DeformationField(grid, values)
    with pytest.raises(GridError):
        DeformationField(grid, np.zeros(grid.shape), boundary_layer=0)


def test_linear_map_has_its_matrix_as_jacobian(grid):
    x1, x2 = grid.coordinates()
    window = (np.abs(x1) < 0.3) & (np.abs(x2) < 0.3)
    values = np.where(window, (2.0 * x1 - x2) + 1j * (0.5 * x2), 0.0)
    jac = DeformationField(grid, values).jacobian()
    inside = jac[32, 32]
    np.testing.assert_allclose(inside, [[2.0, -1.0], [0.0, 0.5]], atol=1e-12)


def test_jacobian_is_the_centred_difference_exact_on_quadratics(grid):
    # a windowed quadratic: spectral derivatives would ring at the window edge
    x1, x2 = grid.coordinates()
    window = (np.abs(x1) < 0.3) & (np.abs(x2) < 0.3)
    values = np.where(window, x1**2 + 1j * x1 * x2, 0.0)
    jac = DeformationField(grid, values).jacobian()
    a, b = x1[36, 30], x2[36, 30]
    np.testing.assert_allclose(jac[36, 30], [[2.0 * a, 0.0], [b, a]], atol=1e-12)


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_every_default_family_respects_the_boundary_layer(grid, rng, p):
    for family in default_families(p):
        values = family.build(grid, family.sample(rng), 4)
        assert DeformationField(grid, values).lipschitz > 0.0


def test_zero_deformation_gives_zero(grid):
    zero = DeformationField(grid, np.zeros(grid.shape))
    assert quasiconvexity_functional(ExponentContext(3.0), Matrix2.identity(), zero) == 0.0


def test_functional_vanishes_at_two_for_every_deformation(grid, rng):
    """At p = 2, Psi_U is -4 det, a null Lagrangian."""
    ctx = ExponentContext(2.0)
    for family in (TrigonometricFamily(), RadialBumpFamily()):
        field = DeformationField(grid, family.build(grid, family.sample(rng), 4))
        assert abs(quasiconvexity_functional(ctx, Matrix2.zero(), field)) < 1e-12


# --------------------------------------------------------------------------- #
# Probe
# --------------------------------------------------------------------------- #


def test_probe_at_two_finds_no_candidate(grid):
    report = quasiconvexity_probe(ExponentContext(2.0), trials=6, seed=3, grid=grid)
    assert report.passed
    assert abs(report.min_q) < 1e-10
    assert report.verified_q is None


def test_probe_is_reproducible(grid):
    ctx = ExponentContext(3.0)
    families = [TrigonometricFamily(), RadialBumpFamily()]
    first = quasiconvexity_probe(ctx, families=families, trials=4, seed=7, grid=grid)
    second = quasiconvexity_probe(ctx, families=families, trials=4, seed=7, grid=grid)
    assert first == second
    assert first.grid_size == 64


def test_probe_rejects_empty_inputs(grid):
    with pytest.raises(DomainError):
        quasiconvexity_probe(ExponentContext(3.0), trials=0, grid=grid)
    with pytest.raises(DomainError):
        quasiconvexity_probe(ExponentContext(3.0), families=[], grid=grid)


# --------------------------------------------------------------------------- #
# Riesz integrands
# --------------------------------------------------------------------------- #


def test_riesz_integrands_are_non_positive_at_two(smooth_field):
    mixed, diagonal = riesz_integrand_probe(smooth_field, ExponentContext(2.0))
    assert mixed <= 1e-12
    assert diagonal <= 1e-12


def test_riesz_integrands_use_the_real_part(smooth_field):
    ctx = ExponentContext(3.0)
    real_only = ComplexField(smooth_field.grid, smooth_field.values.real)
    assert riesz_integrand_probe(smooth_field, ctx) == riesz_integrand_probe(real_only, ctx)
