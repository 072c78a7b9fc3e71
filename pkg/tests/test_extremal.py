"""The Lehto family: pointwise derivatives, radial integrals and the discretised field."""

from __future__ import annotations

import math

import numpy as np
import pytest

from burkholder_lab.errors import DomainError
from burkholder_lab.extremal import (
    LehtoParams,
    absolute_U_mass,
    integral_U_lehto,
    integral_Umin_lehto,
    lehto_field,
    lehto_integrals,
    lehto_lp_norms,
    lehto_moduli,
    lehto_ratio,
    lehto_value,
    lehto_wirtinger,
)
from burkholder_lab.functions import PlanePoint


@pytest.mark.parametrize(("theta", "p"), [(0.0, 3.0), (1.0, 3.0), (0.5, 1.5)])
def test_parameters_outside_the_family_are_rejected(theta, p):
    with pytest.raises(DomainError):
        LehtoParams.of(theta, p)


def test_value_is_continuous_across_the_unit_circle():
    params = LehtoParams.of(0.6, 3.0)
    for angle in np.linspace(0.0, 2.0 * np.pi, 7):
        inside = lehto_value(params, PlanePoint.from_complex((1.0 - 1e-9) * np.exp(1j * angle)))
        outside = lehto_value(params, PlanePoint.from_complex((1.0 + 1e-9) * np.exp(1j * angle)))
        assert abs(inside.to_complex() - outside.to_complex()) < 1e-8


def test_moduli_on_both_branches():
    params = LehtoParams.of(0.5, 4.0)
    dbar, d = lehto_moduli(params, np.array([0.25, 2.0]))
    scale = 0.25 ** (-params.exponent)
    np.testing.assert_allclose(dbar, [0.125 * scale, 0.25])
    np.testing.assert_allclose(d, [0.875 * scale, 0.0])
    with pytest.raises(DomainError):
        lehto_moduli(params, 0.0)


def test_doubled_wirtinger_derivatives_have_twice_the_standard_moduli():
    params = LehtoParams.of(0.3, 3.0)
    z = PlanePoint(0.3, -0.2)
    dbar, d = lehto_wirtinger(params, z)
    standard_dbar, standard_d = lehto_moduli(params, z.norm)
    assert dbar.norm == pytest.approx(2.0 * float(standard_dbar))
    assert d.norm == pytest.approx(2.0 * float(standard_d))
    with pytest.raises(DomainError):
        lehto_wirtinger(params, PlanePoint(0.0, 0.0))


@pytest.mark.parametrize("p", [2.0, 3.0, 6.0])
@pytest.mark.parametrize("theta", [0.1, 0.5, 0.9])
def test_quadrature_ratio_matches_the_closed_form(theta, p):
    params = LehtoParams.of(theta, p)
    numeric, closed = lehto_ratio(params)
    assert numeric == pytest.approx(closed, rel=1e-8)
    d_norm, dbar_norm = lehto_lp_norms(params)
    assert d_norm / dbar_norm == pytest.approx(closed, rel=1e-12)


def test_ratio_is_one_in_the_hilbert_case():
    assert lehto_ratio(LehtoParams.of(0.7, 2.0))[1] == pytest.approx(1.0)


def test_ratio_approaches_p_minus_one_as_theta_tends_to_one():
    _, closed = lehto_ratio(LehtoParams.of(0.9999, 4.0))
    assert closed < 3.0
    assert closed == pytest.approx(3.0, abs=1e-2)


@pytest.mark.parametrize("theta", [0.2, 0.8])
def test_integral_of_u_cancels(theta):
    params = LehtoParams.of(theta, 3.0)
    assert abs(integral_U_lehto(params)) <= 1e-8 * absolute_U_mass(params)


@pytest.mark.parametrize("theta", [0.2, 0.5, 0.8])
def test_integral_of_the_minimal_majorant_is_free_of_theta(theta):
    numeric, closed = integral_Umin_lehto(LehtoParams.of(theta, 3.0))
    assert numeric == pytest.approx(closed, rel=1e-7)
    assert closed == pytest.approx(math.pi * (3.0 * (2.0 / 3.0) ** 2 - 4.0))


@pytest.mark.parametrize("theta", [0.3, 0.7])
def test_two_level_errors_are_small_and_non_negative(theta):
    params = LehtoParams.of(theta, 3.0)
    integrals = lehto_integrals(params)
    assert integrals.ratio.value == pytest.approx(lehto_ratio(params)[0], rel=1e-14)
    for result in (integrals.ratio, integrals.u, integrals.umin):
        assert 0.0 <= result.abserr < 1e-6
    assert abs(integrals.ratio.value - integrals.ratio_closed) <= 1e-8 * integrals.ratio_closed
    assert abs(integrals.u.value) <= 1e-8 * integrals.u_mass
    assert integrals.umin_closed == integral_Umin_lehto(params)[1]


def test_discretised_field_vanishes_outside_its_support(small_grid):
    field = lehto_field(LehtoParams.of(0.5, 3.0), small_grid)
    r = np.abs(small_grid.centred_plane())
    assert np.all(field.values[r >= 6.0 / 16.0] == 0.0)
    assert np.max(np.abs(field.values)) > 0.0
