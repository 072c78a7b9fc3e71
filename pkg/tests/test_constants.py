"""Sharp constants: closed forms at the points where they are known exactly."""

from __future__ import annotations

import math

import numpy as np
import pytest

from burkholder_lab.constants import (
    ExponentContext,
    beurling_ceilings,
    burkholder_constant,
    catalan,
    choi_bracket,
    choi_cp_approx,
    conformal_constant,
    cot_asymptotic_ratio,
    cot_constant,
    csc_constant,
    davis_d1,
    dirichlet_beta,
    gamma,
    imaginary_power_bounds,
    loggamma,
    matrix_operator_norm,
    osekowski_c1p,
    osekowski_cpinf,
    p_star,
    projection_bound,
    right_conformal_constant,
    sigma_p,
    subordinate_vector_constant,
    weak_dp,
    weak_subordinate_constant,
)
from burkholder_lab.errors import DomainError
from burkholder_lab.multipliers.symbols import BEURLING_MATRIX

EXPONENTS = (1.2, 1.5, 2.0, 3.0, 4.0, 8.0)

# --------------------------------------------------------------------------- #
# p* and the transform constant
# --------------------------------------------------------------------------- #


@pytest.mark.parametrize("p", np.linspace(1.05, 20.0, 40))
def test_p_star_is_symmetric_under_conjugation(p):
    assert p_star(p) == pytest.approx(p_star(p / (p - 1.0)), rel=1e-14)


def test_conjugate_exponents_share_the_transform_constant():
    assert burkholder_constant(1.5) == pytest.approx(2.0)
    assert burkholder_constant(3.0) == pytest.approx(2.0)
    assert burkholder_constant(2.0) == 1.0


@pytest.mark.parametrize("p", [1.0, 0.5, -2.0])
def test_exponents_at_or_below_one_are_rejected(p):
    with pytest.raises(DomainError):
        p_star(p)
    with pytest.raises(DomainError):
        ExponentContext(p)


def test_context_alpha_at_two_is_one():
    assert ExponentContext(2.0).alpha_p == pytest.approx(1.0)
    assert ExponentContext(3.0).transform_constant == pytest.approx(2.0)


# --------------------------------------------------------------------------- #
# Series and special values
# --------------------------------------------------------------------------- #


def test_catalan_and_the_davis_constant():
    assert catalan() == pytest.approx(0.9159655941772190, abs=1e-12)
    assert davis_d1() == pytest.approx(1.3468852519994066, abs=1e-12)
    assert davis_d1() == pytest.approx(math.pi**2 / (8.0 * catalan()), rel=1e-15)


def test_dirichlet_beta_at_one_is_a_quarter_of_pi():
    assert dirichlet_beta(1.0) == pytest.approx(math.pi / 4.0, abs=1e-12)


def test_weak_dp_at_one_matches_the_davis_constant():
    assert weak_dp(1.0) == pytest.approx(davis_d1(), abs=1e-8)


def test_weak_dp_is_only_known_up_to_two():
    with pytest.raises(DomainError):
        weak_dp(2.5)


# --------------------------------------------------------------------------- #
# Orthogonal, conformal and weak-type constants
# --------------------------------------------------------------------------- #


def test_hilbert_case_values_at_two():
    assert cot_constant(2.0) == pytest.approx(1.0)
    assert csc_constant(2.0) == pytest.approx(math.sqrt(2.0))


@pytest.mark.parametrize("p", EXPONENTS)
def test_orthogonal_constant_never_exceeds_the_subordinate_one(p):
    assert cot_constant(p) <= burkholder_constant(p) + 1e-12
    assert csc_constant(p) ** 2 - cot_constant(p) ** 2 == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p", [1.001, 1000.0])
def test_cot_ratio_tends_to_two_over_pi_at_both_ends(p):
    assert cot_asymptotic_ratio(p) == pytest.approx(2.0 / math.pi, abs=1e-2)


@pytest.mark.parametrize(("p", "expected"), [(1.0, 2.0), (2.0, 1.0), (3.0, 4.5)])
def test_weak_subordinate_constant_closed_forms(p, expected):
    assert weak_subordinate_constant(p) == pytest.approx(expected)


def test_cpinf_is_one_up_to_two_and_larger_beyond():
    assert osekowski_cpinf(1.5) == 1.0
    assert osekowski_cpinf(2.0) == 1.0
    assert osekowski_cpinf(4.0) > 1.0
    assert osekowski_c1p(4.0 / 3.0) == pytest.approx(osekowski_cpinf(4.0))


def test_conformal_constants_and_their_ranges():
    assert conformal_constant(4.0) == pytest.approx(math.sqrt(6.0))
    assert right_conformal_constant(2.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        conformal_constant(1.5)
    with pytest.raises(DomainError):
        right_conformal_constant(3.0)


def test_vector_constant_returns_bound_and_scale():
    bound, scale = subordinate_vector_constant(3.0, 2)
    assert bound == pytest.approx(2.0)
    assert scale == pytest.approx(math.sqrt(1.5))
    with pytest.raises(DomainError):
        subordinate_vector_constant(3.0, 1)


@pytest.mark.parametrize("p", [4.0, 10.0, 50.0])
def test_choi_approximation_sits_inside_the_bracket_for_large_p(p):
    lower, upper = choi_bracket(p)
    assert lower <= choi_cp_approx(p) <= upper


# --------------------------------------------------------------------------- #
# Beurling-Ahlfors bounds
# --------------------------------------------------------------------------- #


@pytest.mark.parametrize(("p", "expected"), [(2.0, math.sqrt(2.0)), (1.0, math.pi / 2.0)])
def test_sigma_closed_forms(p, expected):
    assert sigma_p(p) == pytest.approx(expected, abs=1e-7)


def test_sigma_tends_to_one():
    assert abs(sigma_p(200.0) - 1.0) < 0.05


@pytest.mark.parametrize("p", EXPONENTS)
def test_every_beurling_ceiling_is_above_the_lower_bound(p):
    ceilings = beurling_ceilings(p)
    assert all(value >= ceilings["lower"] for value in ceilings.values())


def test_conformal_ceilings_only_exist_from_two():
    assert "conformal" not in beurling_ceilings(1.5)
    assert beurling_ceilings(4.0)["conformal"] == pytest.approx(math.sqrt(24.0))


@pytest.mark.parametrize("gamma_", [0.0, 0.3, 1.0, 4.0])
def test_heat_bound_is_never_worse_than_the_poisson_bound(gamma_):
    heat, poisson = imaginary_power_bounds(3.0, gamma_)
    assert heat <= poisson + 1e-12


def test_loggamma_agrees_with_gamma_off_the_real_axis():
    z = 1.5 - 0.7j
    assert np.exp(loggamma(z)) == pytest.approx(gamma(z), rel=1e-12)
    assert gamma(5.0) == pytest.approx(24.0)


def test_beurling_matrix_norms_over_complex_and_real_vectors():
    assert matrix_operator_norm(BEURLING_MATRIX, "complex") == pytest.approx(2.0)
    assert matrix_operator_norm(BEURLING_MATRIX, "real") == pytest.approx(math.sqrt(2.0))
    assert projection_bound(BEURLING_MATRIX, 4.0) == pytest.approx(6.0)
