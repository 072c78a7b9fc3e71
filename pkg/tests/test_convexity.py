"""Convexity scans: biconcavity, rank-one convexity and the harness self-tests."""

from __future__ import annotations

import numpy as np
import pytest

from burkholder_lab.constants import ExponentContext
from burkholder_lab.convexity import scans
from burkholder_lab.convexity.probes import (
    DirectionalProbe,
    directional_second_diff,
    on_pairs,
    stack_pair,
)
from burkholder_lab.convexity.scans import (
    biconcavity_scan,
    gamma_correspondence_scan,
    negative_control_scan,
    rank_one_scan,
    ratio_consistency_scan,
)
from burkholder_lab.errors import DomainError, NonFiniteError

EXPONENTS = (1.2, 1.5, 2.0, 3.0, 4.0, 8.0)
SAMPLES = 2_000


# --------------------------------------------------------------------------- #
# Finite differences
# --------------------------------------------------------------------------- #


def test_second_difference_of_a_quadratic_is_exact():
    base = np.array([[0.3, -0.1], [0.2, 0.5]])
    direction = np.array([[1.0, 0.0], [0.0, 2.0]])
    probe = DirectionalProbe(base, direction, 1e-2)
    diff = directional_second_diff(lambda z: np.sum(z**2, axis=(-2, -1)), probe)
    assert float(diff.value) == pytest.approx(10.0, rel=1e-8)
    assert not diff.convexity_violations(1e-6)
    assert diff.concavity_violations(1e-6)


def test_violation_tolerance_is_absolute_at_large_function_values():
    base = np.array([[[0.3, -0.1], [0.2, 0.5]]])
    direction = np.array([[[1.0, 0.0], [0.0, 0.0]]])
    probe = DirectionalProbe(base, direction, 1e-2)
    # curvature 2e-4 on top of a value of 1e3
    diff = directional_second_diff(lambda z: 1e3 + 1e-4 * np.sum(z**2, axis=(-2, -1)), probe)
    assert diff.value == pytest.approx([2e-4], rel=1e-2)
    assert diff.concavity_violations(1e-6).tolist() == [True]
    assert diff.concavity_violations(1e-3).tolist() == [False]


def test_on_pairs_splits_the_stacked_layout():
    fn = on_pairs(lambda x, y: x[..., 0] - y[..., 1])
    assert fn(stack_pair(np.array([2.0, 0.0]), np.array([0.0, 5.0]))) == pytest.approx(-3.0)


@pytest.mark.parametrize("step", [1e-1, 1e-8])
def test_probe_step_must_lie_in_range(step):
    with pytest.raises(DomainError):
        DirectionalProbe(np.zeros((2, 2)), np.eye(2), step)


def test_probe_shapes_must_agree():
    with pytest.raises(DomainError):
        DirectionalProbe(np.zeros((2, 2)), np.zeros(2))


def test_non_finite_function_values_raise():
    probe = DirectionalProbe(np.zeros((2, 2)), np.eye(2))
    with pytest.raises(NonFiniteError):
        directional_second_diff(lambda z: np.full(z.shape[:-2], np.inf), probe)


# --------------------------------------------------------------------------- #
# Scans
# --------------------------------------------------------------------------- #


@pytest.mark.parametrize("p", EXPONENTS)
def test_u_is_concave_along_subordinate_directions(p):
    report = biconcavity_scan(ExponentContext(p), SAMPLES, seed=1)
    assert report.passed, report.worst_case_parameters
    assert report.violations == 0


@pytest.mark.parametrize("p", EXPONENTS)
def test_psi_u_is_convex_along_rank_one_lines(p):
    report = rank_one_scan(ExponentContext(p), SAMPLES, seed=2)
    assert report.passed, report.worst_case_parameters
    assert report.samples == SAMPLES


def test_identity_direction_runs_under_its_own_name():
    report = rank_one_scan(ExponentContext(3.0), 500, seed=3, direction="identity")
    assert report.function == "Psi_U(identity direction)"


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_matrix_and_plane_second_differences_cancel(p):
    report = gamma_correspondence_scan(ExponentContext(p), SAMPLES, seed=4)
    assert report.passed
    assert report.max_value < 1e-6


def test_negative_control_is_caught():
    report = negative_control_scan(SAMPLES, seed=5)
    assert report.expect_violations
    assert report.violations > SAMPLES // 2
    assert report.passed


def test_negative_control_needs_a_positive_kappa():
    with pytest.raises(DomainError):
        negative_control_scan(10, seed=0, kappa=0.0)


@pytest.mark.parametrize("p", [3.0, 5.0])
def test_finite_difference_ratio_is_the_constant_alpha(p):
    ctx = ExponentContext(p)
    report = ratio_consistency_scan(ctx, SAMPLES, seed=6)
    assert report.passed
    assert report.worst_case_parameters["mean_ratio"] == pytest.approx(ctx.alpha_p, rel=1e-4)


def test_ratio_scan_is_stated_above_two():
    with pytest.raises(DomainError):
        ratio_consistency_scan(ExponentContext(2.0), 10, seed=0)


def test_ratio_scan_with_nothing_above_the_term_floor_fails(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setattr(scans, "_RATIO_FLOOR", np.inf)
    report = ratio_consistency_scan(ExponentContext(3.0), 50, seed=0)
    assert not report.passed
    assert report.worst_case_parameters["probes_used"] == 0


def test_scans_are_reproducible_from_the_seed():
    ctx = ExponentContext(3.0)
    assert biconcavity_scan(ctx, 300, seed=8) == biconcavity_scan(ctx, 300, seed=8)


def test_non_positive_sample_counts_are_rejected():
    with pytest.raises(DomainError):
        biconcavity_scan(ExponentContext(3.0), 0, seed=0)
