"""The (seed, block_count) contract and the quadrature wrappers."""

from __future__ import annotations

import numpy as np
import pytest

from burkholder_lab.errors import QuadratureError
from burkholder_lab.quadrature import (
    QuadResult,
    half_density,
    integrate,
    log_trapezoid_nodes,
)
from burkholder_lab.sampling import (
    block_generators,
    block_sizes,
    draw,
    interleave,
    map_blocks,
    unit_ball,
)

# --------------------------------------------------------------------------- #
# Block contract
# --------------------------------------------------------------------------- #


def test_block_generators_are_reproducible_and_distinct():
    first = [rng.random() for rng in block_generators(7, 4)]
    second = [rng.random() for rng in block_generators(7, 4)]
    assert first == second
    assert len(set(first)) == 4


@pytest.mark.parametrize("count", [0, -3])
def test_block_count_must_be_positive(count):
    with pytest.raises(ValueError):
        block_generators(0, count)


def test_block_sizes_follow_the_modulo_rule():
    assert block_sizes(10, 4) == [3, 3, 2, 2]
    assert sum(block_sizes(1001, 16)) == 1001


def test_interleave_puts_row_j_in_block_j_mod_count():
    blocks = [np.array([0, 3, 6]), np.array([1, 4]), np.array([2, 5])]
    np.testing.assert_array_equal(interleave(blocks), np.arange(7))


def test_draw_depends_only_on_seed_and_block_count():
    def sampler(rng, n):
        return rng.standard_normal((n, 2))

    a = draw(3, 8, 101, sampler)
    b = draw(3, 8, 101, sampler)
    assert a.shape == (101, 2)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, draw(4, 8, 101, sampler))


def test_thread_pool_returns_the_same_blocks_as_the_serial_loop():
    def work(index, rng):
        return index, float(rng.standard_normal(1000).sum())

    serial = map_blocks(work, 11, 6, workers=1)
    pooled = map_blocks(work, 11, 6, workers=3)
    assert serial == pooled
    assert [index for index, _ in serial] == list(range(6))


def test_unit_ball_samples_stay_inside(rng):
    points = unit_ball(rng, 2000, dim=3)
    assert points.shape == (2000, 3)
    assert np.all(np.linalg.norm(points, axis=1) <= 1.0 + 1e-12)


# --------------------------------------------------------------------------- #
# Quadrature
# --------------------------------------------------------------------------- #


def test_integrate_returns_value_and_error_estimate():
    result = integrate(np.exp, 0.0, 1.0)
    assert result.value == pytest.approx(np.e - 1.0, abs=1e-12)
    assert (result + QuadResult(1.0, 0.0)).value == pytest.approx(np.e)


def test_integrate_turns_scipy_warnings_into_quadrature_errors():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.sin(100.0 * x), 0.0, 50.0, limit=1)


def test_log_trapezoid_rule_integrates_the_exponential():
    nodes, weights = log_trapezoid_nodes()
    assert len(nodes) % 2 == 1
    assert float(np.sum(weights * np.exp(-nodes))) == pytest.approx(1.0, abs=1e-9)


def test_half_density_rule_agrees_on_a_smooth_integrand():
    nodes, weights = log_trapezoid_nodes()
    coarse = half_density(weights)
    assert float(np.sum(coarse * np.exp(-nodes))) == pytest.approx(1.0, abs=1e-6)
