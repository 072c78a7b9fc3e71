"""Monte Carlo estimate of the projection S_A f through space-time Brownian motion.

Brownian paths start uniformly on the torus of the grid and run for time T.
Along each path the heat martingale V_f(B_s, T - s) is transformed by the
constant matrix A, and the transforms are averaged over the paths that end in
each grid cell. The average approximates the multiplier with symbol
(A xi . xi) / |xi|^2 applied to f, which the FFT engine computes exactly.

The gradient of V_f is precomputed on a geometric ladder of times and
interpolated: linearly in time, bilinearly in space. The Euler steps are
refined geometrically towards T, and each step reads the gradient at the time
its increment ends, which makes the sum a midpoint rule for the heat decay.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from burkholder_lab.errors import DegenerateSpecError, DomainError
from burkholder_lab.martingales.simulate import EnsembleSpec
from burkholder_lab.multipliers.grid import ComplexField, FrequencyGrid, apply_symbol
from burkholder_lab.multipliers.symbols import (
    symbol_constant_matrix,
    symbol_gradient,
    symbol_heat,
)
from burkholder_lab.sampling import block_sizes, map_blocks
from burkholder_lab.settings import get_settings

logger = logging.getLogger(__name__)

# The ladder starts at this fraction of T after the t = 0 level.
_LADDER_START = 1e-4
_MEAN_TOL = 1e-9
# |grad V_f(., T)| relative to |grad f| above which T is too short.
_UNIFORM_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class SpacetimeEstimate:
    estimated: ComplexField
    exact: ComplexField
    rel_error: float
    coverage: float
    counts: np.ndarray

    def __iter__(self):
        return iter((self.estimated, self.exact, self.rel_error))


@dataclass(frozen=True, eq=False)
class HeatLadder:
    """grad V_f at a few times; values has shape (times, 2, n, n)."""

    grid: FrequencyGrid
    times: np.ndarray
    values: np.ndarray

    @classmethod
    def build(cls, f: ComplexField, horizon: float, levels: int) -> HeatLadder:
        if levels < 2:
            raise DomainError(f"the time ladder needs at least two levels, got {levels}")
        times = np.concatenate(
            [[0.0], np.geomspace(_LADDER_START * horizon, horizon, levels - 1)]
        )
        gradients = [symbol_gradient(f.grid, j) for j in (1, 2)]
        values = np.empty((times.size, 2, *f.grid.shape), dtype=complex)
        for i, t in enumerate(times):
            heat = symbol_heat(f.grid, float(t))
            for j, gradient in enumerate(gradients):
                values[i, j] = apply_symbol(f, gradient * heat).values
        return cls(f.grid, times, values)

    def at(self, t: float) -> np.ndarray:
        """Linear interpolation in time; shape (2, n, n)."""
        i = int(np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, self.times.size - 2))
        t0, t1 = self.times[i], self.times[i + 1]
        w = float(np.clip((t - t0) / (t1 - t0), 0.0, 1.0))
        return (1.0 - w) * self.values[i] + w * self.values[i + 1]


def step_times(horizon: float, steps: int) -> np.ndarray:
    """Step boundaries 0 = t_0 < ... < t_steps = T, with T - t_k geometric until the last step."""
    remaining = np.geomspace(horizon, _LADDER_START * horizon, steps)
    return horizon - np.concatenate([remaining, [0.0]])


def _fractional_index(grid: FrequencyGrid, positions: np.ndarray) -> np.ndarray:
    """Positions on the torus as fractional cell indices in [0, n)."""
    return np.mod(positions / grid.spacing + grid.size // 2, grid.size)


def bilinear(field: np.ndarray, grid: FrequencyGrid, positions: np.ndarray) -> np.ndarray:
    """Periodic bilinear interpolation of an (..., n, n) array at (m, 2) positions."""
    u = _fractional_index(grid, positions)
    i0 = np.floor(u).astype(int)
    frac = u - i0
    i0 %= grid.size
    i1 = (i0 + 1) % grid.size
    fx, fy = frac[:, 0], frac[:, 1]
    return (
        (1.0 - fx) * (1.0 - fy) * field[..., i0[:, 0], i0[:, 1]]
        + fx * (1.0 - fy) * field[..., i1[:, 0], i0[:, 1]]
        + (1.0 - fx) * fy * field[..., i0[:, 0], i1[:, 1]]
        + fx * fy * field[..., i1[:, 0], i1[:, 1]]
    )


def _check_field(f: ComplexField, ladder: HeatLadder) -> None:
    scale = float(np.max(np.abs(f.values)))
    if scale == 0.0:
        raise DegenerateSpecError("the input field is identically zero")
    if abs(complex(np.mean(f.values))) > _MEAN_TOL * scale:
        raise DomainError("the input field must have mean zero")
    start = float(np.max(np.abs(ladder.values[0])))
    end = float(np.max(np.abs(ladder.values[-1])))
    if end > _UNIFORM_TOL * start:
        raise DomainError(
            f"horizon too short: |grad V_f(., T)| is {end / start:.2e} of |grad f|"
        )


def _run_block(
    ladder: HeatLadder,
    a: np.ndarray,
    spec: EnsembleSpec,
    rng: np.random.Generator,
    n: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell sums of the transformed martingale, and per-cell path counts."""
    grid = ladder.grid
    cells = grid.size * grid.size
    times = step_times(spec.horizon, spec.steps)
    b = rng.uniform(-0.5, 0.5, (n, 2)) * grid.box_length
    transform = np.zeros(n, dtype=complex)
    for k in range(spec.steps):
        db = rng.standard_normal((n, 2)) * math.sqrt(times[k + 1] - times[k])
        # still a function of b at the start of the step
        gradient = np.einsum("ij,jxy->ixy", a, ladder.at(spec.horizon - times[k + 1]))
        transform += np.sum(bilinear(gradient, grid, b).T * db, axis=1)
        b = b + db
    ends = np.rint(_fractional_index(grid, b)).astype(int) % grid.size
    flat = ends[:, 0] * grid.size + ends[:, 1]
    sums = np.bincount(flat, weights=transform.real, minlength=cells) + 1j * np.bincount(
        flat, weights=transform.imag, minlength=cells
    )
    return sums, np.bincount(flat, minlength=cells)


def spacetime_projection_estimate(
    f: ComplexField,
    a: np.ndarray,
    spec: EnsembleSpec,
    *,
    min_cell_paths: int | None = None,
    ladder_levels: int | None = None,
) -> SpacetimeEstimate:
    """Estimate S_A f on the grid cells and compare it with the FFT-exact multiplier.

    The horizon is `spec.horizon`. rel_error is the relative L^2 error over the
    cells reached by at least `min_cell_paths` paths; `coverage` is their share.
    """
    f.grid.require_plane()
    sim = get_settings().sim
    min_cell_paths = sim.min_cell_paths if min_cell_paths is None else min_cell_paths
    ladder_levels = sim.time_ladder if ladder_levels is None else ladder_levels
    a = np.asarray(a, dtype=complex)
    exact = apply_symbol(f, symbol_constant_matrix(f.grid, a))

    ladder = HeatLadder.build(f, spec.horizon, ladder_levels)
    _check_field(f, ladder)

    sizes = block_sizes(spec.paths, spec.block_count)
    blocks = map_blocks(
        lambda b, rng: _run_block(ladder, a, spec, rng, sizes[b]),
        spec.seed,
        spec.block_count,
        workers=get_settings().scan.workers,
    )
    sums = np.zeros(f.grid.size**2, dtype=complex)
    counts = np.zeros(f.grid.size**2, dtype=np.int64)
    for block_sums, block_counts in blocks:
        sums += block_sums
        counts += block_counts

    covered = counts >= min_cell_paths
    if not np.any(covered):
        raise DegenerateSpecError(f"no cell collected {min_cell_paths} paths")
    estimated = np.where(covered, sums / np.maximum(counts, 1), 0.0)
    target = exact.values.reshape(-1)
    norm = float(np.linalg.norm(target[covered]))
    if norm == 0.0:
        raise DegenerateSpecError("the exact projection vanishes on the covered cells")
    rel_error = float(np.linalg.norm(estimated[covered] - target[covered])) / norm
    coverage = float(np.mean(covered))
    if coverage < 1.0:
        logger.warning(
            "%.1f%% of cells have fewer than %d paths", 100.0 * (1.0 - coverage), min_cell_paths
        )
    logger.info("space-time projection: relative L2 error %.4f, coverage %.3f", rel_error, coverage)
    return SpacetimeEstimate(
        estimated=ComplexField(f.grid, estimated.reshape(f.grid.shape)),
        exact=exact,
        rel_error=rel_error,
        coverage=coverage,
        counts=counts.reshape(f.grid.shape),
    )
