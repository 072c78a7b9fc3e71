"""Randomised convexity scans of U and of its matrix pullback Psi_U.

Each scan draws its samples under the (seed, block_count) contract of
`burkholder_lab.sampling`: block b generates its share of the probes from its
own substream, blocks run serially or on a thread pool, and the results are
reduced in block order. Counts, extremes and worst cases are therefore the
same whatever the scheduling.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np

from burkholder_lab.constants import ExponentContext
from burkholder_lab.convexity.probes import (
    DirectionalProbe,
    ScanReport,
    SecondDifference,
    directional_second_diff,
    on_pairs,
    stack_pair,
)
from burkholder_lab.errors import DomainError
from burkholder_lab.functions import (
    eval_psi_U,
    eval_U,
    gamma_map,
    rank_one_direction,
    second_order_terms,
)
from burkholder_lab.sampling import block_sizes, map_blocks, unit_ball
from burkholder_lab.settings import get_settings

logger = logging.getLogger(__name__)

# Probes whose -(A+B+C) is smaller than this are left out of the ratio check.
_RATIO_FLOOR = 1e-2
_RATIO_SPREAD = 1e-4
_GAMMA_TOL = 1e-8


@dataclass(frozen=True)
class _Block:
    """One block's probe values, violation flags and the inputs that produced them."""

    values: np.ndarray
    flags: np.ndarray
    inputs: dict[str, np.ndarray]


@dataclass(frozen=True)
class _ScanShape:
    samples: int
    seed: int
    block_count: int
    workers: int
    tolerance: float
    step: float

    @classmethod
    def resolve(
        cls,
        samples: int | None,
        seed: int | None,
        tolerance: float | None = None,
        step: float | None = None,
    ) -> _ScanShape:
        scan = get_settings().scan
        shape = cls(
            samples=scan.samples if samples is None else samples,
            seed=scan.seed if seed is None else seed,
            block_count=scan.block_count,
            workers=scan.workers,
            tolerance=scan.tolerance if tolerance is None else tolerance,
            step=scan.step if step is None else step,
        )
        if shape.samples <= 0:
            raise DomainError(f"samples must be positive, got {shape.samples}")
        return shape


def _run_blocks(
    shape: _ScanShape, block: Callable[[np.random.Generator, int], _Block]
) -> list[_Block]:
    sizes = block_sizes(shape.samples, shape.block_count)
    return map_blocks(
        lambda b, rng: block(rng, sizes[b]), shape.seed, shape.block_count, workers=shape.workers
    )


def _worst_case(blocks: list[_Block], pick: Literal["max", "min"]) -> dict[str, list]:
    best_value, best = None, {}
    for block in blocks:
        if block.values.size == 0:
            continue
        i = int(np.argmax(block.values) if pick == "max" else np.argmin(block.values))
        value = float(block.values[i])
        better = best_value is None or (value > best_value if pick == "max" else value < best_value)
        if better:
            best_value = value
            best = {name: np.asarray(arr[i]).tolist() for name, arr in block.inputs.items()}
    return best


def _report(
    function: str,
    p: float | None,
    shape: _ScanShape,
    blocks: list[_Block],
    pick: Literal["max", "min"],
    *,
    expect_violations: bool = False,
) -> ScanReport:
    values = np.concatenate([block.values for block in blocks])
    violations = int(sum(int(np.count_nonzero(block.flags)) for block in blocks))
    report = ScanReport(
        function=function,
        p=p,
        samples=shape.samples,
        min_value=float(values.min()),
        max_value=float(values.max()),
        violations=violations,
        tolerance=shape.tolerance,
        worst_case_parameters=_worst_case(blocks, pick),
        expect_violations=expect_violations,
    )
    level = logging.INFO if report.passed else logging.WARNING
    logger.log(
        level, "%s scan p=%s: %d violations in %d probes", function, p, violations, shape.samples
    )
    return report


# --------------------------------------------------------------------------- #
# Biconcavity of U
# --------------------------------------------------------------------------- #


def biconcavity_scan(
    ctx: ExponentContext,
    samples: int | None = None,
    seed: int | None = None,
    *,
    tolerance: float | None = None,
) -> ScanReport:
    """Concavity of t -> U(x + th, y + tk) for random x, y, h in the unit disc and |k| <= |h|.

    The report's max_value is the largest second difference seen.
    """
    shape = _ScanShape.resolve(samples, seed, tolerance)
    fn = on_pairs(lambda x, y: eval_U(x, y, ctx))

    def block(rng: np.random.Generator, n: int) -> _Block:
        x, y, h = unit_ball(rng, n), unit_ball(rng, n), unit_ball(rng, n)
        k = np.linalg.norm(h, axis=1, keepdims=True) * unit_ball(rng, n)
        probe = DirectionalProbe(stack_pair(x, y), stack_pair(h, k), shape.step)
        diff = directional_second_diff(fn, probe)
        return _Block(
            diff.value,
            diff.concavity_violations(shape.tolerance),
            {"x": x, "y": y, "h": h, "k": k},
        )

    return _report("U", ctx.p, shape, _run_blocks(shape, block), "max")


# --------------------------------------------------------------------------- #
# Rank-one convexity of Psi_U
# --------------------------------------------------------------------------- #


def _random_matrices(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, (n, 2, 2))


def rank_one_scan(
    ctx: ExponentContext,
    samples: int | None = None,
    seed: int | None = None,
    *,
    tolerance: float | None = None,
    direction: Literal["rank_one", "identity"] = "rank_one",
) -> ScanReport:
    """Convexity of t -> Psi_U(A + tB) for random A and B = h' (x) k'.

    With direction="identity" every B is the identity matrix, a rank-two
    direction rank-one convexity says nothing about; failures there are
    expected and recorded like any other.
    """
    shape = _ScanShape.resolve(samples, seed, tolerance)
    fn = lambda a: eval_psi_U(a, ctx)  # noqa: E731

    def block(rng: np.random.Generator, n: int) -> _Block:
        a = _random_matrices(rng, n)
        if direction == "identity":
            b = np.broadcast_to(np.eye(2), (n, 2, 2)).copy()
        else:
            b, _, _ = rank_one_direction(unit_ball(rng, n), unit_ball(rng, n))
        diff = directional_second_diff(fn, DirectionalProbe(a, b, shape.step))
        return _Block(diff.value, diff.convexity_violations(shape.tolerance), {"A": a, "B": b})

    name = "Psi_U" if direction == "rank_one" else "Psi_U(identity direction)"
    return _report(name, ctx.p, shape, _run_blocks(shape, block), "min")


def gamma_correspondence_scan(
    ctx: ExponentContext,
    samples: int | None = None,
    seed: int | None = None,
) -> ScanReport:
    """Psi_U along A + tB against U along (w + th, z + tk), the gamma_map image of the line.

    The two second differences must cancel to 1e-8 and |h| must equal |k|. The
    report's values are the absolute residuals.
    """
    shape = _ScanShape.resolve(samples, seed, tolerance=_GAMMA_TOL)
    psi = lambda a: eval_psi_U(a, ctx)  # noqa: E731
    u = on_pairs(lambda x, y: eval_U(x, y, ctx))

    def block(rng: np.random.Generator, n: int) -> _Block:
        a = _random_matrices(rng, n)
        b, h, k = rank_one_direction(unit_ball(rng, n), unit_ball(rng, n))
        z, w = gamma_map(a)
        matrix_side = directional_second_diff(psi, DirectionalProbe(a, b, shape.step))
        plane_side = directional_second_diff(
            u, DirectionalProbe(stack_pair(w, z), stack_pair(h, k), shape.step)
        )
        residual = np.abs(matrix_side.central + plane_side.central)
        length_gap = np.abs(np.linalg.norm(h, axis=1) - np.linalg.norm(k, axis=1))
        scale = np.maximum(1.0, np.abs(plane_side.central))
        flags = (residual > _GAMMA_TOL * scale) | (length_gap > 1e-12)
        return _Block(residual, flags, {"A": a, "B": b})

    return _report("gamma_correspondence", ctx.p, shape, _run_blocks(shape, block), "max")


# --------------------------------------------------------------------------- #
# Harness self-tests
# --------------------------------------------------------------------------- #


def negative_control_scan(
    samples: int | None = None,
    seed: int | None = None,
    kappa: float | None = None,
    *,
    tolerance: float | None = None,
) -> ScanReport:
    """Run the rank-one harness on det(A) - kappa |A|^2, which is concave along rank-one lines.

    Along A + tB with B of rank one the determinant is affine in t, so the second
    derivative is -2 kappa |B|^2. The report passes only if violations are found.
    """
    kappa = get_settings().scan.negative_control_kappa if kappa is None else kappa
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    shape = _ScanShape.resolve(samples, seed, tolerance)

    def planted(a: np.ndarray) -> np.ndarray:
        det = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
        return det - kappa * np.sum(a * a, axis=(-2, -1))

    def block(rng: np.random.Generator, n: int) -> _Block:
        a = _random_matrices(rng, n)
        b, _, _ = rank_one_direction(unit_ball(rng, n), unit_ball(rng, n))
        diff = directional_second_diff(planted, DirectionalProbe(a, b, shape.step))
        return _Block(diff.value, diff.convexity_violations(shape.tolerance), {"A": a, "B": b})

    return _report(
        f"det-{kappa}|A|^2", None, shape, _run_blocks(shape, block), "min", expect_violations=True
    )


def ratio_consistency_scan(
    ctx: ExponentContext,
    samples: int | None = None,
    seed: int | None = None,
) -> ScanReport:
    """Finite-difference G''(0) over -(A+B+C) from `second_order_terms`, for p > 2.

    The ratio is the same constant (alpha_p) at every probe. Points keep
    |x|, |y| >= 0.2 so the line stays clear of the kinks of U. One violation is
    recorded when the relative spread of the ratio exceeds 1e-4.
    """
    if ctx.p <= 2.0:
        raise DomainError(f"the ratio check is stated for p > 2, got p={ctx.p}")
    shape = _ScanShape.resolve(samples, seed, step=get_settings().scan.ratio_step)
    fn = on_pairs(lambda x, y: eval_U(x, y, ctx))

    def away_from_origin(rng: np.random.Generator, n: int) -> np.ndarray:
        points = unit_ball(rng, n)
        unit = points / np.linalg.norm(points, axis=1, keepdims=True)
        return unit * rng.uniform(0.2, 1.0, (n, 1))

    def block(rng: np.random.Generator, n: int) -> _Block:
        x, y = away_from_origin(rng, n), away_from_origin(rng, n)
        h, k = unit_ball(rng, n), unit_ball(rng, n)
        diff: SecondDifference = directional_second_diff(
            fn, DirectionalProbe(stack_pair(x, y), stack_pair(h, k), shape.step)
        )
        terms = -np.sum(np.asarray(second_order_terms(x, y, h, k, ctx)), axis=0)
        keep = np.abs(terms) > _RATIO_FLOOR
        ratio = diff.value[keep] / terms[keep]
        inputs = {"x": x[keep], "y": y[keep], "h": h[keep], "k": k[keep]}
        return _Block(ratio, np.zeros(ratio.shape, dtype=bool), inputs)

    blocks = _run_blocks(shape, block)
    ratios = np.concatenate([block.values for block in blocks])
    if ratios.size == 0:
        logger.warning("ratio consistency p=%s: every sample fell below the term floor", ctx.p)
        return ScanReport(
            function="ratio_consistency",
            p=ctx.p,
            samples=shape.samples,
            min_value=0.0,
            max_value=0.0,
            violations=1,
            tolerance=_RATIO_SPREAD,
            worst_case_parameters={"probes_used": 0, "alpha_p": ctx.alpha_p},
        )
    report = _report("ratio_consistency", ctx.p, shape, blocks, "max")
    mean = float(ratios.mean())
    spread = (report.max_value - report.min_value) / abs(mean)
    logger.info("ratio consistency p=%s: mean %.10f, relative spread %.2e", ctx.p, mean, spread)
    return report.model_copy(
        update={
            "violations": int(spread > _RATIO_SPREAD),
            "tolerance": _RATIO_SPREAD,
            "worst_case_parameters": {
                **report.worst_case_parameters,
                "mean_ratio": mean,
                "relative_spread": spread,
                "alpha_p": ctx.alpha_p,
                "probes_used": int(ratios.size),
            },
        }
    )
