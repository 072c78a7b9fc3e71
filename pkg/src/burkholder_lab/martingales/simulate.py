"""Euler simulation of stochastic-integral pairs X = int H dB, Y = int K dB.

Paths are split into blocks by the (seed, block_count) contract of
`burkholder_lab.sampling`; each block draws its Brownian increments from its
own substream and the per-path arrays are interleaved back in path order, so a
report depends only on the seed and the block count.

The integrand H is predictable and state dependent: at step k it is a function
of the current X and Brownian position. K is built from H according to the
pair kind, so subordination, orthogonality and conformality hold by
construction and are re-checked on every step.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, replace
from enum import StrEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from burkholder_lab.constants import (
    conformal_constant,
    cot_constant,
    csc_constant,
    p_star,
    right_conformal_constant,
    subordinate_vector_constant,
    weak_dp,
    weak_subordinate_constant,
)
from burkholder_lab.errors import DegenerateSpecError, DomainError
from burkholder_lab.functions import eval_weaktype_W
from burkholder_lab.sampling import block_generators, block_sizes, interleave, map_blocks
from burkholder_lab.settings import get_settings

logger = logging.getLogger(__name__)

Volatility = Callable[[np.ndarray, np.ndarray], np.ndarray]

# Relative slack on the pathwise bookkeeping comparisons.
_BOOKKEEPING_SLACK = 1e-12
_WEAK_LEVELS = np.linspace(0.5, 0.999, 25)


class PairKind(StrEnum):
    SUBORDINATE = "subordinate"
    ORTHOGONAL = "orthogonal"
    CONFORMAL = "conformal"
    RIGHT_CONFORMAL = "right_conformal"
    VECTOR_ORTHOGONAL = "vector_orthogonal"


def default_volatility(x0: np.ndarray, b: np.ndarray) -> np.ndarray:
    """|H| as a function of the state; it stays in [0.5, 1.5]."""
    return 1.0 + 0.5 * np.sin(3.0 * x0 + b[:, 0])


# --------------------------------------------------------------------------- #
# Ensembles
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class EnsembleSpec:
    """How many paths and steps to simulate, and from which seed.

    `steps` must be even: the coarse scheme used for the bias estimate takes
    one step for every two fine ones.
    """

    paths: int
    steps: int
    horizon: float
    seed: int
    dimension: int = 2
    block_count: int = 16

    def __post_init__(self) -> None:
        if self.paths < 2:
            raise DegenerateSpecError(f"an ensemble needs at least two paths, got {self.paths}")
        if self.steps < 2 or self.steps % 2:
            raise DomainError(f"steps must be even and at least 2, got {self.steps}")
        if not self.horizon > 0:
            raise DegenerateSpecError(f"horizon must be positive, got {self.horizon}")
        if self.dimension < 2:
            raise DomainError(f"the Brownian motion needs dimension >= 2, got {self.dimension}")
        if self.block_count <= 0:
            raise DomainError("block_count must be positive")

    @classmethod
    def from_settings(cls, seed: int | None = None, **overrides) -> EnsembleSpec:
        sim = get_settings().sim
        values = {
            "paths": sim.paths,
            "steps": sim.steps,
            "horizon": sim.horizon,
            "seed": get_settings().scan.seed if seed is None else seed,
            "dimension": sim.dimension,
            "block_count": sim.block_count,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    def with_paths(self, paths: int) -> EnsembleSpec:
        return replace(self, paths=paths)


@dataclass(frozen=True, eq=False)
class PathEnsemble:
    """Terminal values of the fine and coarse schemes, and the pathwise bookkeeping.

    x and y have shape (paths, components); qv_x and qv_y are the accumulated
    sums of |H|^2 dt and |K|^2 dt. qv_subordinate accumulates the process that
    must be subordinate to X: Y itself, or sqrt((m+p-2)/(p-1)) Y^1 for the
    vector-orthogonal kind.
    """

    spec: EnsembleSpec
    kind: PairKind
    x: np.ndarray
    y: np.ndarray
    x_coarse: np.ndarray
    y_coarse: np.ndarray
    qv_x: np.ndarray
    qv_y: np.ndarray
    qv_subordinate: np.ndarray
    subordination_violations: int
    conformal_residual: float


@dataclass(frozen=True, eq=False)
class _BlockPaths:
    x: np.ndarray
    y: np.ndarray
    x_coarse: np.ndarray
    y_coarse: np.ndarray
    qv_x: np.ndarray
    qv_y: np.ndarray
    qv_subordinate: np.ndarray
    violated: np.ndarray
    conformal: np.ndarray


def _components(kind: PairKind) -> tuple[int, int]:
    if kind is PairKind.RIGHT_CONFORMAL:
        return 2, 1
    if kind in (PairKind.CONFORMAL, PairKind.VECTOR_ORTHOGONAL):
        return 1, 2
    return 1, 1


def _integrands(
    kind: PairKind,
    p: float,
    scale: float,
    x: np.ndarray,
    b: np.ndarray,
    volatility: Volatility,
) -> tuple[np.ndarray, np.ndarray]:
    """(K_X, K_Y) of shapes (n, mx, d) and (n, my, d) from the current state."""
    x0 = x[:, 0]
    sigma = volatility(x0, b)
    phi = b[:, 1] + x0
    h = np.zeros_like(b)
    h[:, 0] = sigma * np.cos(phi)
    h[:, 1] = sigma * np.sin(phi)
    jh = np.zeros_like(b)
    jh[:, 0] = -h[:, 1]
    jh[:, 1] = h[:, 0]
    # A predictable sign; it breaks the symmetry between X and Y.
    eps = np.where(x0 >= 0.0, 1.0, -1.0)[:, None]

    match kind:
        case PairKind.SUBORDINATE:
            return h[:, None], (scale * eps * h)[:, None]
        case PairKind.ORTHOGONAL:
            return h[:, None], (scale * jh)[:, None]
        case PairKind.CONFORMAL:
            c = scale / math.sqrt(2.0)
            return h[:, None], np.stack([c * eps * h, c * eps * jh], axis=1)
        case PairKind.RIGHT_CONFORMAL:
            return np.stack([h, jh], axis=1), (scale * math.sqrt(2.0) * eps * h)[:, None]
        case PairKind.VECTOR_ORTHOGONAL:
            _, factor = subordinate_vector_constant(p, 2)
            c = scale / factor
            return h[:, None], np.stack([c * eps * h, c * eps * jh], axis=1)
    raise DomainError(f"unknown pair kind {kind}")


def _subordinate_rate(kind: PairKind, p: float, ky: np.ndarray) -> np.ndarray:
    """d<Z>/dt for the process Z held subordinate to X."""
    if kind is PairKind.VECTOR_ORTHOGONAL:
        _, factor = subordinate_vector_constant(p, 2)
        return factor**2 * np.sum(ky[:, 0] ** 2, axis=1)
    return np.sum(ky * ky, axis=(1, 2))


def _conformal_side(kind: PairKind, kx: np.ndarray, ky: np.ndarray) -> np.ndarray | None:
    if kind is PairKind.RIGHT_CONFORMAL:
        return kx
    if kind in (PairKind.CONFORMAL, PairKind.VECTOR_ORTHOGONAL):
        return ky
    return None


def _simulate_block(
    kind: PairKind,
    p: float,
    scale: float,
    spec: EnsembleSpec,
    volatility: Volatility,
    rng: np.random.Generator,
    n: int,
) -> _BlockPaths:
    mx, my = _components(kind)
    dt = spec.dt
    root_dt = math.sqrt(dt)
    b = np.zeros((n, spec.dimension))
    x, y = np.zeros((n, mx)), np.zeros((n, my))
    xc, yc = np.zeros((n, mx)), np.zeros((n, my))
    qv_x, qv_y, qv_sub = np.zeros(n), np.zeros(n), np.zeros(n)
    violated = np.zeros(n, dtype=bool)
    # Accumulated <Y1> - <Y2> and <Y1, Y2> on the conformal side.
    bracket_gap, bracket_cross = np.zeros(n), np.zeros(n)
    pending = np.zeros_like(b)
    kxc = kyc = None

    for k in range(spec.steps):
        db = rng.standard_normal((n, spec.dimension)) * root_dt
        kx, ky = _integrands(kind, p, scale, x, b, volatility)
        if k % 2 == 0:
            kxc, kyc = _integrands(kind, p, scale, xc, b, volatility)
            pending = db
        else:
            pending = pending + db
            xc = xc + np.einsum("nmd,nd->nm", kxc, pending)
            yc = yc + np.einsum("nmd,nd->nm", kyc, pending)
        x = x + np.einsum("nmd,nd->nm", kx, db)
        y = y + np.einsum("nmd,nd->nm", ky, db)
        rate_x = np.sum(kx * kx, axis=(1, 2))
        rate_sub = _subordinate_rate(kind, p, ky)
        qv_x = qv_x + rate_x * dt
        qv_y = qv_y + np.sum(ky * ky, axis=(1, 2)) * dt
        qv_sub = qv_sub + rate_sub * dt
        violated |= rate_sub > rate_x * (1.0 + _BOOKKEEPING_SLACK)
        side = _conformal_side(kind, kx, ky)
        if side is not None:
            bracket_gap += (np.sum(side[:, 0] ** 2, axis=1) - np.sum(side[:, 1] ** 2, axis=1)) * dt
            bracket_cross += np.sum(side[:, 0] * side[:, 1], axis=1) * dt
        b = b + db

    conformal = np.maximum(np.abs(bracket_gap), np.abs(bracket_cross))
    return _BlockPaths(x, y, xc, yc, qv_x, qv_y, qv_sub, violated, conformal)


def simulate_ensemble(
    kind: PairKind | str,
    p: float,
    spec: EnsembleSpec,
    *,
    scale: float = 1.0,
    volatility: Volatility = default_volatility,
) -> PathEnsemble:
    """Run every block of `spec` and interleave the paths back into one ensemble."""
    kind = PairKind(kind)
    if not 0.0 <= scale <= 1.0:
        raise DomainError(f"scale must lie in [0, 1], got {scale}")
    sizes = block_sizes(spec.paths, spec.block_count)
    blocks = map_blocks(
        lambda b, rng: _simulate_block(kind, p, scale, spec, volatility, rng, sizes[b]),
        spec.seed,
        spec.block_count,
        workers=get_settings().scan.workers,
    )

    def gather(name: str) -> np.ndarray:
        return interleave([getattr(block, name) for block in blocks])

    qv_x = gather("qv_x")
    if not np.any(qv_x > 0.0):
        raise DegenerateSpecError("every path has zero quadratic variation")
    return PathEnsemble(
        spec=spec,
        kind=kind,
        x=gather("x"),
        y=gather("y"),
        x_coarse=gather("x_coarse"),
        y_coarse=gather("y_coarse"),
        qv_x=qv_x,
        qv_y=gather("qv_y"),
        qv_subordinate=gather("qv_subordinate"),
        subordination_violations=int(np.count_nonzero(gather("violated"))),
        conformal_residual=float(np.max(gather("conformal"))),
    )


# --------------------------------------------------------------------------- #
# Functionals and reports
# --------------------------------------------------------------------------- #


def _moment(values: np.ndarray, p: float) -> float:
    return float(np.mean(np.linalg.norm(values, axis=-1) ** p))


def lp_ratio(x: np.ndarray, y: np.ndarray, p: float) -> float:
    """||Y||_p / ||X||_p with Euclidean norms on the components."""
    denominator = _moment(x, p)
    if denominator == 0.0:
        raise DegenerateSpecError("E|X|^p vanishes")
    return (_moment(y, p) / denominator) ** (1.0 / p)


def pair_ceiling(kind: PairKind | str, p: float) -> float | None:
    """The sharp constant for the kind at p, or None where none is known."""
    match PairKind(kind):
        case PairKind.SUBORDINATE:
            return p_star(p) - 1.0
        case PairKind.ORTHOGONAL:
            return cot_constant(p)
        case PairKind.CONFORMAL:
            return conformal_constant(p) if p >= 2.0 else None
        case PairKind.RIGHT_CONFORMAL:
            return right_conformal_constant(p) if p <= 2.0 else None
        case PairKind.VECTOR_ORTHOGONAL:
            return subordinate_vector_constant(p, 2)[0] if p >= 2.0 else None
    return None


def weak_ceiling(kind: PairKind, p: float) -> float | None:
    if kind is PairKind.ORTHOGONAL and 1.0 <= p <= 2.0:
        return weak_dp(p)
    if kind is PairKind.SUBORDINATE:
        return weak_subordinate_constant(p)
    return None


class FunctionalEstimate(BaseModel):
    """A Monte Carlo functional, its standard error and the ceiling it is held to.

    For the weak-type functional, `w_expectation` is the sample mean of
    W(X/lambda, Y/lambda) with c^p equal to the ceiling; the ceiling holds only
    if that mean is not significantly positive.
    """

    estimate: float
    stderr: float
    ceiling: float | None = None
    multiplier: float = 3.0
    w_expectation: float | None = None
    w_stderr: float = 0.0
    details: dict[str, float] = Field(default_factory=dict)

    @property
    def sign_holds(self) -> bool:
        if self.w_expectation is None:
            return True
        return self.w_expectation <= self.multiplier * self.w_stderr

    @property
    def passed(self) -> bool:
        if self.ceiling is None:
            return True
        within = self.estimate <= self.ceiling + self.multiplier * self.stderr
        return within and self.sign_holds


class SimulationReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    kind: PairKind
    p: float
    ceiling: float | None
    estimate: float
    stderr: float
    n_paths: int
    n_steps: int
    dt: float
    seed: int
    passed: bool = Field(alias="pass")
    dt_bias: float = 0.0
    subordination_violations: int = 0
    conformal_residual: float = 0.0
    essen: FunctionalEstimate | None = None
    weak_type: FunctionalEstimate | None = None


def _bootstrap(
    statistics: Callable[[np.ndarray], list[float]],
    n: int,
    rng: np.random.Generator,
    resamples: int,
) -> np.ndarray:
    """Standard deviation of each statistic over `resamples` path resamplings."""
    draws = [statistics(rng.integers(0, n, n)) for _ in range(resamples)]
    return np.std(np.asarray(draws), axis=0, ddof=1)


def _weak_type(
    x: np.ndarray, y: np.ndarray, p: float, ceiling: float | None, multiplier: float
) -> FunctionalEstimate:
    """max over lambda of lambda^p P(|Y| >= lambda) / E|X|^p on a ladder of |Y| quantiles."""
    ny = np.linalg.norm(y, axis=-1)
    moment = _moment(x, p)
    levels = np.quantile(ny, _WEAK_LEVELS)
    levels = levels[levels > 0.0]
    if levels.size == 0:
        return FunctionalEstimate(estimate=0.0, stderr=0.0, ceiling=ceiling, multiplier=multiplier)
    tails = np.array([np.mean(ny >= lam) for lam in levels])
    values = levels**p * tails / moment
    best = int(np.argmax(values))
    lam = float(levels[best])
    stderr = lam**p * math.sqrt(tails[best] * (1.0 - tails[best]) / ny.size) / moment
    w_expectation: float | None = None
    w_stderr = 0.0
    if ceiling is not None:
        c = ceiling ** (1.0 / p)
        w = np.asarray(eval_weaktype_W(_plane(x) / lam, _plane(y) / lam, c, p))
        w_expectation = float(w.mean())
        w_stderr = float(w.std(ddof=1) / math.sqrt(w.size))
    return FunctionalEstimate(
        estimate=float(values[best]),
        stderr=stderr,
        ceiling=ceiling,
        multiplier=multiplier,
        w_expectation=w_expectation,
        w_stderr=w_stderr,
        details={"lambda": lam},
    )


def _plane(values: np.ndarray) -> np.ndarray:
    """Embed one- or two-component values in the plane for the W function."""
    if values.shape[-1] == 2:
        return values
    return np.concatenate([values, np.zeros_like(values)], axis=-1)


def simulate_pair(
    kind: PairKind | str,
    p: float,
    spec: EnsembleSpec,
    *,
    scale: float = 1.0,
    volatility: Volatility = default_volatility,
) -> SimulationReport:
    """Estimate ||Y||_p / ||X||_p for the kind and hold it to its ceiling plus k stderr.

    The bootstrap resamples paths with a generator spawned after the block
    substreams, so it never shares random numbers with the simulation.
    """
    kind = PairKind(kind)
    if not p > 1.0:
        raise DomainError(f"p must exceed 1, got {p}")
    sim = get_settings().sim
    ensemble = simulate_ensemble(kind, p, spec, scale=scale, volatility=volatility)
    x, y = ensemble.x, ensemble.y
    ceiling = pair_ceiling(kind, p)
    essen_ceiling = csc_constant(p) if kind is PairKind.ORTHOGONAL else None

    def statistics(index: np.ndarray) -> list[float]:
        values = [lp_ratio(x[index], y[index], p)]
        if essen_ceiling is not None:
            values.append(lp_ratio(x[index], np.hstack([x[index], y[index]]), p))
        return values

    estimates = statistics(np.arange(spec.paths))
    bootstrap_rng = block_generators(spec.seed, spec.block_count + 1)[-1]
    stderr = _bootstrap(statistics, spec.paths, bootstrap_rng, sim.bootstrap)
    multiplier = sim.stderr_multiplier

    essen = None
    if essen_ceiling is not None:
        essen = FunctionalEstimate(
            estimate=estimates[1],
            stderr=float(stderr[1]),
            ceiling=essen_ceiling,
            multiplier=multiplier,
        )
    weak = _weak_type(x, y, p, weak_ceiling(kind, p), multiplier)
    dt_bias = estimates[0] - lp_ratio(ensemble.x_coarse, ensemble.y_coarse, p)

    within = ceiling is None or estimates[0] <= ceiling + multiplier * float(stderr[0])
    passed = (
        within
        and ensemble.subordination_violations == 0
        and ensemble.conformal_residual <= _BOOKKEEPING_SLACK
        and (essen is None or essen.passed)
        and weak.passed
    )
    report = SimulationReport(
        kind=kind,
        p=p,
        ceiling=ceiling,
        estimate=estimates[0],
        stderr=float(stderr[0]),
        n_paths=spec.paths,
        n_steps=spec.steps,
        dt=spec.dt,
        seed=spec.seed,
        passed=passed,
        dt_bias=dt_bias,
        subordination_violations=ensemble.subordination_violations,
        conformal_residual=ensemble.conformal_residual,
        essen=essen,
        weak_type=weak,
    )
    logger.info(
        "%s pair p=%s: ratio %.4f +- %.4f (ceiling %s, dt bias %.2e)",
        kind,
        p,
        report.estimate,
        report.stderr,
        ceiling,
        dt_bias,
    )
    return report
