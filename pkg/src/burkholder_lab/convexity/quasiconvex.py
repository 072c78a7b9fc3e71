"""Searching for quasiconvexity failures of Psi_U, and the Riesz-transform integrands.

Quasiconvexity of Psi_U at a matrix A asks that

    Q(f) = mean over the box of [Psi_U(A + Df) - Psi_U(A)] >= 0

for every compactly supported deformation f of the box. Rank-one convexity is
known; whether it implies this is open. The probe below looks for fields with
Q(f) < 0 and never claims more than it finds: a negative Q is reported as a
candidate only after it survives a rerun at twice the resolution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Protocol

import numpy as np
from pydantic import BaseModel, Field

from burkholder_lab.constants import ExponentContext
from burkholder_lab.errors import DomainError, GridError, NonFiniteError
from burkholder_lab.extremal import LehtoParams, lehto_field
from burkholder_lab.functions import Matrix2, MatrixLike, eval_psi_U, eval_U
from burkholder_lab.multipliers.grid import (
    ComplexField,
    FrequencyGrid,
    MultiplierSymbolGrid,
    apply_symbol,
)
from burkholder_lab.multipliers.symbols import symbol_second_riesz
from burkholder_lab.sampling import block_generators
from burkholder_lab.settings import get_settings

logger = logging.getLogger(__name__)


# --------------------------------------------------------------------------- #
# Deformations
# --------------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class DeformationField:
    """A map of the box into the plane, stored as complex samples u + iv.

    The outer `boundary_layer` cells must be zero so that Df is supported
    inside the box.
    """

    grid: FrequencyGrid
    values: np.ndarray
    description: dict[str, Any] = field(default_factory=dict)
    boundary_layer: int = 4

    def __post_init__(self) -> None:
        self.grid.require_plane()
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            raise GridError(f"field shape {values.shape} does not match grid {self.grid.shape}")
        layer = self.boundary_layer
        if layer < 1:
            raise GridError("the boundary layer must be at least one cell wide")
        rim = np.ones(values.shape, dtype=bool)
        rim[layer:-layer, layer:-layer] = False
        if np.any(values[rim] != 0):
            raise GridError(f"deformation does not vanish on the {layer}-cell boundary layer")
        object.__setattr__(self, "values", values)

    def jacobian(self) -> np.ndarray:
        """Df as an (n, n, 2, 2) array from centred differences."""
        dx = self.grid.spacing
        u, v = self.values.real, self.values.imag
        jac = np.empty((*self.grid.shape, 2, 2))
        jac[..., 0, 0] = np.gradient(u, dx, axis=0)
        jac[..., 0, 1] = np.gradient(u, dx, axis=1)
        jac[..., 1, 0] = np.gradient(v, dx, axis=0)
        jac[..., 1, 1] = np.gradient(v, dx, axis=1)
        if not np.all(np.isfinite(jac)):
            raise NonFiniteError("deformation has a non-finite Jacobian")
        return jac

    @property
    def lipschitz(self) -> float:
        """Largest operator norm of the finite-difference Jacobian."""
        return float(np.max(np.linalg.norm(self.jacobian(), ord=2, axis=(-2, -1))))


def _support_window(grid: FrequencyGrid, layer: int) -> tuple[np.ndarray, float]:
    """A C^2 window (1 - s^2)^3 per axis vanishing on the boundary layer, and its half-width."""
    half = 0.5 * grid.box_length - (layer + 1) * grid.spacing
    window = np.ones(grid.shape)
    for x in grid.coordinates():
        s = np.clip(np.abs(x) / half, 0.0, 1.0)
        window = window * (1.0 - s**2) ** 3
    return window, half


class DeformationFamily(Protocol):
    name: str

    def sample(self, rng: np.random.Generator) -> dict[str, Any]: ...

    def build(self, grid: FrequencyGrid, params: dict[str, Any], layer: int) -> np.ndarray: ...


def _perturb(params: dict[str, Any], rng: np.random.Generator, scale: float) -> dict[str, Any]:
    """Jitter every complex amplitude; structural parameters stay put."""
    out = dict(params)
    amps = np.asarray(params["amplitudes"], dtype=complex)
    noise = rng.standard_normal(amps.shape) + 1j * rng.standard_normal(amps.shape)
    out["amplitudes"] = amps + scale * np.abs(amps).mean() * noise
    return out


@dataclass(frozen=True)
class TrigonometricFamily:
    """Windowed trigonometric polynomials with integer frequencies up to `max_frequency`."""

    name: str = "trig"
    max_frequency: int = 4
    max_terms: int = 6

    def sample(self, rng: np.random.Generator) -> dict[str, Any]:
        count = int(rng.integers(1, self.max_terms + 1))
        freqs = rng.integers(-self.max_frequency, self.max_frequency + 1, (count, 2))
        amplitudes = (rng.standard_normal(count) + 1j * rng.standard_normal(count)) * 0.05
        return {"frequencies": freqs, "amplitudes": amplitudes}

    def build(self, grid: FrequencyGrid, params: dict[str, Any], layer: int) -> np.ndarray:
        window, half = _support_window(grid, layer)
        x1, x2 = grid.coordinates()
        values = np.zeros(grid.shape, dtype=complex)
        for (k1, k2), a in zip(params["frequencies"], params["amplitudes"], strict=True):
            values += a * np.exp(1j * np.pi * (k1 * x1 + k2 * x2) / half)
        return values * window


@dataclass(frozen=True)
class RadialBumpFamily:
    """Sums of (1 - |x - c|^2 / rho^2)^3 bumps with complex amplitudes, windowed to the box."""

    name: str = "radial"
    max_bumps: int = 4

    def sample(self, rng: np.random.Generator) -> dict[str, Any]:
        count = int(rng.integers(1, self.max_bumps + 1))
        return {
            "centres": rng.uniform(-0.2, 0.2, (count, 2)),
            "radii": rng.uniform(0.05, 0.2, count),
            "amplitudes": (rng.standard_normal(count) + 1j * rng.standard_normal(count)) * 0.05,
        }

    def build(self, grid: FrequencyGrid, params: dict[str, Any], layer: int) -> np.ndarray:
        window, _ = _support_window(grid, layer)
        x1, x2 = grid.coordinates()
        values = np.zeros(grid.shape, dtype=complex)
        centres = np.asarray(params["centres"]) * grid.box_length
        radii = np.asarray(params["radii"]) * grid.box_length
        for (c1, c2), rho, a in zip(centres, radii, params["amplitudes"], strict=True):
            s2 = ((x1 - c1) ** 2 + (x2 - c2) ** 2) / rho**2
            values += a * np.clip(1.0 - s2, 0.0, None) ** 3
        return values * window


@dataclass(frozen=True)
class LehtoFamily:
    """Discretised Lehto fields times a complex amplitude."""

    name: str = "lehto"
    p: float = 4.0

    def sample(self, rng: np.random.Generator) -> dict[str, Any]:
        return {
            "theta": float(rng.uniform(0.1, 0.95)),
            "amplitudes": np.array([np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))]),
        }

    def build(self, grid: FrequencyGrid, params: dict[str, Any], layer: int) -> np.ndarray:
        params_ = LehtoParams.of(params["theta"], max(self.p, 2.0))
        return complex(params["amplitudes"][0]) * lehto_field(params_, grid).values


def default_families(p: float) -> list[DeformationFamily]:
    return [TrigonometricFamily(), RadialBumpFamily(), LehtoFamily(p=max(p, p / (p - 1.0)))]


# --------------------------------------------------------------------------- #
# The functional
# --------------------------------------------------------------------------- #


def _as_matrix(base: MatrixLike) -> np.ndarray:
    return base.to_array() if isinstance(base, Matrix2) else np.asarray(base, dtype=float)


def quasiconvexity_functional(
    ctx: ExponentContext, base: MatrixLike, deformation: DeformationField
) -> float:
    """Q(f) = mean over the box of Psi_U(A + Df) - Psi_U(A)."""
    a = _as_matrix(base)
    jac = deformation.jacobian()
    values = np.asarray(eval_psi_U(a + jac, ctx)) - float(eval_psi_U(a, ctx))
    return float(np.mean(values))


class QuasiconvexityReport(BaseModel):
    p: float
    base: list[list[float]]
    trials: int
    grid_size: int
    min_q: float
    best_family: str = ""
    best_parameters: dict[str, Any] = Field(default_factory=dict)
    tolerance: float
    # Q of the best field rebuilt at twice the resolution, when it went below -tolerance.
    verified_q: float | None = None
    candidate_violation: bool = False

    @property
    def passed(self) -> bool:
        """No violation candidate; the probe never certifies quasiconvexity itself."""
        return not self.candidate_violation


def _jsonable(params: dict[str, Any]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in params.items():
        arr = np.asarray(value)
        if np.iscomplexobj(arr):
            out[key] = {"re": arr.real.tolist(), "im": arr.imag.tolist()}
        else:
            out[key] = arr.tolist()
    return out


def quasiconvexity_probe(
    ctx: ExponentContext,
    base: MatrixLike | None = None,
    *,
    families: list[DeformationFamily] | None = None,
    trials: int | None = None,
    seed: int = 0,
    grid: FrequencyGrid | None = None,
    tolerance: float | None = None,
) -> QuasiconvexityReport:
    """Minimise Q over random deformations, refine the best one, re-check it at 2n.

    Trial j uses family j mod len(families) and the generator of block
    j mod block_count; the refinement continues on the generator of the best trial.
    """
    settings = get_settings()
    base = Matrix2.zero() if base is None else base
    families = default_families(ctx.p) if families is None else families
    trials = settings.grid.probe_trials if trials is None else trials
    tolerance = settings.scan.tolerance if tolerance is None else tolerance
    grid = FrequencyGrid(settings.grid.size, settings.grid.box_length) if grid is None else grid
    layer = settings.grid.boundary_layer
    if trials <= 0:
        raise DomainError("trials must be positive")
    if not families:
        raise DomainError("at least one deformation family is required")

    def q_of(family: DeformationFamily, params: dict[str, Any], on: FrequencyGrid) -> float:
        values = family.build(on, params, layer)
        return quasiconvexity_functional(
            ctx, base, DeformationField(on, values, {"family": family.name}, layer)
        )

    rngs = block_generators(seed, settings.scan.block_count)
    best_q, best_family, best_params, best_rng = np.inf, families[0], {}, rngs[0]
    for j in range(trials):
        family = families[j % len(families)]
        rng = rngs[j % len(rngs)]
        params = family.sample(rng)
        q = q_of(family, params, grid)
        if q < best_q:
            best_q, best_family, best_params, best_rng = q, family, params, rng

    for step in range(settings.grid.refine_steps):
        candidate = _perturb(best_params, best_rng, scale=0.2 / (1 + step))
        q = q_of(best_family, candidate, grid)
        if q < best_q:
            best_q, best_params = q, candidate

    verified = None
    if best_q < -tolerance:
        verified = q_of(best_family, best_params, grid.refined())
        logger.warning(
            "quasiconvexity candidate at p=%s: Q=%.3e, Q at 2n=%.3e", ctx.p, best_q, verified
        )
    return QuasiconvexityReport(
        p=ctx.p,
        base=_as_matrix(base).tolist(),
        trials=trials,
        grid_size=grid.size,
        min_q=float(best_q),
        best_family=best_family.name,
        best_parameters=_jsonable(best_params),
        tolerance=tolerance,
        verified_q=verified,
        candidate_violation=verified is not None and verified < -tolerance,
    )


# --------------------------------------------------------------------------- #
# Riesz-transform integrands
# --------------------------------------------------------------------------- #


def riesz_integrand_probe(f: ComplexField, ctx: ExponentContext) -> tuple[float, float]:
    """(integral of U(f, 2 R1 R2 f), integral of U(f, (R1^2 - R2^2) f)) for a real field f.

    Both operators have real, even symbols, so their outputs are real up to
    rounding and only the real part is kept.
    """
    f.grid.require_plane()
    real = ComplexField(f.grid, f.values.real)
    mixed = symbol_second_riesz(f.grid, 1, 2).scaled(2.0, name="2R1R2")
    diagonal_values = (
        symbol_second_riesz(f.grid, 1, 1).values - symbol_second_riesz(f.grid, 2, 2).values
    )
    diagonal = MultiplierSymbolGrid(f.grid, diagonal_values, name="R1^2-R2^2")

    def integral(transformed: ComplexField) -> float:
        zeros = np.zeros(f.grid.shape)
        x = np.stack([real.values.real, zeros], axis=-1)
        y = np.stack([transformed.values.real, zeros], axis=-1)
        return float(np.sum(eval_U(x, y, ctx)) * f.dx)

    return integral(apply_symbol(real, mixed)), integral(apply_symbol(real, diagonal))
