"""Lévy multipliers: ratios of a transformed symmetric Lévy symbol to the original.

For a symmetric Lévy datum with jump atoms (x_j, w_j), Gaussian sphere atoms
(theta_i, u_i) and transforms phi, psi with sup-norm at most 1,

    M(xi) = [sum_j w_j (1 - cos(k.x_j)) phi_j + 1/2 sum_i u_i |k.theta_i|^2 psi_i]
            / [same without phi and psi]

evaluated at the angular frequency k = 2 pi xi of the lattice. Isotropic stable
jumps enter through the radial reduction integral (1 - cos s) s^{-1-alpha} ds =
c_alpha, which turns the jump part into c_alpha times an integral of
|k.theta|^alpha phi(theta) over the circle.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, Field
from scipy import optimize, special

from burkholder_lab.errors import DegenerateSpecError, DomainError
from burkholder_lab.multipliers.grid import FrequencyGrid, MultiplierSymbolGrid, spectral_arrays
from burkholder_lab.quadrature import half_circle_gauss_legendre
from burkholder_lab.sampling import block_generators
from burkholder_lab.settings import get_settings

logger = logging.getLogger(__name__)

# Frequencies per chunk in the circle quadrature.
_CHUNK = 2048
# A denominator below this (relative to its largest value) counts as zero.
_DEGENERATE = 1e-14
# Slack on the sup-norm conditions for the transforms.
_SUP_SLACK = 1e-12

AngularFunction = Callable[[np.ndarray], np.ndarray]


def stable_constant(alpha: float) -> float:
    """c_alpha = integral_0^inf (1 - cos s) s^{-1-alpha} ds for 0 < alpha < 2."""
    if not 0.0 < alpha < 2.0:
        raise DomainError(f"stable index must lie in (0, 2), got {alpha}")
    if alpha == 1.0:
        return math.pi / 2.0
    return float(special.gamma(1.0 - alpha) * math.cos(math.pi * alpha / 2.0) / alpha)


# --------------------------------------------------------------------------- #
# Lévy data
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class StableJumps:
    """Stable jumps r^{-1-alpha} dr dlambda(theta).

    With `directions` given, lambda is the discrete measure sum weights_i
    delta_{directions_i} and `phi` holds one value per direction. Without
    them (planar only) lambda is arc length on the circle and `phi` is a
    function of the angle.
    """

    alpha: float
    phi: AngularFunction | np.ndarray | None = None
    directions: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self) -> None:
        stable_constant(self.alpha)
        if self.directions is not None:
            directions = np.atleast_2d(np.asarray(self.directions, dtype=float))
            weights = (
                np.ones(len(directions))
                if self.weights is None
                else np.asarray(self.weights, dtype=float)
            )
            phi = (
                np.ones(len(directions), dtype=complex)
                if self.phi is None
                else np.asarray(self.phi, dtype=complex)
            )
            _check_sphere(directions)
            _check_transform(phi, "phi")
            _check_weights(weights, len(directions))
            object.__setattr__(self, "directions", directions)
            object.__setattr__(self, "weights", weights)
            object.__setattr__(self, "phi", phi)
        elif self.phi is not None and not callable(self.phi):
            raise DomainError("phi for the circle-uniform family must be a function of the angle")


@dataclass(frozen=True)
class LevySpec:
    """A discretised symmetric Lévy datum together with its transforms.

    `drift` is carried for completeness; symmetric multipliers do not see it.
    """

    dim: int = 2
    drift: np.ndarray | None = None
    sphere_atoms: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    sphere_weights: np.ndarray = field(default_factory=lambda: np.empty(0))
    psi: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex))
    jump_atoms: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    jump_weights: np.ndarray = field(default_factory=lambda: np.empty(0))
    phi: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex))
    stable: StableJumps | None = None

    def __post_init__(self) -> None:
        sphere = np.asarray(self.sphere_atoms, dtype=float).reshape(-1, self.dim)
        jumps = np.asarray(self.jump_atoms, dtype=float).reshape(-1, self.dim)
        u = np.asarray(self.sphere_weights, dtype=float).reshape(-1)
        w = np.asarray(self.jump_weights, dtype=float).reshape(-1)
        psi = np.asarray(self.psi, dtype=complex).reshape(-1)
        phi = np.asarray(self.phi, dtype=complex).reshape(-1)
        if len(psi) == 0 and len(sphere):
            psi = np.ones(len(sphere), dtype=complex)
        if len(phi) == 0 and len(jumps):
            phi = np.ones(len(jumps), dtype=complex)

        _check_sphere(sphere)
        _check_weights(u, len(sphere))
        _check_weights(w, len(jumps))
        _check_transform(psi, "psi", len(sphere))
        _check_transform(phi, "phi", len(jumps))
        if len(jumps) and np.any(np.linalg.norm(jumps, axis=1) == 0):
            raise DomainError("jump atoms must avoid the origin")
        # The discrete Lévy measure condition sum w |x|^2 / (1 + |x|^2) < inf.
        if len(jumps):
            mass = np.sum(w * np.sum(jumps**2, axis=1) / (1.0 + np.sum(jumps**2, axis=1)))
            if not np.isfinite(mass):
                raise DomainError("jump measure violates the Lévy integrability condition")
        if self.stable is not None and self.stable.directions is None and self.dim != 2:
            raise DomainError("the circle-uniform stable family is planar")

        for name, value in (
            ("sphere_atoms", sphere),
            ("sphere_weights", u),
            ("psi", psi),
            ("jump_atoms", jumps),
            ("jump_weights", w),
            ("phi", phi),
        ):
            object.__setattr__(self, name, value)

    @classmethod
    def from_gaussian_matrix(
        cls, b: np.ndarray, psi: np.ndarray | None = None, **kw
    ) -> LevySpec:
        """Gaussian part 1/2 xi.B xi as sphere atoms along the eigenvectors of B."""
        b = np.asarray(b, dtype=float)
        if b.shape[0] != b.shape[1] or not np.allclose(b, b.T):
            raise DomainError("the Gaussian matrix must be square and symmetric")
        eigenvalues, eigenvectors = np.linalg.eigh(b)
        if eigenvalues[0] < -1e-12 * max(1.0, abs(eigenvalues[-1])):
            raise DomainError("the Gaussian matrix must be non-negative definite")
        return cls(
            dim=b.shape[0],
            sphere_atoms=eigenvectors.T,
            sphere_weights=np.clip(eigenvalues, 0.0, None),
            psi=np.ones(b.shape[0], dtype=complex) if psi is None else psi,
            **kw,
        )

    @property
    def is_compound_poisson(self) -> bool:
        """Only finitely many jump atoms: no Gaussian part and no stable family."""
        return self.stable is None and len(self.sphere_atoms) == 0 and len(self.jump_atoms) > 0


def _check_sphere(atoms: np.ndarray) -> None:
    if len(atoms) and not np.allclose(np.linalg.norm(atoms, axis=1), 1.0, atol=1e-12):
        raise DomainError("sphere atoms must be unit vectors")


def _check_weights(weights: np.ndarray, count: int) -> None:
    if len(weights) != count:
        raise DomainError(f"expected {count} weights, got {len(weights)}")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise DomainError("weights must be finite and non-negative")


def _check_transform(values: np.ndarray, name: str, count: int | None = None) -> None:
    if count is not None and len(values) != count:
        raise DomainError(f"expected {count} values of {name}, got {len(values)}")
    if np.any(np.abs(values) > 1.0 + _SUP_SLACK):
        raise DomainError(f"{name} must have sup-norm at most 1")


# --------------------------------------------------------------------------- #
# Symbol parts
# --------------------------------------------------------------------------- #


def _angular(grid: FrequencyGrid) -> list[np.ndarray]:
    xi, _ = spectral_arrays(grid)
    return [2.0 * np.pi * component for component in xi]


def _dot_atoms(k: list[np.ndarray], atoms: np.ndarray, index: int) -> np.ndarray:
    return sum(k[axis] * atoms[index, axis] for axis in range(len(k)))


def _jump_parts(grid: FrequencyGrid, spec: LevySpec) -> tuple[np.ndarray, np.ndarray]:
    """(sum w (1-cos) phi, sum w (1-cos)) over the jump atoms."""
    k = _angular(grid)
    numerator = np.zeros(grid.shape, dtype=complex)
    denominator = np.zeros(grid.shape)
    for j in range(len(spec.jump_atoms)):
        bump = spec.jump_weights[j] * (1.0 - np.cos(_dot_atoms(k, spec.jump_atoms, j)))
        numerator += bump * spec.phi[j]
        denominator += bump
    return numerator, denominator


def _gaussian_parts(grid: FrequencyGrid, spec: LevySpec) -> tuple[np.ndarray, np.ndarray]:
    k = _angular(grid)
    numerator = np.zeros(grid.shape, dtype=complex)
    denominator = np.zeros(grid.shape)
    for i in range(len(spec.sphere_atoms)):
        square = 0.5 * spec.sphere_weights[i] * _dot_atoms(k, spec.sphere_atoms, i) ** 2
        numerator += square * spec.psi[i]
        denominator += square
    return numerator, denominator


def _circle_integrals(
    grid: FrequencyGrid, exponent: float, phi: AngularFunction | None
) -> tuple[np.ndarray, np.ndarray]:
    """Integrals of |k.theta|^r phi(theta) and |k.theta|^r over the unit circle.

    Gauss-Legendre panels run between the two zeros of k.theta, where the
    integrand has its kinks.
    """
    grid.require_plane()
    offsets, weights = half_circle_gauss_legendre(get_settings().quad.sphere_nodes)
    k1, k2 = _angular(grid)
    radius = np.hypot(k1, k2).reshape(-1)
    direction = np.arctan2(k2, k1).reshape(-1)
    profile = np.cos(offsets) ** exponent * weights
    denominator = 2.0 * radius**exponent * profile.sum()
    numerator = np.empty(radius.shape, dtype=complex)
    if phi is None:
        numerator[:] = denominator
    else:
        for start in range(0, radius.size, _CHUNK):
            part = slice(start, start + _CHUNK)
            angles = direction[part, None] + offsets[None, :]
            pair = np.asarray(phi(angles)) + np.asarray(phi(angles + np.pi))
            numerator[part] = radius[part] ** exponent * (pair @ profile)
    return numerator.reshape(grid.shape), denominator.reshape(grid.shape)


def _stable_parts(grid: FrequencyGrid, stable: StableJumps) -> tuple[np.ndarray, np.ndarray]:
    c_alpha = stable_constant(stable.alpha)
    if stable.directions is None:
        numerator, denominator = _circle_integrals(grid, stable.alpha, stable.phi)
        return c_alpha * numerator, c_alpha * denominator
    k = _angular(grid)
    numerator = np.zeros(grid.shape, dtype=complex)
    denominator = np.zeros(grid.shape)
    for i in range(len(stable.directions)):
        term = stable.weights[i] * np.abs(_dot_atoms(k, stable.directions, i)) ** stable.alpha
        numerator += term * stable.phi[i]
        denominator += term
    return c_alpha * numerator, c_alpha * denominator


def _ratio(
    grid: FrequencyGrid, numerator: np.ndarray, denominator: np.ndarray, name: str
) -> MultiplierSymbolGrid:
    _, mod2 = spectral_arrays(grid)
    nonzero = mod2 > 0
    scale = float(np.max(np.abs(denominator))) if denominator.size else 0.0
    if scale == 0.0 or np.any(np.abs(denominator[nonzero]) <= _DEGENERATE * scale):
        raise DegenerateSpecError(f"{name}: the Lévy symbol vanishes at a non-zero frequency")
    values = np.zeros(grid.shape, dtype=complex)
    values[nonzero] = numerator[nonzero] / denominator[nonzero]
    return MultiplierSymbolGrid(grid, values, name=name)


# --------------------------------------------------------------------------- #
# Public symbols
# --------------------------------------------------------------------------- #


def symbol_levy(grid: FrequencyGrid, spec: LevySpec) -> MultiplierSymbolGrid:
    """The Lévy multiplier of `spec`; its sup-norm never exceeds 1."""
    if spec.dim != grid.dim:
        raise DomainError(f"spec dimension {spec.dim} does not match grid dimension {grid.dim}")
    parts = []
    if len(spec.jump_atoms):
        parts.append(_jump_parts(grid, spec))
    if len(spec.sphere_atoms):
        parts.append(_gaussian_parts(grid, spec))
    if spec.stable is not None:
        parts.append(_stable_parts(grid, spec.stable))
    if not parts:
        raise DegenerateSpecError("the Lévy spec has no Gaussian part and no jumps")
    numerator = sum(part[0] for part in parts)
    denominator = sum(part[1] for part in parts)
    return _ratio(grid, numerator, denominator, "levy")


def symbol_sphere_average(
    grid: FrequencyGrid, r: float, phi: AngularFunction
) -> MultiplierSymbolGrid:
    """Ratio of the circle integrals of |xi.theta|^r phi(theta) and |xi.theta|^r, r > 0.

    For r in (0, 2) this is the isotropic stable multiplier; larger r has no
    Lévy process behind it.
    """
    if not r > 0:
        raise DomainError(f"sphere-average exponent must be positive, got {r}")
    numerator, denominator = _circle_integrals(grid, r, phi)
    return _ratio(grid, numerator, denominator, f"sphere_average({r})")


def symbol_levy_finiteT(  # noqa: N802
    grid: FrequencyGrid, spec: LevySpec, T: float  # noqa: N803
) -> MultiplierSymbolGrid:
    """The finite-horizon multiplier of a compound Poisson transform.

    m_T = (exp(2 T rho) - 1) (1/rho) sum_j w_j (1 - cos(k.x_j)) phi_j with
    rho = sum_j w_j (cos(k.x_j) - 1); the value is 0 wherever rho = 0.
    """
    if not spec.is_compound_poisson:
        raise DomainError("the finite-horizon multiplier needs a finite jump measure only")
    if T < 0:
        raise DomainError(f"T must be non-negative, got {T}")
    numerator, mass = _jump_parts(grid, spec)
    rho = -mass
    values = np.zeros(grid.shape, dtype=complex)
    live = rho < 0
    values[live] = np.expm1(2.0 * T * rho[live]) / rho[live] * numerator[live]
    return MultiplierSymbolGrid(grid, values, name=f"levy_finite({T})")


# --------------------------------------------------------------------------- #
# Gaussian-scale floor
# --------------------------------------------------------------------------- #


class FloorProbeReport(BaseModel):
    """Smallest |c| seen among Gaussian configurations giving conj(xi)^2 / (c |xi|^2)."""

    configurations: int
    reproducing: int
    min_abs_c: float | None = None
    floor: float = 2.0
    worst_configuration: dict = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.min_abs_c is None or self.min_abs_c >= self.floor - 1e-3


@dataclass(frozen=True)
class ScaleFit:
    """The largest kappa with ratio = kappa conj(xi)^2/|xi|^2 reachable by some |psi| <= 1."""

    kappa: float
    residual: float
    psi: np.ndarray

    @property
    def abs_c(self) -> float:
        return math.inf if self.kappa <= 0.0 else 1.0 / self.kappa


def _ratio_matrix(angles: np.ndarray, weights: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Row d maps psi to the Gaussian-part multiplier of the atoms at e^{i directions[d]}."""
    cosines = np.cos(directions[:, None] - angles[None, :]) ** 2 * weights[None, :]
    return cosines / cosines.sum(axis=1, keepdims=True)


def best_scale_fit(
    angles: np.ndarray,
    weights: np.ndarray,
    directions: np.ndarray,
    *,
    residual_tol: float = 1e-6,
    facets: int = 64,
) -> ScaleFit:
    """Maximise kappa over psi subject to |ratio - kappa target| <= residual_tol.

    A linear program in (Re psi, Im psi, kappa): the residual bound is imposed
    on the real and imaginary parts at every direction, and each psi_i is kept
    inside the regular `facets`-gon inscribed in the unit disk. psi = 0 with
    kappa = 0 is always feasible, and rows of the ratio matrix sum to one, so
    kappa <= 1 + residual_tol.
    """
    a = _ratio_matrix(angles, weights, directions)
    n, d = angles.size, directions.size
    target = np.exp(-2j * directions)
    blank = np.zeros((d, n))
    real_rows = np.hstack([a, blank, -target.real[:, None]])
    imag_rows = np.hstack([blank, a, -target.imag[:, None]])
    beta = np.linspace(0.0, 2.0 * np.pi, facets, endpoint=False)[:, None]
    eye = np.eye(n)
    disk_rows = np.hstack(
        [np.kron(eye, np.cos(beta)), np.kron(eye, np.sin(beta)), np.zeros((facets * n, 1))]
    )
    a_ub = np.vstack([real_rows, -real_rows, imag_rows, -imag_rows, disk_rows])
    b_ub = np.concatenate(
        [np.full(4 * d, residual_tol), np.full(facets * n, math.cos(math.pi / facets))]
    )
    objective = np.zeros(2 * n + 1)
    objective[-1] = -1.0
    bounds = [(-1.0, 1.0)] * (2 * n) + [(0.0, None)]
    result = optimize.linprog(objective, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not result.success:
        logger.warning("scale fit did not solve: %s", result.message)
        return ScaleFit(0.0, math.inf, np.zeros(n, dtype=complex))
    psi = result.x[:n] + 1j * result.x[n : 2 * n]
    kappa = float(result.x[-1])
    residual = float(np.max(np.abs(a @ psi - kappa * target)))
    return ScaleFit(kappa, residual, psi)


def _balanced_atoms(rng: np.random.Generator, max_atoms: int) -> tuple[np.ndarray, np.ndarray]:
    """A weighted union of rotated regular polygons; sum w e^{2 i theta} vanishes."""
    angles: list[np.ndarray] = []
    weights: list[np.ndarray] = []
    for _ in range(int(rng.integers(1, 4))):
        sides = int(rng.integers(2, 7))
        if sum(a.size for a in angles) + sides > max_atoms:
            break
        angles.append(np.arange(sides) * np.pi / sides + rng.uniform(0.0, np.pi))
        weights.append(np.full(sides, rng.uniform(0.1, 1.0)))
    return np.concatenate(angles), np.concatenate(weights)


def gaussian_scale_floor_probe(
    configurations: int = 256,
    seed: int = 0,
    *,
    max_atoms: int = 16,
    residual_tol: float = 1e-6,
    min_kappa: float = 1e-3,
) -> FloorProbeReport:
    """Search Gaussian sphere configurations for conj(xi)^2 / (c |xi|^2) with small |c|.

    Every configuration gets the psi that reaches the largest kappa = 1/|c|
    within `residual_tol` of the target (`best_scale_fit`). Even indices draw
    balanced unions of rotated regular polygons, odd ones draw free random
    atoms; a configuration reproduces the target when its kappa exceeds
    `min_kappa`.
    """
    if max_atoms < 6:
        raise DomainError(f"max_atoms must be at least 6, got {max_atoms}")
    directions = np.linspace(0.0, 2.0 * np.pi, 97, endpoint=False)
    rngs = block_generators(seed, get_settings().scan.block_count)
    reproducing = 0
    min_abs_c: float | None = None
    worst: dict = {}
    for index in range(configurations):
        rng = rngs[index % len(rngs)]
        if index % 2 == 0:
            angles, weights = _balanced_atoms(rng, max_atoms)
        else:
            count = int(rng.integers(3, max_atoms + 1))
            angles, weights = rng.uniform(0.0, np.pi, count), rng.uniform(0.1, 1.0, count)
        fit = best_scale_fit(angles, weights, directions, residual_tol=residual_tol)
        if fit.kappa <= min_kappa:
            continue
        reproducing += 1
        if min_abs_c is None or fit.abs_c < min_abs_c:
            min_abs_c = fit.abs_c
            worst = {
                "atoms": int(angles.size),
                "angles": angles.tolist(),
                "weights": weights.tolist(),
                "abs_c": fit.abs_c,
                "residual": fit.residual,
            }
    logger.info(
        "gaussian floor probe: %d of %d configurations reproduce the target, min |c| = %s",
        reproducing,
        configurations,
        min_abs_c,
    )
    return FloorProbeReport(
        configurations=configurations,
        reproducing=reproducing,
        min_abs_c=min_abs_c,
        worst_configuration=worst,
    )
