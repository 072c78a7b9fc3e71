"""Symbols of the singular integrals: Riesz, Beurling-Ahlfors, Laplace-type, heat.

All homogeneous symbols of degree 0 take the value 0 at xi = 0. Symbols that
are odd in a coordinate (Riesz, mixed second-order Riesz, derivatives) are set
to 0 on the Nyquist row of that coordinate, which has no distinct mirror
frequency; this keeps real fields real.

Everything is built from the shared quotients q_lm = xi_l xi_m / |xi|^2, so
identities between symbols (the Beurling-Ahlfors operator as a combination of
second-order Riesz transforms, or as the symbol of a constant matrix) hold on
every lattice point exactly, not just to rounding.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import special

from burkholder_lab.errors import GridError, QuadratureError
from burkholder_lab.multipliers.grid import FrequencyGrid, MultiplierSymbolGrid, spectral_arrays
from burkholder_lab.quadrature import half_density, log_trapezoid_nodes
from burkholder_lab.settings import get_settings

logger = logging.getLogger(__name__)

# Rows of |xi| values evaluated per chunk in the Laplace-type quadratures.
_CHUNK = 4096

# The Beurling-Ahlfors operator as a constant-matrix projection.
BEURLING_MATRIX = np.array([[1.0, -1.0j], [-1.0j, -1.0]])


def _axis(grid: FrequencyGrid, j: int) -> int:
    """1-based coordinate index -> array axis."""
    if not 1 <= j <= grid.dim:
        raise GridError(f"coordinate index must lie in 1..{grid.dim}, got {j}")
    return j - 1


def _quotient(grid: FrequencyGrid, l: int, m: int) -> np.ndarray:  # noqa: E741
    """q_lm = xi_l xi_m / |xi|^2, zero at the origin and, for l != m, on both Nyquist rows."""
    xi, mod2 = spectral_arrays(grid)
    a, b = _axis(grid, l), _axis(grid, m)
    q = np.zeros(grid.shape)
    np.divide(xi[a] * xi[b], mod2, out=q, where=mod2 > 0)
    if a != b:
        q[grid.nyquist_mask(a) | grid.nyquist_mask(b)] = 0.0
    return q


# --------------------------------------------------------------------------- #
# Riesz transforms and the Beurling-Ahlfors operator
# --------------------------------------------------------------------------- #


def symbol_identity(grid: FrequencyGrid) -> MultiplierSymbolGrid:
    return MultiplierSymbolGrid(grid, np.ones(grid.shape), name="identity", value_at_zero=1.0)


def symbol_riesz(grid: FrequencyGrid, j: int) -> MultiplierSymbolGrid:
    """R_j: i xi_j / |xi|."""
    xi, mod2 = spectral_arrays(grid)
    a = _axis(grid, j)
    values = np.zeros(grid.shape, dtype=complex)
    np.divide(1j * xi[a], np.sqrt(mod2), out=values, where=mod2 > 0)
    values[grid.nyquist_mask(a)] = 0.0
    return MultiplierSymbolGrid(grid, values, name=f"R{j}")


def symbol_second_riesz(grid: FrequencyGrid, j: int, k: int) -> MultiplierSymbolGrid:
    """R_j R_k: -xi_j xi_k / |xi|^2."""
    return MultiplierSymbolGrid(grid, -_quotient(grid, j, k), name=f"R{j}R{k}")


def symbol_beurling(grid: FrequencyGrid) -> MultiplierSymbolGrid:
    """B = R_2^2 - R_1^2 + 2i R_1 R_2, with symbol conj(xi)^2 / |xi|^2."""
    grid.require_plane()
    values = (
        symbol_second_riesz(grid, 2, 2).values
        - symbol_second_riesz(grid, 1, 1).values
        + 2j * symbol_second_riesz(grid, 1, 2).values
    )
    return MultiplierSymbolGrid(grid, values, name="beurling")


def symbol_constant_matrix(grid: FrequencyGrid, a: np.ndarray) -> MultiplierSymbolGrid:
    """(A xi . xi) / |xi|^2 for a constant dim x dim complex matrix A."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (grid.dim, grid.dim):
        raise GridError(f"matrix shape {a.shape} does not match dim {grid.dim}")
    if not np.all(np.isfinite(a)):
        raise GridError("matrix has non-finite entries")
    values = np.zeros(grid.shape, dtype=complex)
    for l in range(grid.dim):  # noqa: E741
        for m in range(grid.dim):
            values = values + a[l, m] * _quotient(grid, l + 1, m + 1)
    # |(A xi . xi)| <= ||A|| |xi|^2, with the operator norm over C^n.
    bound = float(np.linalg.norm(a, 2))
    return MultiplierSymbolGrid(grid, values, name="constant_matrix", bound=bound)


def symbol_riesz_combination(grid: FrequencyGrid, a: float, b: float) -> MultiplierSymbolGrid:
    """a(R_2^2 - R_1^2) + 2b R_1 R_2, the constant-matrix symbol of [[a, -b], [-b, -a]].

    With a^2 + b^2 <= 1 the symbol is contractive.
    """
    grid.require_plane()
    symbol = symbol_constant_matrix(grid, np.array([[a, -b], [-b, -a]], dtype=float))
    return MultiplierSymbolGrid(
        grid, symbol.values, name=f"riesz_combination({a},{b})", bound=math.hypot(a, b)
    )


# --------------------------------------------------------------------------- #
# Derivatives and the heat semigroup
# --------------------------------------------------------------------------- #


def symbol_gradient(grid: FrequencyGrid, j: int) -> MultiplierSymbolGrid:
    """d/dx_j: -2 pi i xi_j."""
    xi, _ = spectral_arrays(grid)
    a = _axis(grid, j)
    values = -2j * np.pi * xi[a]
    values = np.where(grid.nyquist_mask(a), 0.0, values)
    return MultiplierSymbolGrid(grid, values, name=f"d{j}", bound=None)


def symbol_wirtinger(grid: FrequencyGrid, *, conjugate: bool) -> MultiplierSymbolGrid:
    """d = d1 - i d2 (conjugate=False) or dbar = d1 + i d2 (conjugate=True).

    These are twice the usual Wirtinger derivatives; B maps dbar f to d f.
    """
    grid.require_plane()
    d1 = symbol_gradient(grid, 1).values
    d2 = symbol_gradient(grid, 2).values
    values = d1 + 1j * d2 if conjugate else d1 - 1j * d2
    values = np.where(grid.nyquist_mask(0) | grid.nyquist_mask(1), 0.0, values)
    return MultiplierSymbolGrid(grid, values, name="dbar" if conjugate else "d", bound=None)


def symbol_heat(grid: FrequencyGrid, t: float) -> MultiplierSymbolGrid:
    """The semigroup of (1/2) Laplacian at time t: exp(-2 pi^2 t |xi|^2)."""
    if t < 0:
        raise GridError(f"heat time must be non-negative, got {t}")
    _, mod2 = spectral_arrays(grid)
    return MultiplierSymbolGrid(
        grid, np.exp(-2.0 * np.pi**2 * t * mod2), name=f"heat({t})", value_at_zero=1.0
    )


def symbol_imaginary_power(grid: FrequencyGrid, gamma: float) -> MultiplierSymbolGrid:
    """(-Laplacian)^{i gamma}: (4 pi^2 |xi|^2)^{i gamma}."""
    _, mod2 = spectral_arrays(grid)
    values = np.zeros(grid.shape, dtype=complex)
    nonzero = mod2 > 0
    values[nonzero] = np.exp(1j * gamma * np.log(4.0 * np.pi**2 * mod2[nonzero]))
    return MultiplierSymbolGrid(grid, values, name=f"imaginary_power({gamma})")


# --------------------------------------------------------------------------- #
# Laplace-transform-type symbols
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class ImaginaryPowerKernel:
    """The kernel a whose Laplace-type symbol is (4 pi^2 |xi|^2)^{i gamma}.

    heat:    a(t) = t^{-i gamma} / Gamma(1 - i gamma)
    poisson: a(y) = (2y)^{-2 i gamma} / Gamma(2 - 2 i gamma)

    The symbol builders recognise it and use the closed form; called directly
    it evaluates the kernel like any other `a`.
    """

    gamma: float
    semigroup: str = "heat"

    def __post_init__(self) -> None:
        if self.semigroup not in ("heat", "poisson"):
            raise ValueError(f"semigroup must be 'heat' or 'poisson', got {self.semigroup!r}")

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.semigroup == "heat":
            return np.exp(-1j * self.gamma * np.log(t)) / special.gamma(1.0 - 1j * self.gamma)
        return np.exp(-2j * self.gamma * np.log(2.0 * t)) / special.gamma(
            2.0 - 2j * self.gamma
        )


def _laplace_symbol(
    grid: FrequencyGrid,
    integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
    name: str,
    tol: float | None,
) -> MultiplierSymbolGrid:
    """Evaluate m(|xi|) = integral_0^inf integrand(u, |xi|) du over the distinct radii.

    The log-substituted trapezoid rule runs on all radii at once; its half-density
    sibling must agree to `tol` or the symbol is rejected.
    """
    tol = get_settings().quad.laplace_tol if tol is None else tol
    _, mod2 = spectral_arrays(grid)
    radii, inverse = np.unique(np.sqrt(mod2), return_inverse=True)
    u, weights = log_trapezoid_nodes()
    coarse = half_density(weights)

    values_by_radius = np.zeros(radii.shape, dtype=complex)
    worst = 0.0
    positive = np.flatnonzero(radii > 0)
    for start in range(0, positive.size, _CHUNK):
        chunk = positive[start : start + _CHUNK]
        samples = integrand(u[None, :], radii[chunk, None])
        fine_sum = samples @ weights
        coarse_sum = samples @ coarse
        worst = max(worst, float(np.max(np.abs(fine_sum - coarse_sum))))
        values_by_radius[chunk] = fine_sum
    if worst > tol:
        raise QuadratureError(
            f"{name}: trapezoid refinement changed the symbol by {worst:.3e} (tolerance {tol:.1e})"
        )
    logger.debug("%s: refinement difference %.3e over %d radii", name, worst, positive.size)
    values = values_by_radius[inverse].reshape(grid.shape)
    return MultiplierSymbolGrid(grid, values, name=name, bound=None)


def symbol_laplace_heat(
    grid: FrequencyGrid,
    a: Callable[[np.ndarray], np.ndarray],
    *,
    tol: float | None = None,
) -> MultiplierSymbolGrid:
    """4 pi^2 |xi|^2 integral_0^inf a(t) exp(-4 pi^2 t |xi|^2) dt.

    With u = 4 pi^2 |xi|^2 t the integral becomes integral a(u/lambda) e^{-u} du,
    one node set for every frequency. `a` must accept numpy arrays.
    """
    if isinstance(a, ImaginaryPowerKernel) and a.semigroup == "heat":
        return symbol_imaginary_power(grid, a.gamma)

    def integrand(u: np.ndarray, radius: np.ndarray) -> np.ndarray:
        lam = 4.0 * np.pi**2 * radius**2
        return a(u / lam) * np.exp(-u)

    return _laplace_symbol(grid, integrand, "laplace_heat", tol)


def symbol_laplace_poisson(
    grid: FrequencyGrid,
    a: Callable[[np.ndarray], np.ndarray],
    *,
    tol: float | None = None,
) -> MultiplierSymbolGrid:
    """16 pi^2 |xi|^2 integral_0^inf y a(y) exp(-4 pi y |xi|) dy.

    With u = 4 pi |xi| y this is integral u a(u / (4 pi |xi|)) e^{-u} du.
    """
    if isinstance(a, ImaginaryPowerKernel) and a.semigroup == "poisson":
        return symbol_imaginary_power(grid, a.gamma)

    def integrand(u: np.ndarray, radius: np.ndarray) -> np.ndarray:
        return u * a(u / (4.0 * np.pi * radius)) * np.exp(-u)

    return _laplace_symbol(grid, integrand, "laplace_poisson", tol)
