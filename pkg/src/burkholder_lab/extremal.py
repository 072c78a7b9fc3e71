"""Lehto's extremal family for the Beurling-Ahlfors operator.

    f_theta(z) = z |z|^{-2 theta / p}   for |z| < 1
               = 1 / conj(z)             for |z| >= 1

In the standard convention (d_z = (d1 - i d2) / 2) the derivatives are

    inner:  d f    = (1 - theta/p) |z|^{-2 theta/p}
            dbar f = -(theta/p) |z|^{-2 theta/p} z / conj(z)
    outer:  d f    = 0
            dbar f = -1 / conj(z)^2

so both moduli are radial and every integral over the plane is 2 pi times a
radial integral. Inner integrands are multiples of r^{1 - 2 theta} and go to
QUADPACK's algebraic-weight rule; outer integrands are multiples of r^{1 - 2p},
integrated up to the radial cut and finished with the exact tail.

`lehto_wirtinger` returns derivatives in the doubled convention used by the
matrix pullback (d = d1 - i d2); `lehto_moduli` and the integrals use the
standard one, in which the closed forms below are stated.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from burkholder_lab.constants import ExponentContext
from burkholder_lab.errors import DomainError
from burkholder_lab.functions import PlanePoint, eval_U, eval_U_min
from burkholder_lab.multipliers.grid import ComplexField, FrequencyGrid
from burkholder_lab.quadrature import QuadResult, integrate
from burkholder_lab.settings import get_settings

logger = logging.getLogger(__name__)

# Smallest radius the inner quadrature evaluates at; the weighted integrand is constant.
_INNER_FLOOR = 1e-12


@dataclass(frozen=True)
class LehtoParams:
    """theta in (0, 1) and an exponent p >= 2 (p = 2 only as the Hilbert-space check)."""

    theta: float
    ctx: ExponentContext

    def __post_init__(self) -> None:
        if not 0.0 < self.theta < 1.0:
            raise DomainError(f"theta must lie in (0, 1), got {self.theta}")
        if self.ctx.p < 2.0:
            raise DomainError(f"the Lehto computation is stated for p >= 2, got p={self.ctx.p}")

    @property
    def exponent(self) -> float:
        """2 theta / p, the power the inner branch shrinks |z| by."""
        return 2.0 * self.theta / self.ctx.p

    @classmethod
    def of(cls, theta: float, p: float) -> LehtoParams:
        return cls(theta, ExponentContext(p))


# --------------------------------------------------------------------------- #
# Pointwise
# --------------------------------------------------------------------------- #


def _lehto_complex(params: LehtoParams, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    out = np.zeros_like(z)
    inner = (r < 1.0) & (r > 0.0)
    outer = r >= 1.0
    out[inner] = z[inner] * r[inner] ** (-params.exponent)
    out[outer] = 1.0 / np.conj(z[outer])
    return out


def lehto_value(params: LehtoParams, z: PlanePoint) -> PlanePoint:
    value = _lehto_complex(params, np.array([z.to_complex()]))[0]
    return PlanePoint.from_complex(value)


def _wirtinger_standard(params: LehtoParams, z: complex) -> tuple[complex, complex]:
    r = abs(z)
    if r == 0.0:
        raise DomainError("the Lehto derivatives are singular at z = 0")
    if r < 1.0:
        s = params.theta / params.ctx.p
        scale = r ** (-params.exponent)
        return -s * scale * z / z.conjugate(), (1.0 - s) * scale
    return -1.0 / z.conjugate() ** 2, 0.0j


def lehto_wirtinger(params: LehtoParams, z: PlanePoint) -> tuple[PlanePoint, PlanePoint]:
    """(dbar f, d f) with d = d1 - i d2 and dbar = d1 + i d2."""
    dbar, d = _wirtinger_standard(params, z.to_complex())
    return PlanePoint.from_complex(2.0 * dbar), PlanePoint.from_complex(2.0 * d)


def _inner_moduli(params: LehtoParams, r: float) -> tuple[float, float]:
    s = params.theta / params.ctx.p
    scale = r ** (-params.exponent)
    return s * scale, (1.0 - s) * scale


def _outer_moduli(r: float) -> tuple[float, float]:
    return r**-2.0, 0.0


def lehto_moduli(params: LehtoParams, r: float | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(|dbar f|, |d f|) at radius r > 0 in the standard convention."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("the Lehto derivatives are singular at z = 0")
    inner_dbar, inner_d = _inner_moduli(params, r)
    outer_dbar, outer_d = _outer_moduli(r)
    inner = r < 1.0
    return np.where(inner, inner_dbar, outer_dbar), np.where(inner, inner_d, outer_d)


# --------------------------------------------------------------------------- #
# Radial quadrature
# --------------------------------------------------------------------------- #


RadialIntegrand = Callable[[float, float], float]

# The coarse level of the two-level error estimate loosens both tolerances by this factor.
COARSE_FACTOR = 1e4


def radial_integral(params: LehtoParams, g: RadialIntegrand, *, coarsen: float = 1.0) -> QuadResult:
    """Integral over the plane of g(|dbar f|, |d f|), with g homogeneous of degree p.

    Homogeneity makes the inner integrand c r^{1 - 2 theta} and the outer one
    c r^{1 - 2p}, which is what the weights and the tail formula rely on.
    `coarsen` multiplies the configured tolerances.
    """
    theta, p = params.theta, params.ctx.p
    quad = get_settings().quad
    r_cut = quad.lehto_r_cut
    tolerances = {"epsabs": quad.epsabs * coarsen, "epsrel": quad.epsrel * coarsen}

    def inner_at(r: float) -> float:
        # The rule samples the endpoint r = 0, where the moduli blow up.
        r = max(r, _INNER_FLOOR)
        return float(g(*_inner_moduli(params, r))) * r ** (2.0 * theta)

    def outer_at(r: float) -> float:
        return float(g(*_outer_moduli(r)))

    # (0, 1): pull r^{1 - 2 theta} into the algebraic weight.
    inner = integrate(
        inner_at, 0.0, 1.0, weight="alg", wvar=(1.0 - 2.0 * theta, 0.0), **tolerances
    )
    outer = integrate(lambda r: outer_at(r) * r, 1.0, r_cut, **tolerances)
    tail = outer_at(r_cut) * r_cut**2 / (2.0 * p - 2.0)
    total = inner + outer + QuadResult(tail, 0.0)
    return QuadResult(2.0 * math.pi * total.value, 2.0 * math.pi * total.abserr)


def two_level_integral(params: LehtoParams, g: RadialIntegrand) -> QuadResult:
    """`radial_integral` at the configured tolerances; abserr is |fine - coarse|."""
    fine = radial_integral(params, g)
    coarse = radial_integral(params, g, coarsen=COARSE_FACTOR)
    return QuadResult(fine.value, abs(fine.value - coarse.value))


def _modulus_pair(dbar: float, d: float) -> tuple[np.ndarray, np.ndarray]:
    return np.array([dbar, 0.0]), np.array([d, 0.0])


def lehto_lp_norms(params: LehtoParams) -> tuple[float, float]:
    """(||d f||_p, ||dbar f||_p) in closed form.

    ||d f||_p^p    = pi (1 - theta/p)^p / (1 - theta)
    ||dbar f||_p^p = pi (theta/p)^p / (1 - theta) + pi / (p - 1)
    """
    theta, p = params.theta, params.ctx.p
    d_norm = math.pi * (1.0 - theta / p) ** p / (1.0 - theta)
    dbar_norm = math.pi * (theta / p) ** p / (1.0 - theta) + math.pi / (p - 1.0)
    return d_norm ** (1.0 / p), dbar_norm ** (1.0 / p)


def _closed_ratio(params: LehtoParams) -> float:
    theta, p = params.theta, params.ctx.p
    return ((p - 1.0) * (p - theta) ** p / ((p - 1.0) * theta**p + (1.0 - theta) * p**p)) ** (
        1.0 / p
    )


def _numeric_ratio(params: LehtoParams, coarsen: float = 1.0) -> float:
    p = params.ctx.p
    d_mass = radial_integral(params, lambda dbar, d: d**p, coarsen=coarsen)
    dbar_mass = radial_integral(params, lambda dbar, d: dbar**p, coarsen=coarsen)
    return (d_mass.value / dbar_mass.value) ** (1.0 / p)


def lehto_ratio(params: LehtoParams) -> tuple[float, float]:
    """(numeric, closed_form) for ||d f||_p / ||dbar f||_p.

    The closed form ((p-1)(p-theta)^p / ((p-1) theta^p + (1-theta) p^p))^{1/p}
    tends to p - 1 as theta -> 1.
    """
    return _numeric_ratio(params), _closed_ratio(params)


def _u_integrand(ctx: ExponentContext) -> RadialIntegrand:
    return lambda dbar, d: eval_U(*_modulus_pair(dbar, d), ctx)


def _umin_integrand(ctx: ExponentContext) -> RadialIntegrand:
    return lambda dbar, d: eval_U_min(*_modulus_pair(dbar, d), ctx)


def integral_U_lehto(params: LehtoParams) -> float:  # noqa: N802
    """Integral of U(dbar f, d f) over the plane; the inner and outer parts cancel."""
    result = radial_integral(params, _u_integrand(params.ctx))
    logger.debug("integral of U for theta=%s p=%s: %.3e", params.theta, params.ctx.p, result.value)
    return result.value


def absolute_U_mass(params: LehtoParams) -> float:
    """Integral of |U(dbar f, d f)|, the scale the cancellation is measured against."""
    u = _u_integrand(params.ctx)
    return radial_integral(params, lambda dbar, d: abs(u(dbar, d))).value


def _closed_umin(p: float) -> float:
    return math.pi * (p * (1.0 - 1.0 / p) ** (p - 1.0) - (p - 1.0) ** (p - 1.0))


def integral_Umin_lehto(params: LehtoParams) -> tuple[float, float]:  # noqa: N802
    """(numeric, closed_form) for the integral of the minimal majorant U~(dbar f, d f).

    closed_form = pi (p (1 - 1/p)^{p-1} - (p-1)^{p-1}), free of theta and negative for p > 2.
    """
    numeric = radial_integral(params, _umin_integrand(params.ctx)).value
    return numeric, _closed_umin(params.ctx.p)


@dataclass(frozen=True)
class LehtoIntegrals:
    """The Lehto integrals at one (theta, p).

    Each `QuadResult.abserr` is the a-posteriori estimate |fine - coarse| between
    the configured tolerances and ones `COARSE_FACTOR` looser.
    """

    params: LehtoParams
    ratio: QuadResult
    ratio_closed: float
    u: QuadResult
    u_mass: float
    umin: QuadResult
    umin_closed: float


def lehto_integrals(params: LehtoParams) -> LehtoIntegrals:
    fine, coarse = _numeric_ratio(params), _numeric_ratio(params, COARSE_FACTOR)
    return LehtoIntegrals(
        params=params,
        ratio=QuadResult(fine, abs(fine - coarse)),
        ratio_closed=_closed_ratio(params),
        u=two_level_integral(params, _u_integrand(params.ctx)),
        u_mass=absolute_U_mass(params),
        umin=two_level_integral(params, _umin_integrand(params.ctx)),
        umin_closed=_closed_umin(params.ctx.p),
    )


# --------------------------------------------------------------------------- #
# Discretised field
# --------------------------------------------------------------------------- #


def _taper(r: np.ndarray, start: float, stop: float) -> np.ndarray:
    """1 below `start`, 0 beyond `stop`, a raised cosine between."""
    t = np.clip((r - start) / (stop - start), 0.0, 1.0)
    return 0.5 * (1.0 + np.cos(np.pi * t))


def lehto_field(params: LehtoParams, grid: FrequencyGrid) -> ComplexField:
    """A compactly supported copy of f_theta on the grid, centred in the box.

    The unit disc is scaled to radius L/16 and the 1/conj(z) tail is cut off
    smoothly between 3 and 6 of those radii, well inside the box.
    """
    grid.require_plane()
    radius = grid.box_length / 16.0
    z = grid.centred_plane()
    values = radius * _lehto_complex(params, z / radius)
    values = values * _taper(np.abs(z), 3.0 * radius, 6.0 * radius)
    return ComplexField(grid, values)
