"""Thin quadrature layer over scipy.

`integrate` wraps `scipy.integrate.quad` so every caller gets the same
tolerances (from settings) and the same failure mode: a `QuadratureError`
instead of an `IntegrationWarning` that scrolls past. The node-set helpers
build the fixed rules the symbol code vectorises over.
"""

from __future__ import annotations

import logging
import warnings
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from burkholder_lab.errors import QuadratureError
from burkholder_lab.settings import get_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadResult:
    """A quadrature value with scipy's absolute-error estimate."""

    value: float
    abserr: float

    def __add__(self, other: QuadResult) -> QuadResult:
        return QuadResult(self.value + other.value, self.abserr + other.abserr)


def integrate(
    func: Callable[[float], float],
    a: float,
    b: float,
    *,
    epsabs: float | None = None,
    epsrel: float | None = None,
    limit: int | None = None,
    **kw,
) -> QuadResult:
    """Adaptive Gauss-Kronrod quadrature of `func` over [a, b] (infinite ends allowed).

    Extra keyword arguments (`points`, `weight`, `wvar`) go straight to
    `scipy.integrate.quad`. Raises QuadratureError when scipy reports that the
    requested accuracy was not reached.
    """
    quad = get_settings().quad
    with warnings.catch_warnings():
        warnings.simplefilter("error", sp_integrate.IntegrationWarning)
        try:
            value, abserr = sp_integrate.quad(
                func,
                a,
                b,
                epsabs=quad.epsabs if epsabs is None else epsabs,
                epsrel=quad.epsrel if epsrel is None else epsrel,
                limit=quad.limit if limit is None else limit,
                **kw,
            )
        except sp_integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {exc}") from exc
    if not np.isfinite(value):
        raise QuadratureError(f"quadrature on [{a}, {b}] produced {value}")
    return QuadResult(float(value), float(abserr))


def log_trapezoid_nodes(
    log_min: float | None = None,
    log_max: float | None = None,
    step: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes u = e^s and weights for ∫₀^∞ g(u) du via the substitution s = log u.

    The returned weights already include the Jacobian e^s, so
    `sum(weights * g(nodes))` approximates the integral. The node count is made
    odd so that every second node forms the half-density rule used for the
    refinement check.
    """
    quad = get_settings().quad
    lo = quad.laplace_log_min if log_min is None else log_min
    hi = quad.laplace_log_max if log_max is None else log_max
    h = quad.laplace_step if step is None else step
    count = int(np.ceil((hi - lo) / h))
    count += count % 2  # even number of intervals
    s = np.linspace(lo, hi, count + 1)
    u = np.exp(s)
    weights = np.full_like(s, (hi - lo) / count)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return u, weights * u


def half_density(weights: np.ndarray) -> np.ndarray:
    """Weights of the coarser trapezoid rule that keeps every second node."""
    coarse = np.zeros_like(weights)
    coarse[::2] = 2.0 * weights[::2]
    coarse[0] = weights[0] * 2.0
    coarse[-1] = weights[-1] * 2.0
    return coarse


def half_circle_gauss_legendre(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre offsets and weights on [-π/2, π/2] (`nodes // 2` points).

    Two copies, centred on an angle and its antipode, integrate a function of
    the form |ξ·θ|^r g(θ) with the kinks of |ξ·θ| sitting on the panel edges.
    """
    half = nodes // 2
    x, w = special.roots_legendre(half)
    return 0.5 * np.pi * x, 0.5 * np.pi * w
