"""Sharp constants of the martingale and singular-integral inequalities.

Every function here is a pure function of its exponent and returns a float.
Closed forms are evaluated directly; the few constants that are series or
integrals go through `dirichlet_beta` (alternating series) or
`burkholder_lab.quadrature.integrate` (scipy's adaptive Gauss-Kronrod).

The exponent p is carried around as an `ExponentContext`, which derives p*, the
conjugate q and Burkholder's normalising factor alpha_p once and validates
p > 1 at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from burkholder_lab.errors import DomainError
from burkholder_lab.quadrature import integrate
from burkholder_lab.settings import get_settings

# Terms of the convergence-accelerated alternating sum; the error is below
# 2 * 5.83**-n, so 30 terms are well past double precision.
_ACCELERATION_TERMS = 30

# Constant in the 1.575(p*-1) bound for the Beurling-Ahlfors operator.
BEURLING_REFINED_FACTOR = 1.575


def _require_above_one(p: float) -> None:
    if not p > 1:
        raise DomainError(f"exponent must exceed 1, got p={p}")


# --------------------------------------------------------------------------- #
# Exponents
# --------------------------------------------------------------------------- #


def p_star(p: float) -> float:
    """max(p, p/(p-1))."""
    _require_above_one(p)
    return max(p, p / (p - 1.0))


@dataclass(frozen=True)
class ExponentContext:
    """An exponent p > 1 with the quantities every formula derives from it."""

    p: float

    def __post_init__(self) -> None:
        _require_above_one(self.p)
        object.__setattr__(self, "p", float(self.p))

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def p_star(self) -> float:
        return max(self.p, self.q)

    @property
    def alpha_p(self) -> float:
        return self.p * (1.0 - 1.0 / self.p_star) ** (self.p - 1.0)

    @property
    def transform_constant(self) -> float:
        """p* - 1, the sharp martingale transform constant."""
        return self.p_star - 1.0


def burkholder_constant(p: float) -> float:
    """p* - 1: the best constant for martingale transforms and subordinate martingales."""
    return p_star(p) - 1.0


# --------------------------------------------------------------------------- #
# Special functions
# --------------------------------------------------------------------------- #


def gamma(z: complex | float) -> complex | float:
    """Gamma function; complex arguments allowed."""
    return special.gamma(z)


def loggamma(z: complex | float) -> complex | float:
    """Principal branch of log Gamma; complex arguments allowed."""
    return special.loggamma(z)


def dirichlet_beta(s: float) -> float:
    """Sum_{k>=0} (-1)^k / (2k+1)^s, for s > 0.

    Uses the Cohen-Rodriguez Villegas-Zagier acceleration for alternating
    series whose terms are moments of a positive measure, which 1/(2k+1)^s are.
    """
    if not s > 0:
        raise DomainError(f"dirichlet_beta needs s > 0, got s={s}")
    n = _ACCELERATION_TERMS
    d = (3.0 + math.sqrt(8.0)) ** n
    d = 0.5 * (d + 1.0 / d)
    b, c, total = -1.0, -d, 0.0
    for k in range(n):
        c = b - c
        total += c / (2 * k + 1) ** s
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1))
    return total / d


def catalan() -> float:
    """Catalan's constant, beta(2)."""
    return dirichlet_beta(2.0)


def _alternating_odd_power_sum(s: float, tol: float) -> float:
    """Sum (-1)^k (2k+1)^-s directly, stopping once the next term is below tol."""
    count = max(1, math.ceil(0.5 * (tol ** (-1.0 / s) - 1.0)))
    k = np.arange(count, dtype=float)
    terms = (2.0 * k + 1.0) ** (-s)
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    # Smallest terms first keeps the rounding of the partial sums low.
    return float(np.sum((signs * terms)[::-1]))


# --------------------------------------------------------------------------- #
# Orthogonal and conformal martingales
# --------------------------------------------------------------------------- #


def cot_constant(p: float) -> float:
    """cot(pi / 2p*): best constant for orthogonal martingales (and the Hilbert transform)."""
    return 1.0 / math.tan(math.pi / (2.0 * p_star(p)))


def csc_constant(p: float) -> float:
    """csc(pi / 2p*): the companion constant for the norm of (X, Y)."""
    return 1.0 / math.sin(math.pi / (2.0 * p_star(p)))


def cot_asymptotic_ratio(p: float) -> float:
    """cot(pi/2p*)/(p*-1); tends to 2/pi as p -> 1 or p -> infinity."""
    return cot_constant(p) / burkholder_constant(p)


def davis_d1() -> float:
    """pi^2 / (8 * Catalan): the weak-type (1,1) constant for orthogonal martingales."""
    return math.pi**2 / (8.0 * catalan())


def weak_dp(p: float) -> float:
    """Weak-type constant D_p for orthogonal Y << X, defined for 1 <= p <= 2.

    The integral over the real line folds onto (0, 1) through t -> -t and
    t -> 1/t, leaving a log-singular integrand that the adaptive rule handles.
    """
    if not 1.0 <= p <= 2.0:
        raise DomainError(f"weak_dp is known only for 1 <= p <= 2, got p={p}")
    folded = integrate(lambda u: (-math.log(u)) ** p / (1.0 + u * u) if u > 0 else 0.0, 0.0, 1.0)
    moment = 4.0 * folded.value * (2.0 / math.pi) ** p / math.pi
    return 1.0 / moment


def osekowski_cpinf(p: float) -> float:
    """Best C_{p,inf} in ||Y||_{p,inf} <= C ||X||_p for orthogonal Y << X."""
    _require_above_one(p)
    if p <= 2.0:
        return 1.0
    tol = get_settings().quad.series_tol
    series = _alternating_odd_power_sum(p + 1.0, tol)
    log_prefactor = (p + 2.0) * math.log(2.0) + math.lgamma(p + 1.0) - (p + 1.0) * math.log(math.pi)
    return (math.exp(log_prefactor) * series) ** (1.0 / p)


def osekowski_c1p(p: float) -> float:
    """C_{1,p}, which equals C_{p/(p-1),inf}."""
    _require_above_one(p)
    return osekowski_cpinf(p / (p - 1.0))


def conformal_constant(p: float) -> float:
    """sqrt(p(p-1)/2), p >= 2: Y conformal and subordinate to X."""
    if p < 2.0:
        raise DomainError(f"conformal_constant is stated for p >= 2, got p={p}")
    return math.sqrt(p * (p - 1.0) / 2.0)


def right_conformal_constant(p: float) -> float:
    """sqrt(2/(p(p-1))), 1 < p <= 2: X conformal with Y << X."""
    _require_above_one(p)
    if p > 2.0:
        raise DomainError(f"right_conformal_constant is stated for 1 < p <= 2, got p={p}")
    return math.sqrt(2.0 / (p * (p - 1.0)))


def subordinate_vector_constant(p: float, m: int) -> tuple[float, float]:
    """(p-1, sqrt((m+p-2)/(p-1))) for an m-dimensional orthogonal, equal-norm Y.

    The second value is the factor by which Y^1 may be scaled while staying
    subordinate to X; the first is the resulting bound for p >= 2.
    """
    if p < 2.0:
        raise DomainError(f"subordinate_vector_constant is stated for p >= 2, got p={p}")
    if m < 2:
        raise DomainError(f"dimension must be at least 2, got m={m}")
    return p - 1.0, math.sqrt((m + p - 2.0) / (p - 1.0))


# --------------------------------------------------------------------------- #
# Weak type and the Choi constant
# --------------------------------------------------------------------------- #


def weak_subordinate_constant(p: float) -> float:
    """2/Gamma(p+1) for 1 <= p <= 2, p^(p-1)/2 for p >= 2."""
    if p < 1.0:
        raise DomainError(f"weak_subordinate_constant needs p >= 1, got p={p}")
    if p <= 2.0:
        return 2.0 / math.gamma(p + 1.0)
    return p ** (p - 1.0) / 2.0


_CHOI_LOG = math.log((1.0 + math.exp(-2.0)) / 2.0)


def choi_alpha2() -> float:
    """Second-order coefficient of the large-p expansion of the Choi constant."""
    ratio = math.exp(-2.0) / (1.0 + math.exp(-2.0))
    return _CHOI_LOG**2 + 0.5 * _CHOI_LOG - 2.0 * ratio**2


def choi_cp_approx(p: float) -> float:
    """Large-p approximation of the best constant for transforms with values in [0, 1]."""
    _require_above_one(p)
    return p / 2.0 + 0.5 * _CHOI_LOG + choi_alpha2() / p


def choi_bracket(p: float) -> tuple[float, float]:
    """(max(1, p*/2 - 1), p*/2): the proven bracket for the Choi constant."""
    star = p_star(p)
    return max(1.0, star / 2.0 - 1.0), star / 2.0


# --------------------------------------------------------------------------- #
# Beurling-Ahlfors bounds
# --------------------------------------------------------------------------- #


def sigma_p(p: float, nodes: int | None = None) -> float:
    """(mean of |cos t|^p over the circle)^(-1/p), by the periodic trapezoid rule."""
    if not p > 0:
        raise DomainError(f"sigma_p needs p > 0, got p={p}")
    n = get_settings().quad.sigma_nodes if nodes is None else nodes
    t = 2.0 * np.pi * np.arange(n) / n
    return float(np.mean(np.abs(np.cos(t)) ** p) ** (-1.0 / p))


def beurling_ceilings(p: float) -> dict[str, float]:
    """Known upper bounds for ||B||_p, plus the lower bound p*-1 under `lower`.

    Bounds stated only for p >= 2 are left out below that range. The `real_*`
    entries bound B on real-valued functions (or the real part of Bf). The sigma
    bounds are evaluated at p*; B has the same norm on L^p and on the dual space.
    """
    star = p_star(p)
    star_minus_one = star - 1.0
    sigma = sigma_p(star)
    bounds = {
        "lower": star_minus_one,
        "subordinate": 2.0 * star_minus_one,
        "refined": BEURLING_REFINED_FACTOR * star_minus_one,
        "real_functions": math.sqrt(2.0) * star_minus_one,
        "real_part": math.sqrt(2.0) * star_minus_one,
        "projection_sigma": sigma * star,
        "projection_sigma_complex": math.sqrt(2.0) * sigma * star,
    }
    if p >= 2.0:
        bounds["conformal"] = math.sqrt(2.0 * p * (p - 1.0))
        bounds["real_conformal"] = math.sqrt(p * (p - 1.0))
    return bounds


def imaginary_power_bounds(p: float, gamma_: float) -> tuple[float, float]:
    """Bounds on ||(-Delta)^{i gamma}||_p from the heat and Poisson representations.

    Returns (heat, poisson) = ((p*-1)/|Gamma(1-i gamma)|, (p*-1)/|Gamma(2-2i gamma)|).
    The heat bound is never the larger of the two.
    """
    star_minus_one = burkholder_constant(p)
    heat = star_minus_one / abs(special.gamma(1.0 - 1j * gamma_))
    poisson = star_minus_one / abs(special.gamma(2.0 - 2j * gamma_))
    return float(heat), float(poisson)


def matrix_operator_norm(a: np.ndarray, field: str = "complex") -> float:
    """Operator norm of A on C^n (`field="complex"`) or on R^n (`field="real"`).

    On R^n, |Ax|^2 = x^T Re(A^H A) x, so the norm is the root of the top
    eigenvalue of that real symmetric matrix.
    """
    a = np.asarray(a, dtype=complex)
    if field == "complex":
        return float(np.linalg.norm(a, 2))
    if field == "real":
        gram = np.real(a.conj().T @ a)
        return float(math.sqrt(max(np.linalg.eigvalsh(gram)[-1], 0.0)))
    raise DomainError(f"field must be 'complex' or 'real', got {field!r}")


def projection_bound(a: np.ndarray, p: float, field: str = "complex") -> float:
    """||A|| (p*-1): the bound for the space-time projection of a transform by A."""
    return matrix_operator_norm(a, field) * burkholder_constant(p)
