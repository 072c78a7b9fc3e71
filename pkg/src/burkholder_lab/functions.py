"""Burkholder's special functions and their matrix pullback.

    V(x, y)  = |y|^p - (p*-1)^p |x|^p
    U(x, y)  = alpha_p (|y| - (p*-1)|x|) (|x| + |y|)^(p-1)
    U~(x, y) = V or U depending on the side of |y| = (p*-1)|x|
    Psi_U(A) = -U(w, z) with (z, w) = gamma_map(A)

Arguments are points of the plane. Each evaluator accepts a `PlanePoint`, a
Python complex, or a numpy array whose trailing axis has length 2; with arrays
the result is an array over the leading axes, which is how the property scans
evaluate a whole batch in one call. Matrices are `Matrix2` or arrays of shape
(..., 2, 2).

Derivatives follow the convention d = d1 - i d2, dbar = d1 + i d2, twice the
usual Wirtinger operators. With it, Psi_U(Df) = -U(dbar f, d f) holds exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from burkholder_lab.constants import ExponentContext
from burkholder_lab.errors import DomainError

# --------------------------------------------------------------------------- #
# Points and matrices
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class PlanePoint:
    """A point of C = R^2."""

    re: float
    im: float

    @property
    def norm(self) -> float:
        return math.hypot(self.re, self.im)

    def to_array(self) -> np.ndarray:
        return np.array([self.re, self.im])

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def from_complex(cls, z: complex) -> PlanePoint:
        return cls(float(z.real), float(z.imag))


@dataclass(frozen=True)
class Matrix2:
    """A real 2x2 matrix [[a, b], [c, d]]."""

    a: float
    b: float
    c: float
    d: float

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @classmethod
    def from_array(cls, m: np.ndarray) -> Matrix2:
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise DomainError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    @classmethod
    def identity(cls) -> Matrix2:
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def zero(cls) -> Matrix2:
        return cls(0.0, 0.0, 0.0, 0.0)


PointLike = Union[PlanePoint, complex, np.ndarray]
MatrixLike = Union[Matrix2, np.ndarray]


def _as_array(v: PointLike) -> np.ndarray:
    if isinstance(v, PlanePoint):
        return v.to_array()
    if isinstance(v, complex | float | int):
        return np.array([float(np.real(v)), float(np.imag(v))])
    return np.asarray(v, dtype=float)


def _modulus(v: PointLike) -> np.ndarray | float:
    arr = _as_array(v)
    return np.hypot(arr[..., 0], arr[..., 1])


def _dot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1]


def _scalar_or_array(value: np.ndarray | float) -> np.ndarray | float:
    return float(value) if np.ndim(value) == 0 else value


def _matrix_entries(m: MatrixLike) -> tuple[np.ndarray, ...]:
    if isinstance(m, Matrix2):
        return (np.float64(m.a), np.float64(m.b), np.float64(m.c), np.float64(m.d))
    arr = np.asarray(m, dtype=float)
    if arr.shape[-2:] != (2, 2):
        raise DomainError(f"expected trailing shape (2, 2), got {arr.shape}")
    return arr[..., 0, 0], arr[..., 0, 1], arr[..., 1, 0], arr[..., 1, 1]


# --------------------------------------------------------------------------- #
# V, U and the minimal majorant
# --------------------------------------------------------------------------- #


def eval_V(x: PointLike, y: PointLike, ctx: ExponentContext) -> np.ndarray | float:
    p = ctx.p
    value = _modulus(y) ** p - ctx.transform_constant**p * _modulus(x) ** p
    return _scalar_or_array(value)


def eval_U(x: PointLike, y: PointLike, ctx: ExponentContext) -> np.ndarray | float:
    nx, ny = _modulus(x), _modulus(y)
    value = ctx.alpha_p * (ny - ctx.transform_constant * nx) * (nx + ny) ** (ctx.p - 1.0)
    return _scalar_or_array(value)


def eval_U_min(x: PointLike, y: PointLike, ctx: ExponentContext) -> np.ndarray | float:
    """The smallest zigzag-biconcave majorant of V.

    For p >= 2 it is V on |y| <= (p*-1)|x| and U beyond; for 1 < p <= 2 the
    two branches swap sides. The branches agree on the interface.
    """
    inside = _modulus(y) <= ctx.transform_constant * _modulus(x)
    v = np.asarray(eval_V(x, y, ctx))
    u = np.asarray(eval_U(x, y, ctx))
    value = np.where(inside, v, u) if ctx.p >= 2.0 else np.where(inside, u, v)
    return _scalar_or_array(value)


def eval_pichorides(x: np.ndarray | float, y: np.ndarray | float, ctx: ExponentContext):
    """-tan(pi/2p) R^p cos(p theta) with |x| = R cos(theta), y = R sin(theta); 1 < p <= 2."""
    p = ctx.p
    if p > 2.0:
        raise DomainError(f"the Pichorides function is used for 1 < p <= 2, got p={p}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    radius = np.hypot(x, y)
    theta = np.arctan2(y, np.abs(x))
    value = -math.tan(math.pi / (2.0 * p)) * radius**p * np.cos(p * theta)
    return _scalar_or_array(value)


def eval_weaktype_W(x: PointLike, y: PointLike, c: float, p: float) -> np.ndarray | float:
    """1 - c^p|x|^p where |y| >= 1, and -c^p|x|^p elsewhere."""
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    if p < 1.0:
        raise DomainError(f"p must be at least 1, got {p}")
    penalty = c**p * _modulus(x) ** p
    value = np.where(_modulus(y) >= 1.0, 1.0, 0.0) - penalty
    return _scalar_or_array(value)


# --------------------------------------------------------------------------- #
# Second-order structure
# --------------------------------------------------------------------------- #


def second_order_terms(
    x: PointLike, y: PointLike, h: PointLike, k: PointLike, ctx: ExponentContext
) -> tuple[np.ndarray | float, np.ndarray | float, np.ndarray | float]:
    """The terms A, B, C with d^2/dt^2 U(x+th, y+tk) at t=0 equal to -alpha_p (A+B+C).

    Defined for p > 2 and |x||y| != 0. B and C are never negative.
    """
    p = ctx.p
    if p <= 2.0:
        raise DomainError(f"second_order_terms is stated for p > 2, got p={p}")
    xa, ya, ha, ka = (_as_array(v) for v in (x, y, h, k))
    nx, ny = np.hypot(xa[..., 0], xa[..., 1]), np.hypot(ya[..., 0], ya[..., 1])
    if np.any(nx == 0) or np.any(ny == 0):
        raise DomainError("second_order_terms needs |x| > 0 and |y| > 0")
    s = nx + ny
    x_unit = xa / nx[..., None] if np.ndim(nx) else xa / nx
    y_unit = ya / ny[..., None] if np.ndim(ny) else ya / ny
    yk = _dot(y_unit, ka)
    term_a = p * (p - 1.0) * (_dot(ha, ha) - _dot(ka, ka)) * s ** (p - 2.0)
    term_b = p * (p - 2.0) * (_dot(ka, ka) - yk**2) / ny * s ** (p - 1.0)
    term_c = p * (p - 1.0) * (p - 2.0) * (_dot(x_unit, ha) + yk) ** 2 * nx * s ** (p - 3.0)
    return (_scalar_or_array(term_a), _scalar_or_array(term_b), _scalar_or_array(term_c))


# --------------------------------------------------------------------------- #
# The matrix pullback
# --------------------------------------------------------------------------- #


def gamma_map(a: MatrixLike) -> tuple[np.ndarray, np.ndarray]:
    """(z, w) = ((a+d, c-b), (a-d, c+b)); arrays with a trailing axis of 2."""
    ea, eb, ec, ed = _matrix_entries(a)
    z = np.stack([ea + ed, ec - eb], axis=-1)
    w = np.stack([ea - ed, ec + eb], axis=-1)
    return z, w


def eval_psi_U(a: MatrixLike, ctx: ExponentContext) -> np.ndarray | float:
    """Psi_U(A) = -U(w, z). For A = Df this is -U(dbar f, d f)."""
    z, w = gamma_map(a)
    return _scalar_or_array(-np.asarray(eval_U(w, z, ctx)))


def eval_psi_U_printed(a: MatrixLike, ctx: ExponentContext) -> np.ndarray | float:
    """The expanded radical form of Psi_U in the matrix entries.

    It writes the transform constant as p-1, so it agrees with `eval_psi_U`
    only for p >= 2.
    """
    ea, eb, ec, ed = _matrix_entries(a)
    p = ctx.p
    rz = np.sqrt((ea + ed) ** 2 + (ec - eb) ** 2)
    rw = np.sqrt((ea - ed) ** 2 + (ec + eb) ** 2)
    value = -ctx.alpha_p * (rz - (p - 1.0) * rw) * (rz + rw) ** (p - 1.0)
    return _scalar_or_array(value)


def rank_one_direction(
    h_prime: PointLike, k_prime: PointLike
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The rank-one matrix h'(x)k' and its image under the linear map gamma_map.

    Returns (B, h, k) where B has shape (..., 2, 2), h is the w-component of
    gamma_map(B) and k its z-component, so that
    Psi_U(A + tB) = -U(w + th, z + tk) and |h| = |k| = |h'||k'|.
    """
    hp, kp = _as_array(h_prime), _as_array(k_prime)
    outer = hp[..., :, None] * kp[..., None, :]
    z, w = gamma_map(outer)
    return outer, w, z
