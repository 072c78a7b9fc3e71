"""Second differences along lines, and the report every convexity scan returns."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from burkholder_lab.errors import DomainError, NonFiniteError

# The step bounds a probe accepts; below them float noise swamps the difference.
MIN_STEP = 1e-6
MAX_STEP = 1e-2

ArrayFunction = Callable[[np.ndarray], np.ndarray | float]


def stack_pair(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """(x, y) points of the plane as one (..., 2, 2) array, x in row 0."""
    return np.stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)], axis=-2)


def on_pairs(fn: Callable[[np.ndarray, np.ndarray], Any]) -> ArrayFunction:
    """Adapt f(x, y) to the stacked layout of `stack_pair`."""
    return lambda z: fn(z[..., 0, :], z[..., 1, :])


@dataclass(frozen=True)
class DirectionalProbe:
    """A line t -> base + t * direction and the finite-difference step along it.

    `base` and `direction` share a shape: a stacked pair of plane points or a
    2x2 matrix, with any number of leading batch axes.
    """

    base: np.ndarray
    direction: np.ndarray
    step: float = 1e-2

    def __post_init__(self) -> None:
        base = np.asarray(self.base, dtype=float)
        direction = np.asarray(self.direction, dtype=float)
        if base.shape != direction.shape:
            raise DomainError(f"base {base.shape} and direction {direction.shape} differ in shape")
        if not MIN_STEP <= self.step <= MAX_STEP:
            raise DomainError(f"step must lie in [{MIN_STEP}, {MAX_STEP}], got {self.step}")
        if not (np.all(np.isfinite(base)) and np.all(np.isfinite(direction))):
            raise DomainError("probe base and direction must be finite")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "direction", direction)


@dataclass(frozen=True)
class SecondDifference:
    """Central second difference at step h/2 and its Richardson extrapolation from (h, h/2).

    Violation tests compare against an absolute tolerance, whatever the size of
    the function at the base point.
    """

    central: np.ndarray
    extrapolated: np.ndarray

    @property
    def value(self) -> np.ndarray:
        return self.extrapolated

    def concavity_violations(self, tol: float) -> np.ndarray:
        """True where both estimates exceed tol."""
        return np.minimum(self.central, self.extrapolated) > tol

    def convexity_violations(self, tol: float) -> np.ndarray:
        return np.maximum(self.central, self.extrapolated) < -tol


def _evaluate(fn: ArrayFunction, points: np.ndarray) -> np.ndarray:
    values = np.asarray(fn(points), dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteError("function under test returned a non-finite value")
    return values


def directional_second_diff(fn: ArrayFunction, probe: DirectionalProbe) -> SecondDifference:
    """Second derivative of t -> fn(base + t direction) at t = 0 by finite differences.

    D(s) = (fn(+s) - 2 fn(0) + fn(-s)) / s^2 is taken at s = h and s = h/2; the
    extrapolation (4 D(h/2) - D(h)) / 3 removes the s^2 error term.
    """
    h = probe.step
    base, direction = probe.base, probe.direction
    centre = _evaluate(fn, base)
    plus_h = _evaluate(fn, base + h * direction)
    minus_h = _evaluate(fn, base - h * direction)
    plus_half = _evaluate(fn, base + 0.5 * h * direction)
    minus_half = _evaluate(fn, base - 0.5 * h * direction)
    coarse = (plus_h - 2.0 * centre + minus_h) / h**2
    fine = (plus_half - 2.0 * centre + minus_half) / (0.5 * h) ** 2
    return SecondDifference(fine, (4.0 * fine - coarse) / 3.0)


class ScanReport(BaseModel):
    """What a convexity scan found. Violations are data here, never exceptions.

    `expect_violations` marks the harness self-tests, which pass only when they
    do find violations.
    """

    function: str
    p: float | None = None
    samples: int
    min_value: float
    max_value: float
    violations: int
    tolerance: float
    worst_case_parameters: dict[str, Any] = Field(default_factory=dict)
    expect_violations: bool = False

    @property
    def passed(self) -> bool:
        return self.violations > 0 if self.expect_violations else self.violations == 0
