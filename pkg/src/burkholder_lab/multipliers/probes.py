"""Lower-bound estimates of ||T_m||_p by searching over test fields.

A probe draws fields from a few families, applies the multiplier and keeps the
largest ratio ||T_m f||_p / ||f||_p. The result bounds the operator norm from
below only; the caller supplies the known ceiling the ratio must stay under.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from burkholder_lab.constants import p_star
from burkholder_lab.errors import DomainError
from burkholder_lab.extremal import LehtoParams, lehto_field
from burkholder_lab.multipliers.grid import (
    ComplexField,
    FrequencyGrid,
    MultiplierSymbolGrid,
    apply_symbol,
    lp_norm,
)
from burkholder_lab.multipliers.symbols import symbol_wirtinger
from burkholder_lab.sampling import block_generators
from burkholder_lab.settings import get_settings

logger = logging.getLogger(__name__)

FieldFamily = Callable[[FrequencyGrid, np.random.Generator, float], tuple[ComplexField, dict]]


class OperatorProbeReport(BaseModel):
    symbol: str
    p: float
    trials: int
    max_ratio: float
    ceiling: float | None = None
    best_family: str = ""
    best_parameters: dict[str, Any] = Field(default_factory=dict)
    ratios_by_family: dict[str, float] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.ceiling is None or self.max_ratio <= self.ceiling * (1.0 + 1e-9)


# --------------------------------------------------------------------------- #
# Test-field families
# --------------------------------------------------------------------------- #


def random_bumps(
    grid: FrequencyGrid, rng: np.random.Generator, p: float
) -> tuple[ComplexField, dict]:
    """A few complex Gaussian bumps inside the middle half of the box, mean removed."""
    coords = grid.coordinates()
    count = int(rng.integers(1, 5))
    width = grid.box_length * rng.uniform(0.02, 0.08, count)
    centres = rng.uniform(-0.25, 0.25, (count, grid.dim)) * grid.box_length
    amplitudes = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    values = np.zeros(grid.shape, dtype=complex)
    for c, w, a in zip(centres, width, amplitudes, strict=True):
        r2 = sum((x - x0) ** 2 for x, x0 in zip(coords, c, strict=True))
        values += a * np.exp(-0.5 * r2 / w**2)
    values -= values.mean()
    return ComplexField(grid, values), {"bumps": count, "widths": width.tolist()}


def band_limited(
    grid: FrequencyGrid, rng: np.random.Generator, p: float
) -> tuple[ComplexField, dict]:
    """Random coefficients on an annulus of lattice frequencies."""
    radius = np.sqrt(grid.modulus_squared()) * grid.box_length
    low = float(rng.uniform(1.0, grid.size / 8))
    high = low + float(rng.uniform(1.0, grid.size / 8))
    annulus = (radius >= low) & (radius <= high)
    spectrum = np.where(
        annulus, rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape), 0.0
    )
    return ComplexField(grid, grid.inverse(spectrum)), {"band": [low, high]}


def lehto_inputs(
    grid: FrequencyGrid, rng: np.random.Generator, p: float
) -> tuple[ComplexField, dict]:
    """dbar of a discretised Lehto field; the Beurling-Ahlfors operator returns its d."""
    theta = float(rng.uniform(0.5, 0.95))
    f = lehto_field(LehtoParams.of(theta, p_star(p)), grid)
    return apply_symbol(f, symbol_wirtinger(grid, conjugate=True)), {"theta": theta}


FAMILIES: dict[str, FieldFamily] = {
    "bumps": random_bumps,
    "bandlimited": band_limited,
    "lehto": lehto_inputs,
}


# --------------------------------------------------------------------------- #
# Probe
# --------------------------------------------------------------------------- #


def operator_ratio_probe(
    m: MultiplierSymbolGrid,
    p: float,
    *,
    families: Sequence[str] = ("bumps", "bandlimited", "lehto"),
    trials: int | None = None,
    seed: int = 0,
    ceiling: float | None = None,
) -> OperatorProbeReport:
    """Maximise ||T_m f||_p / ||f||_p over `trials` fields, cycling through `families`.

    Trial j draws from family j mod len(families) with the generator of block
    j mod block_count, so the report depends only on (seed, block_count).
    """
    if p < 1:
        raise DomainError(f"p must be at least 1, got {p}")
    unknown = [name for name in families if name not in FAMILIES]
    if unknown or not families:
        raise DomainError(f"unknown test-field families: {unknown or 'none given'}")
    if "lehto" in families:
        m.grid.require_plane()
    trials = get_settings().grid.probe_trials if trials is None else trials
    if trials <= 0:
        raise DomainError("trials must be positive")

    rngs = block_generators(seed, get_settings().scan.block_count)
    best = (-np.inf, "", {})
    by_family: dict[str, float] = {}
    for j in range(trials):
        name = families[j % len(families)]
        f, parameters = FAMILIES[name](m.grid, rngs[j % len(rngs)], p)
        denominator = lp_norm(f, p)
        if denominator == 0.0:
            continue
        ratio = lp_norm(apply_symbol(f, m), p) / denominator
        by_family[name] = max(by_family.get(name, 0.0), ratio)
        if ratio > best[0]:
            best = (ratio, name, parameters)

    logger.info(
        "ratio probe %s at p=%s: max %.4f from %s (ceiling %s)",
        m.name,
        p,
        best[0],
        best[1],
        ceiling,
    )
    return OperatorProbeReport(
        symbol=m.name,
        p=p,
        trials=trials,
        max_ratio=float(max(best[0], 0.0)),
        ceiling=ceiling,
        best_family=best[1],
        best_parameters=best[2],
        ratios_by_family=by_family,
    )
