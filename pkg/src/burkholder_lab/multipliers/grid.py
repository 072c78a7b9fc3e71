"""Frequency lattices, symbols sampled on them, and fields they act on.

Fourier convention: f^(xi) = integral of e^{+2 pi i xi.x} f(x) dx, inverted by
f(x) = integral of e^{-2 pi i xi.x} f^(xi) dxi. On an n-per-axis torus of side L
that is

    forward(f) = N * ifftn(f) * dx^dim        inverse(F) = fftn(F) / L^dim

with N the total number of cells, and frequencies `fftfreq(n, d=L/n)`, i.e.
multiples of 1/L. Spatial indices count from the corner of the box; the
`coordinates` helper returns positions centred on the box.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from burkholder_lab.errors import GridError


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class FrequencyGrid:
    """A periodic box of side `box_length` with `size` cells per axis."""

    size: int
    box_length: float = 1.0
    dim: int = 2

    def __post_init__(self) -> None:
        if self.size < 8 or not _is_power_of_two(self.size):
            raise GridError(f"grid size must be a power of two and at least 8, got {self.size}")
        if not self.box_length > 0:
            raise GridError(f"box_length must be positive, got {self.box_length}")
        if self.dim < 1:
            raise GridError(f"dim must be positive, got {self.dim}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.size,) * self.dim

    @property
    def spacing(self) -> float:
        return self.box_length / self.size

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def nyquist_index(self) -> int:
        return self.size // 2

    def frequencies_1d(self) -> np.ndarray:
        return np.fft.fftfreq(self.size, d=self.spacing)

    def frequencies(self) -> list[np.ndarray]:
        """xi_1, ..., xi_dim as broadcast-ready arrays of the full grid shape."""
        axes = [self.frequencies_1d()] * self.dim
        return np.meshgrid(*axes, indexing="ij")

    def modulus_squared(self) -> np.ndarray:
        return sum(xi * xi for xi in self.frequencies())

    def nyquist_mask(self, axis: int) -> np.ndarray:
        """True on the cells whose frequency along `axis` is the Nyquist frequency."""
        index = np.zeros(self.shape, dtype=bool)
        slicer: list[slice | int] = [slice(None)] * self.dim
        slicer[axis] = self.nyquist_index
        index[tuple(slicer)] = True
        return index

    def coordinates(self) -> list[np.ndarray]:
        """Cell positions along each axis, centred so the middle cell sits at 0."""
        line = (np.arange(self.size) - self.size // 2) * self.spacing
        return np.meshgrid(*([line] * self.dim), indexing="ij")

    def centred_plane(self) -> np.ndarray:
        """Cell positions as complex numbers x1 + i x2 (dim 2 only)."""
        self.require_plane()
        x1, x2 = self.coordinates()
        return x1 + 1j * x2

    def require_plane(self) -> None:
        if self.dim != 2:
            raise GridError(f"this operation needs a planar grid, got dim={self.dim}")

    def refined(self) -> FrequencyGrid:
        """The same box at twice the resolution."""
        return FrequencyGrid(self.size * 2, self.box_length, self.dim)

    # ------------------------------------------------------------------ #
    # Transforms
    # ------------------------------------------------------------------ #

    def forward(self, values: np.ndarray) -> np.ndarray:
        self._check(values)
        return np.fft.ifftn(values) * values.size * self.cell_volume

    def inverse(self, spectrum: np.ndarray) -> np.ndarray:
        self._check(spectrum)
        return np.fft.fftn(spectrum) / self.box_length**self.dim

    def _check(self, values: np.ndarray) -> None:
        if values.shape != self.shape:
            raise GridError(f"array shape {values.shape} does not match grid {self.shape}")


@dataclass(frozen=True, eq=False)
class MultiplierSymbolGrid:
    """A Fourier multiplier sampled on a grid.

    `bound` is the sup-norm the symbol is known to satisfy (None when it is
    unbounded, as for derivatives). The value at xi = 0 is stored in the array
    and mirrored in `value_at_zero`.
    """

    grid: FrequencyGrid
    values: np.ndarray
    name: str = "symbol"
    bound: float | None = 1.0
    value_at_zero: complex = 0.0
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            raise GridError(f"symbol shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise GridError(f"symbol {self.name!r} has non-finite values")
        values = values.copy()
        values[(0,) * self.grid.dim] = self.value_at_zero
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __mul__(self, other: MultiplierSymbolGrid) -> MultiplierSymbolGrid:
        """Composition of the two operators."""
        if other.grid != self.grid:
            raise GridError("cannot compose symbols on different grids")
        bound = None if self.bound is None or other.bound is None else self.bound * other.bound
        return MultiplierSymbolGrid(
            self.grid,
            self.values * other.values,
            name=f"{self.name}*{other.name}",
            bound=bound,
            value_at_zero=self.value_at_zero * other.value_at_zero,
        )

    def scaled(self, factor: complex, name: str | None = None) -> MultiplierSymbolGrid:
        bound = None if self.bound is None else abs(factor) * self.bound
        return MultiplierSymbolGrid(
            self.grid,
            factor * self.values,
            name=name or f"{factor}*{self.name}",
            bound=bound,
            value_at_zero=factor * self.value_at_zero,
        )

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def within_bound(self, slack: float = 1e-12) -> bool:
        return self.bound is None or self.sup() <= self.bound + slack

    def reflected(self) -> np.ndarray:
        """m(-xi) on the lattice."""
        flipped = self.values
        for axis in range(self.grid.dim):
            flipped = np.roll(np.flip(flipped, axis=axis), 1, axis=axis)
        return flipped

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        """m(-xi) == conj(m(xi)); such symbols map real fields to real fields."""
        return bool(np.max(np.abs(self.reflected() - np.conj(self.values))) <= tol)


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex samples of a function on the spatial lattice of `grid`."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            raise GridError(f"field shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise GridError("field has non-finite values")
        object.__setattr__(self, "values", values)

    @property
    def dx(self) -> float:
        return self.grid.cell_volume

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def __add__(self, other: ComplexField) -> ComplexField:
        return ComplexField(self.grid, self.values + other.values)

    def __sub__(self, other: ComplexField) -> ComplexField:
        return ComplexField(self.grid, self.values - other.values)

    def scaled(self, factor: complex) -> ComplexField:
        return ComplexField(self.grid, factor * self.values)


def apply_symbol(f: ComplexField, m: MultiplierSymbolGrid) -> ComplexField:
    """inverse(m * forward(f)); the normalising factors cancel, leaving fftn(m * ifftn(f))."""
    if f.grid != m.grid:
        raise GridError(f"field grid {f.grid} does not match symbol grid {m.grid}")
    return ComplexField(f.grid, np.fft.fftn(m.values * np.fft.ifftn(f.values)))


def lp_norm(f: ComplexField | np.ndarray, p: float, dx: float | None = None) -> float:
    """(sum |f|^p dx)^(1/p); with a bare array, `dx` must be given."""
    if p < 1:
        raise GridError(f"lp_norm needs p >= 1, got {p}")
    if isinstance(f, ComplexField):
        values, cell = f.values, f.dx
    else:
        if dx is None:
            raise GridError("lp_norm of a bare array needs dx")
        values, cell = np.asarray(f), dx
    return float((np.sum(np.abs(values) ** p) * cell) ** (1.0 / p))


@lru_cache(maxsize=8)
def spectral_arrays(grid: FrequencyGrid) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    """(xi_1, ..., xi_dim) and |xi|^2 for `grid`, built once and shared read-only."""
    xi = tuple(grid.frequencies())
    modulus_squared = sum(component * component for component in xi)
    for array in (*xi, modulus_squared):
        array.setflags(write=False)
    return xi, modulus_squared
