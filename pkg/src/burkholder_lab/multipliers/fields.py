"""Field files: the BFLD binary container and CSV, one reader and one writer per format.

BFLD layout, all little-endian:

    4 bytes   magic b"BFLD"
    u16       container version (1)
    u16       dim
    u32 x dim size per axis
    then prod(sizes) pairs of float64 (re, im), row-major

For a planar field the header is 16 bytes. CSV files carry one row per cell
with columns i0..i{dim-1}, re, im, also row-major; they are meant for small
grids. Symbols are written with the same container as fields.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

import numpy as np
import pandas as pd

from burkholder_lab.errors import FieldFormatError, GridError
from burkholder_lab.multipliers.grid import ComplexField, FrequencyGrid, MultiplierSymbolGrid

logger = logging.getLogger(__name__)

MAGIC = b"BFLD"
VERSION = 1
SUPPORTED_FORMATS = ("bfld", "csv")

_PREFIX = struct.Struct("<4sHH")


# --------------------------------------------------------------------------- #
# BFLD
# --------------------------------------------------------------------------- #


def encode_bfld(values: np.ndarray) -> bytes:
    values = np.ascontiguousarray(values, dtype="<c16")
    header = _PREFIX.pack(MAGIC, VERSION, values.ndim)
    header += struct.pack(f"<{values.ndim}I", *values.shape)
    return header + values.tobytes(order="C")


def decode_bfld(data: bytes) -> np.ndarray:
    if len(data) < _PREFIX.size:
        raise FieldFormatError("file is shorter than the BFLD header")
    magic, version, dim = _PREFIX.unpack_from(data)
    if magic != MAGIC:
        raise FieldFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FieldFormatError(f"unsupported BFLD version {version}")
    if dim == 0:
        raise FieldFormatError("BFLD header declares zero dimensions")
    offset = _PREFIX.size + 4 * dim
    if len(data) < offset:
        raise FieldFormatError("file ends inside the BFLD size table")
    sizes = struct.unpack_from(f"<{dim}I", data, _PREFIX.size)
    expected = offset + 16 * int(np.prod(sizes))
    if len(data) != expected:
        raise FieldFormatError(
            f"payload holds {len(data) - offset} bytes, expected {expected - offset}"
        )
    return np.frombuffer(data, dtype="<c16", offset=offset).reshape(sizes).astype(complex)


def _read_bfld(path: Path) -> np.ndarray:
    return decode_bfld(path.read_bytes())


def _write_bfld(path: Path, values: np.ndarray) -> None:
    path.write_bytes(encode_bfld(values))


# --------------------------------------------------------------------------- #
# CSV
# --------------------------------------------------------------------------- #


def _read_csv(path: Path) -> np.ndarray:
    frame = pd.read_csv(path, float_precision="round_trip")
    index_columns = sorted(
        (c for c in frame.columns if c.startswith("i") and c[1:].isdigit()),
        key=lambda c: int(c[1:]),
    )
    if not index_columns or not {"re", "im"} <= set(frame.columns):
        raise FieldFormatError("CSV field needs columns i0.., re and im")
    indices = frame[index_columns].to_numpy(dtype=np.int64)
    if np.any(indices < 0):
        raise FieldFormatError("CSV field has negative indices")
    shape = tuple(int(n) for n in indices.max(axis=0) + 1)
    if len(frame) != int(np.prod(shape)):
        raise FieldFormatError(f"CSV field has {len(frame)} rows for a grid of shape {shape}")
    values = np.full(shape, np.nan, dtype=complex)
    values[tuple(indices.T)] = frame["re"].to_numpy(float) + 1j * frame["im"].to_numpy(float)
    if np.isnan(values).any():
        raise FieldFormatError("CSV field has repeated or missing cells")
    return values


def _write_csv(path: Path, values: np.ndarray) -> None:
    grids = np.meshgrid(*(np.arange(n) for n in values.shape), indexing="ij")
    frame = pd.DataFrame({f"i{axis}": g.reshape(-1) for axis, g in enumerate(grids)})
    flat = values.reshape(-1)
    frame["re"] = flat.real
    frame["im"] = flat.imag
    frame.to_csv(path, index=False, float_format="%.17g")


_READERS = {"bfld": _read_bfld, "csv": _read_csv}
_WRITERS = {"bfld": _write_bfld, "csv": _write_csv}


# --------------------------------------------------------------------------- #
# Public API
# --------------------------------------------------------------------------- #


def _format_of(path: Path) -> str:
    kind = path.suffix.lower().lstrip(".")
    if kind not in _READERS:
        raise FieldFormatError(
            f"unsupported field format: {path.suffix!r} "
            f"(supported: {', '.join(SUPPORTED_FORMATS)})"
        )
    return kind


def read_field(path: str | Path, box_length: float = 1.0) -> ComplexField:
    """Load a field; the grid size and dimension come from the file.

    Raises FieldFormatError for unknown extensions and malformed files, and
    GridError when the stored shape is not a valid grid.
    """
    path = Path(path)
    reader = _READERS[_format_of(path)]
    try:
        values = reader(path)
    except (FieldFormatError, FileNotFoundError):
        raise
    except (OSError, ValueError, KeyError, struct.error) as exc:
        raise FieldFormatError(f"error reading {path.name}: {exc}") from exc
    if len(set(values.shape)) != 1:
        raise GridError(f"field grids are cubic, got shape {values.shape}")
    grid = FrequencyGrid(values.shape[0], box_length, values.ndim)
    logger.debug("read %s field of shape %s from %s", path.suffix, values.shape, path)
    return ComplexField(grid, values)


def write_field(
    path: str | Path, field: ComplexField | MultiplierSymbolGrid | np.ndarray
) -> Path:
    path = Path(path)
    writer = _WRITERS[_format_of(path)]
    values = np.asarray(field.values if hasattr(field, "values") else field, dtype=complex)
    if not np.all(np.isfinite(values)):
        raise GridError("refusing to write a field with non-finite values")
    path.parent.mkdir(parents=True, exist_ok=True)
    writer(path, values)
    return path
