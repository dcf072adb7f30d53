"""Grid snapshot file formats and atomic file writing.

Two interchangeable on-disk representations of a scalar grid:

* CSV: one row per grid row, plain decimal floats;
* binary ``.wbfg``: a 16-byte header (magic ``WBFG``, u32 width, u32 height,
  u32 dtype code, little-endian) followed by row-major float32 values.

Both are bit-exact round trips of a float32 grid. All writers go through
:func:`atomic_write_bytes` / :func:`atomic_write_text` so interrupted runs
never leave truncated files behind.
"""

from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

MAGIC = b"WBFG"
DTYPE_FLOAT32 = 1
_HEADER = struct.Struct("<4sIII")


class FormatError(ValueError):
    """Raised when a snapshot file cannot be parsed."""


def atomic_write_bytes(path: str | os.PathLike, data: bytes) -> None:
    """Write `data` to `path` via a temp file + rename in the same directory."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def grid_to_bytes(grid: np.ndarray) -> bytes:
    """Serialize a 2-D grid to the binary snapshot format (float32 LE)."""
    g = np.ascontiguousarray(grid, dtype="<f4")
    if g.ndim != 2:
        raise ValueError("grid must be 2-D")
    height, width = g.shape
    return _HEADER.pack(MAGIC, width, height, DTYPE_FLOAT32) + g.tobytes()


def grid_from_bytes(data: bytes) -> np.ndarray:
    if len(data) < _HEADER.size:
        raise FormatError(f"grid file too short for a header: {len(data)} bytes")
    magic, width, height, dtype = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError("bad magic; not a WBFG grid file")
    if dtype != DTYPE_FLOAT32:
        raise FormatError(f"unsupported dtype code {dtype}")
    expected = _HEADER.size + 4 * width * height
    if len(data) != expected:
        raise FormatError(f"truncated grid file: {len(data)} != {expected} bytes")
    flat = np.frombuffer(data, dtype="<f4", offset=_HEADER.size)
    return flat.reshape(height, width).copy()


def write_grid_binary(path: str | os.PathLike, grid: np.ndarray) -> None:
    atomic_write_bytes(path, grid_to_bytes(grid))


def read_grid_binary(path: str | os.PathLike) -> np.ndarray:
    return grid_from_bytes(Path(path).read_bytes())


def write_grid_csv(path: str | os.PathLike, grid: np.ndarray) -> None:
    g = np.asarray(grid, dtype=np.float32)
    lines = [",".join(repr(float(v)) for v in row) for row in g]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_grid_csv(path: str | os.PathLike) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = [np.float32(v) for v in line.split(",")]
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-numeric cell") from None
            if rows and len(row) != len(rows[0]):
                raise FormatError(
                    f"{path}:{lineno}: ragged row ({len(row)} != {len(rows[0])} cells)"
                )
            rows.append(row)
    if not rows:
        raise FormatError(f"empty grid CSV: {path}")
    return np.array(rows, dtype=np.float32)


def read_grid(path: str | os.PathLike) -> np.ndarray:
    """Read a snapshot in either format, chosen by extension."""
    path = Path(path)
    if path.suffix == ".wbfg":
        return read_grid_binary(path)
    if path.suffix == ".csv":
        return read_grid_csv(path)
    raise FormatError(f"unknown snapshot extension: {path.name}")
