"""File formats: CGRID binary complex grids, PNG images, CSV tables.

CGRID layout (little-endian): magic "CGRD", u32 version = 1, u32 M, u32 N,
f64 dx, f64 dy, then M*N (re, im) f64 pairs row-major.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
from PIL import Image

from .grid import ComplexGrid, DEFAULT_SPACING

CGRID_MAGIC = b"CGRD"
CGRID_VERSION = 1
_HEADER = struct.Struct("<4sIIIdd")


def save_cgrid(path, grid: ComplexGrid) -> None:
    m, n = grid.shape
    header = _HEADER.pack(CGRID_MAGIC, CGRID_VERSION, m, n, grid.dx, grid.dy)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(grid.values, dtype="<c16").tobytes())


def load_cgrid(path) -> ComplexGrid:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"{path}: truncated CGRID header")
        magic, version, m, n, dx, dy = _HEADER.unpack(header)
        if magic != CGRID_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != CGRID_VERSION:
            raise ValueError(f"{path}: unsupported CGRID version {version}")
        data = np.frombuffer(fh.read(16 * m * n), dtype="<c16")
    if data.size != m * n:
        raise ValueError(f"{path}: truncated CGRID payload")
    return ComplexGrid(data.reshape(m, n).astype(np.complex128), dx, dy)


def load_png(path, spacing=DEFAULT_SPACING) -> list[ComplexGrid]:
    """Load a PNG as one grayscale grid or three per-channel grids in [0, 1]."""
    img = Image.open(path)
    if img.mode in ("L", "I", "I;16", "1"):
        arr = np.asarray(img.convert("L"), dtype=float) / 255.0
        channels = [arr]
    else:
        arr = np.asarray(img.convert("RGB"), dtype=float) / 255.0
        channels = [arr[:, :, i] for i in range(3)]
    return [ComplexGrid(ch.astype(np.complex128), spacing[0], spacing[1])
            for ch in channels]


def save_png(path, grids: list[ComplexGrid]) -> None:
    """Write grid magnitudes as an 8-bit PNG (gray for 1 grid, RGB for 3).

    Magnitudes are scaled into [0, 255]; the scale goes to a sidecar JSON
    at <path>.json so the numeric range can be recovered.
    """
    mags = [np.abs(g.values) for g in grids]
    scale = max(float(m.max()) for m in mags) or 1.0
    stacked = [np.clip(m / scale * 255.0, 0, 255).astype(np.uint8) for m in mags]
    if len(stacked) == 1:
        img = Image.fromarray(stacked[0], mode="L")
    elif len(stacked) == 3:
        img = Image.fromarray(np.stack(stacked, axis=-1), mode="RGB")
    else:
        raise ValueError("expected one or three grids")
    img.save(path, format="PNG")
    sidecar = {"scale": scale, "dx": grids[0].dx, "dy": grids[0].dy}
    Path(str(path) + ".json").write_text(json.dumps(sidecar))


def write_csv(path, header: list[str], rows: list[tuple]) -> None:
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")
