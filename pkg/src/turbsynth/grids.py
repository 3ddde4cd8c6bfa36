"""Raster containers and the ETTF binary raster format.

A SampledGrid is an immutable 2-D array of real samples with spacing and
kind metadata. It carries MTFs (frequency domain, cycles/pixel), PSFs and
displacement/blur-width fields (spatial domain, pixels), and plain images.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field

import numpy as np

RASTER_MAGIC = b"ETTF"
_HEADER = struct.Struct("<4sIII")  # magic, width, height, kind


class GridKind(enum.IntEnum):
    # numeric values are part of the raster wire format; do not reorder
    MTF = 0
    PSF = 1
    BLUR_WIDTH = 2
    DISPLACEMENT_X = 3
    DISPLACEMENT_Y = 4
    IMAGE = 5


@dataclass(frozen=True)
class SampledGrid:
    """2-D real raster with sample-spacing metadata.

    spacing is cycles/pixel for frequency grids and pixels for spatial
    grids; 0.0 means unspecified (e.g. irregular diagnostic sweeps).
    The wrapped array is exposed read-only; construction does not copy.
    """

    data: np.ndarray
    spacing: float = 1.0
    kind: GridKind = field(default=GridKind.IMAGE)

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"SampledGrid needs a non-empty 2-D array, got shape {arr.shape}")
        view = arr.view()
        view.setflags(write=False)
        object.__setattr__(self, "data", view)
        object.__setattr__(self, "kind", GridKind(self.kind))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


def write_raster(grid: SampledGrid, path) -> None:
    """Serialize a grid: 16-byte header (magic 'ETTF', u32 width, u32
    height, u32 kind) followed by little-endian float32, row-major.

    Spacing is not part of the format; readers default it to 1.0.
    """
    payload = np.ascontiguousarray(grid.data, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(RASTER_MAGIC, grid.width, grid.height, int(grid.kind)))
        fh.write(payload.tobytes())


def read_raster(path) -> SampledGrid:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated raster header")
        magic, width, height, kind = _HEADER.unpack(head)
        if magic != RASTER_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        body = fh.read(4 * width * height)
    if len(body) != 4 * width * height:
        raise ValueError(f"{path}: truncated raster body")
    data = np.frombuffer(body, dtype="<f4").reshape(height, width).astype(np.float64)
    return SampledGrid(data=data, spacing=1.0, kind=GridKind(kind))
