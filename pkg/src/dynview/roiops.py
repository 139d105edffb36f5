"""Numeric reference kernels for multi-view region embedding geometry.

These are pure-numpy references: RoI-Align over a dense feature grid, 2D
offset-map resampling (the core of the view-alignment step), and channel
concatenation. Coordinates follow the same pixel-center convention as the
raster module; out-of-range samples clamp to the edge.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .geometry import Box
from .raster import bilinear_sample

DEFAULT_ROI_OUT = 16
DEFAULT_SAMPLING_RATIO = 2


@dataclass(frozen=True)
class FeatureGrid:
    """Dense float feature map, shape (height, width, channels)."""

    data: np.ndarray

    def __post_init__(self):
        d = self.data
        if d.ndim != 3:
            raise ValueError(f"feature grid must be (h, w, c), got shape {d.shape}")
        if min(d.shape) < 1:
            raise ValueError(f"feature grid must be non-empty, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise ValueError("feature grid values must be finite")
        d.setflags(write=False)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "FeatureGrid":
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        return cls(np.ascontiguousarray(arr))


@dataclass(frozen=True)
class OffsetMap:
    """Per-cell (dx, dy) displacements in cell units, shape (h, w, 2)."""

    data: np.ndarray

    def __post_init__(self):
        d = self.data
        if d.ndim != 3 or d.shape[2] != 2:
            raise ValueError(f"offset map must be (h, w, 2), got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise ValueError("offsets must be finite")
        d.setflags(write=False)

    @classmethod
    def zeros(cls, h: int, w: int) -> "OffsetMap":
        return cls(np.zeros((h, w, 2), dtype=np.float64))


def roi_align(grid: FeatureGrid, box: Box, out_h: int, out_w: int,
              sampling_ratio: int = DEFAULT_SAMPLING_RATIO) -> FeatureGrid:
    """Average-pooled RoI-Align of ``box`` (grid coordinates) into out_h x out_w.

    Each output bin averages sampling_ratio^2 bilinear samples placed on a
    regular lattice inside the bin.
    """
    if out_h < 1 or out_w < 1:
        raise ValueError(f"output size must be >= 1, got {out_h}x{out_w}")
    if sampling_ratio < 1:
        raise ValueError(f"sampling_ratio must be >= 1, got {sampling_ratio}")
    if box.area <= 0:
        raise ValueError(f"box must have positive area, got {box}")
    sr = sampling_ratio
    bin_w = box.width / out_w
    bin_h = box.height / out_h
    # Sample lattice: out_w * sr columns, out_h * sr rows, centered per sub-cell.
    xs = box.x0 + (np.arange(out_w * sr) + 0.5) * (bin_w / sr)
    ys = box.y0 + (np.arange(out_h * sr) + 0.5) * (bin_h / sr)
    samples = bilinear_sample(grid.data, xs[None, :], ys[:, None])
    c = grid.channels
    pooled = samples.reshape(out_h, sr, out_w, sr, c).mean(axis=(1, 3))
    return FeatureGrid(pooled)


def offset_resample(grid: FeatureGrid, offsets: OffsetMap) -> FeatureGrid:
    """Resample the grid at each cell's position displaced by its offset."""
    if offsets.data.shape[:2] != grid.data.shape[:2]:
        raise ValueError(
            f"offset dims {offsets.data.shape[:2]} != grid dims {grid.data.shape[:2]}")
    h, w = grid.height, grid.width
    xs = np.arange(w, dtype=np.float64)[None, :] + 0.5 + offsets.data[:, :, 0]
    ys = np.arange(h, dtype=np.float64)[:, None] + 0.5 + offsets.data[:, :, 1]
    return FeatureGrid(bilinear_sample(grid.data, xs, ys))


def concat_channels(grids: list[FeatureGrid]) -> FeatureGrid:
    """Concatenate feature grids along the channel axis, order preserved."""
    if not grids:
        raise ValueError("need at least one grid")
    shape = grids[0].data.shape[:2]
    for g in grids[1:]:
        if g.data.shape[:2] != shape:
            raise ValueError(
                f"spatial dims mismatch: {g.data.shape[:2]} != {shape}")
    return FeatureGrid(np.concatenate([g.data for g in grids], axis=2))


_HEADER = struct.Struct("<III")


def write_grid(grid: FeatureGrid, path) -> None:
    """Binary format: little-endian uint32 (h, w, c) header, then float32
    values row-major."""
    with open(path, "wb") as f:
        f.write(_HEADER.pack(grid.height, grid.width, grid.channels))
        f.write(grid.data.astype("<f4").tobytes())


def read_grid(path) -> FeatureGrid:
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < _HEADER.size:
        raise ValueError(f"truncated grid file {path}")
    h, w, c = _HEADER.unpack_from(raw)
    expected = _HEADER.size + 4 * h * w * c
    if len(raw) != expected:
        raise ValueError(f"grid file {path}: expected {expected} bytes, got {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).astype(np.float64)
    return FeatureGrid(data.reshape(h, w, c))
