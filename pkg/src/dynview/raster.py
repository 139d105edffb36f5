"""Minimal float image raster with PNG I/O, bilinear crop-resize, and luma.

Sampling convention: pixel (i, j) covers the unit square [j, j+1) x [i, i+1)
and its center sits at (j + 0.5, i + 0.5). Samples outside the image clamp to
the nearest edge pixel. The same convention is used by the RoI kernels so
geometry stays consistent across modules.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .geometry import Box

REC601_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class ImageRaster:
    """Dense float image, shape (height, width, channels), samples in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        d = self.data
        if d.ndim != 3 or d.shape[2] not in (1, 3):
            raise ValueError(f"raster must be (h, w, 1|3), got shape {d.shape}")
        if d.shape[0] < 1 or d.shape[1] < 1:
            raise ValueError(f"raster must be non-empty, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise ValueError("raster samples must be finite")
        if d.min() < 0.0 or d.max() > 1.0:
            raise ValueError("raster samples must lie in [0, 1]")
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

    @property
    def bounds(self) -> Box:
        return Box(0.0, 0.0, float(self.width), float(self.height))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "ImageRaster":
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        return cls(np.ascontiguousarray(arr))


def read_png(path) -> ImageRaster:
    """Load an 8-bit PNG (grayscale or RGB) as a [0, 1] float raster."""
    with Image.open(path) as im:
        if im.mode not in ("L", "RGB"):
            im = im.convert("RGB" if im.mode not in ("1", "I", "F") else "L")
        arr = np.asarray(im, dtype=np.float64) / 255.0
    return ImageRaster.from_array(arr)


def write_png(img: ImageRaster, path) -> None:
    """Write the raster as an 8-bit PNG (samples scaled by 255 and rounded)."""
    arr = np.rint(img.data * 255.0).astype(np.uint8)
    if arr.shape[2] == 1:
        Image.fromarray(arr[:, :, 0], mode="L").save(path, format="PNG")
    else:
        Image.fromarray(arr, mode="RGB").save(path, format="PNG")


def bilinear_sample(data: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Bilinear samples of an (h, w, c) array at continuous coords (xs, ys).

    Coordinates follow the pixel-center convention; out-of-range samples clamp
    to the edge. ``xs``/``ys`` broadcast to the output spatial shape.
    """
    h, w = data.shape[0], data.shape[1]
    # clamp the coordinate itself so edge samples replicate the border pixel
    u = np.clip(np.asarray(xs, dtype=np.float64) - 0.5, 0.0, w - 1.0)
    v = np.clip(np.asarray(ys, dtype=np.float64) - 0.5, 0.0, h - 1.0)
    x0 = np.floor(u)
    y0 = np.floor(v)
    fx = u - x0
    fy = v - y0
    ix0 = np.clip(x0.astype(np.int64), 0, w - 1)
    ix1 = np.clip(ix0 + 1, 0, w - 1)
    iy0 = np.clip(y0.astype(np.int64), 0, h - 1)
    iy1 = np.clip(iy0 + 1, 0, h - 1)
    fx = fx[..., None]
    fy = fy[..., None]
    top = data[iy0, ix0] * (1 - fx) + data[iy0, ix1] * fx
    bot = data[iy1, ix0] * (1 - fx) + data[iy1, ix1] * fx
    return top * (1 - fy) + bot * fy


def crop_resize(img: ImageRaster, crop: Box, out_size: int) -> ImageRaster:
    """Resample ``crop`` of the image to an out_size x out_size raster.

    The crop may extend past the image; samples outside clamp to the edge,
    but the crop must intersect the image bounds.
    """
    if out_size < 1:
        raise ValueError(f"out_size must be >= 1, got {out_size}")
    if crop.intersect(img.bounds) is None:
        raise ValueError(f"crop {crop} does not intersect image bounds {img.bounds}")
    js = np.arange(out_size, dtype=np.float64)
    xs = crop.x0 + (js + 0.5) * (crop.width / out_size)
    ys = crop.y0 + (js + 0.5) * (crop.height / out_size)
    out = bilinear_sample(img.data, xs[None, :], ys[:, None])
    return ImageRaster(np.clip(out, 0.0, 1.0))


def to_luma(img: ImageRaster) -> ImageRaster:
    """Collapse RGB to a single luma channel with Rec.601 weights."""
    if img.channels == 1:
        return img
    w = np.array(REC601_WEIGHTS, dtype=np.float64)
    luma = img.data @ w
    return ImageRaster(np.clip(luma[:, :, None], 0.0, 1.0))


def flip_horizontal(img: ImageRaster) -> ImageRaster:
    return ImageRaster(np.ascontiguousarray(img.data[:, ::-1, :]))


def realize_views(img: ImageRaster, views) -> list[ImageRaster]:
    """Crop-resize every view of a ViewSet against the image."""
    return [crop_resize(img, v.crop, v.out_size) for v in views]
