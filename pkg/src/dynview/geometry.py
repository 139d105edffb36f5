"""Boxes, coefficient interpolation, and nested candidate view construction.

A region view is a crop interpolated between the referred-region box and the
whole-image box by a coefficient ``t`` in [0, 1]; ``t = 0`` is the region
itself and ``t = 1`` the full image. All geometry is continuous (float pixel
coordinates); rounding to integer pixel windows only happens at raster time.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

DEFAULT_GRID = tuple(round(0.1 * i, 1) for i in range(1, 11))
DEFAULT_OUT_SIZE = 224
MIN_OUT_SIZE = 8


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle in continuous pixel coordinates, origin top-left."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        for v in (self.x0, self.y0, self.x1, self.y1):
            if not math.isfinite(v):
                raise ValueError(f"box coordinates must be finite, got {self}")
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"box must have positive extent, got {self}")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    def contains(self, other: "Box", tol: float = 1e-9) -> bool:
        """True when ``other`` lies inside this box (within ``tol``)."""
        return (
            other.x0 >= self.x0 - tol
            and other.y0 >= self.y0 - tol
            and other.x1 <= self.x1 + tol
            and other.y1 <= self.y1 + tol
        )

    def intersect(self, other: "Box") -> "Box | None":
        x0 = max(self.x0, other.x0)
        y0 = max(self.y0, other.y0)
        x1 = min(self.x1, other.x1)
        y1 = min(self.y1, other.y1)
        if x0 >= x1 or y0 >= y1:
            return None
        return Box(x0, y0, x1, y1)

    def clamp_to(self, bounds: "Box") -> "Box":
        """Clip this box to ``bounds``; raises if the intersection is empty."""
        inter = self.intersect(bounds)
        if inter is None:
            raise ValueError(f"box {self} does not intersect bounds {bounds}")
        return inter

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x0, self.y0, self.x1, self.y1)


def box_from_xywh(x: float, y: float, w: float, h: float,
                  min_side: float = 1.0) -> tuple[Box, bool]:
    """Convert an (x, y, w, h) annotation box to corner form.

    Degenerate boxes (zero or negative width/height from annotation noise) are
    expanded to ``min_side`` centered on the original box instead of being
    rejected. Returns the box and a flag marking whether expansion happened.
    """
    degenerate = False
    if w < min_side:
        cx = x + w / 2.0
        x, w = cx - min_side / 2.0, min_side
        degenerate = True
    if h < min_side:
        cy = y + h / 2.0
        y, h = cy - min_side / 2.0, min_side
        degenerate = True
    return Box(x, y, x + w, y + h), degenerate


def interpolate_box(b_r: Box, b_x: Box, t: float) -> Box:
    """Linearly interpolate between the region box and the image box.

    Each coordinate of the result is ``b_r + t * (b_x - b_r)``, so t=0 gives
    the region itself and t=1 the whole image.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"interpolation coefficient must be in [0, 1], got {t}")
    if not b_x.contains(b_r):
        raise ValueError(f"region box {b_r} must lie inside image box {b_x}")
    return Box(
        b_r.x0 + t * (b_x.x0 - b_r.x0),
        b_r.y0 + t * (b_x.y0 - b_r.y0),
        b_r.x1 + t * (b_x.x1 - b_r.x1),
        b_r.y1 + t * (b_x.y1 - b_r.y1),
    )


@dataclass(frozen=True)
class ViewSpec:
    """One candidate view: coefficient, crop window, and output side length."""

    t: float
    crop: Box
    out_size: int = DEFAULT_OUT_SIZE

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"coefficient must be in [0, 1], got {self.t}")
        if self.out_size < MIN_OUT_SIZE:
            raise ValueError(f"out_size must be >= {MIN_OUT_SIZE}, got {self.out_size}")


@dataclass(frozen=True)
class ViewSet:
    """Ordered nested views; the first view is always the t=0 region crop."""

    views: tuple[ViewSpec, ...]
    image_box: Box

    def __post_init__(self):
        if not self.views:
            raise ValueError("a view set needs at least one view")
        if self.views[0].t != 0.0:
            raise ValueError("the first view must have t = 0")
        ts = [v.t for v in self.views]
        if any(a >= b for a, b in zip(ts, ts[1:])):
            raise ValueError(f"coefficients must be strictly increasing, got {ts}")
        for inner, outer in zip(self.views, self.views[1:]):
            if not outer.crop.contains(inner.crop):
                raise ValueError(
                    f"views must be nested: crop at t={inner.t} not inside t={outer.t}"
                )
        for v in self.views:
            if not self.image_box.contains(v.crop):
                raise ValueError(f"crop at t={v.t} exceeds the image box")

    @property
    def ts(self) -> tuple[float, ...]:
        return tuple(v.t for v in self.views)

    def __len__(self) -> int:
        return len(self.views)

    def __iter__(self):
        return iter(self.views)


def build_candidate_views(b_r: Box, b_x: Box,
                          t_list: tuple[float, ...] = DEFAULT_GRID,
                          out_size: int = DEFAULT_OUT_SIZE) -> ViewSet:
    """Build the nested candidate set: the mandatory t=0 view plus ``t_list``.

    ``t_list`` must be sorted ascending with values in (0, 1] and no
    duplicates; the default is the grid {0.1, 0.2, ..., 1.0}.
    """
    t_list = tuple(t_list)
    if any(not 0.0 < t <= 1.0 for t in t_list):
        raise ValueError(f"candidate coefficients must be in (0, 1], got {t_list}")
    if any(a >= b for a, b in zip(t_list, t_list[1:])):
        raise ValueError(f"candidate coefficients must be strictly ascending, got {t_list}")
    views = [ViewSpec(0.0, b_r, out_size)]
    views += [ViewSpec(t, interpolate_box(b_r, b_x, t), out_size) for t in t_list]
    return ViewSet(tuple(views), b_x)


def sample_training_views(candidates: ViewSet, n: int, rng_seed: int) -> ViewSet:
    """Sample n views for training: t=0 always kept, the rest drawn uniformly
    without replacement from the t>0 candidates. Deterministic per seed."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > len(candidates):
        raise ValueError(f"cannot sample {n} views from {len(candidates)} candidates")
    free = list(candidates.views[1:])
    rng = random.Random(rng_seed)
    picked = rng.sample(free, n - 1)
    chosen = [candidates.views[0]] + sorted(picked, key=lambda v: v.t)
    return ViewSet(tuple(chosen), candidates.image_box)
