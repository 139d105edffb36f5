"""Thin in-process bindings over the dynview toolkit.

These functions expose view construction, perceptual hashing, view selection,
and manifest reading as plain host-language values (lists, dicts, tuples,
strings) so a training data loader can consume them without importing the
toolkit's own types. Images cross the boundary as encoded PNG bytes rather
than arrays, which keeps the interface free of any array-protocol commitment.

Everything delegates to the core library; outputs are bit-for-bit identical
to what the `dynview` command line prints for the same inputs. Calls are
reentrant, and the heavy kernels underneath (numpy/scipy) release the
interpreter lock during computation.
"""

from __future__ import annotations

import io
import os
import tempfile
from typing import Iterator

import dynview
from dynview.geometry import DEFAULT_GRID, DEFAULT_OUT_SIZE, Box, build_candidate_views
from dynview.phash import phash64
from dynview.pipeline import (PipelineConfig, RegionRecord, policy_from_dict,
                              process_region, read_manifest)
from dynview.raster import read_png

__version__ = dynview.__version__

__all__ = ["py_build_views", "py_select", "py_phash", "py_read_manifest",
           "__version__"]

_POLICY_DEFAULTS = {
    "image_prior": {"mode": "marginal", "candidate_ts": list(DEFAULT_GRID)},
    "task_prior": {},
    "no_prior": {"seed": 0, "candidate_ts": list(DEFAULT_GRID)},
}


def py_build_views(box, image_size, grid=None) -> list:
    """Candidate view table for a region box inside an image.

    ``box`` is (x0, y0, x1, y1), ``image_size`` is (width, height), ``grid``
    is an iterable of interpolation coefficients (default 0.1..1.0). Returns
    a list of (t, (x0, y0, x1, y1)) pairs, t=0 first.
    """
    w, h = image_size
    b_r = Box(*(float(v) for v in box))
    b_x = Box(0.0, 0.0, float(w), float(h))
    ts = DEFAULT_GRID if grid is None else tuple(float(t) for t in grid)
    vs = build_candidate_views(b_r, b_x, ts)
    return [(v.t, v.crop.as_tuple()) for v in vs]


def _fill_policy(policy: dict) -> dict:
    kind = policy.get("policy")
    if kind not in _POLICY_DEFAULTS:
        raise ValueError(f"unknown policy kind {kind!r}")
    filled = dict(_POLICY_DEFAULTS[kind])
    filled.update(policy)
    return filled


def py_select(image_bytes: bytes, box, policy: dict, n: int = 3,
              out_size: int = DEFAULT_OUT_SIZE) -> dict:
    """Select ``n`` views for a region of a PNG-encoded image.

    ``policy`` is a dict with a "policy" key of "image_prior", "task_prior",
    or "no_prior" plus that policy's fields ("mode", "task", "seed",
    "candidate_ts"); omitted fields take the library defaults. Returns the
    selection record as a plain dict: chosen coefficients, crop boxes,
    perceptual hashes, scores, and the configuration echo.
    """
    pol = policy_from_dict(_fill_policy(policy))
    candidate_ts = tuple(getattr(pol, "candidate_ts", DEFAULT_GRID))
    fd, path = tempfile.mkstemp(suffix=".png")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(image_bytes)
        rec = RegionRecord(image_id="cli", image_path=path,
                           box=Box(*(float(v) for v in box)))
        cfg = PipelineConfig(n_views=n, out_size=out_size,
                             candidate_ts=candidate_ts)
        manifest = process_region(rec, pol, cfg)
    finally:
        os.unlink(path)
    out = manifest.to_dict()
    del out["image_path"]  # a throwaway temp file; everything else is stable
    return out


def py_phash(image_bytes: bytes) -> str:
    """64-bit perceptual hash of a PNG-encoded image, as 16 hex digits."""
    return phash64(read_png(io.BytesIO(image_bytes))).to_hex()


def py_read_manifest(path) -> Iterator[dict]:
    """Iterate a JSONL manifest file as plain dicts, one per region."""
    for manifest in read_manifest(path):
        yield manifest.to_dict()
