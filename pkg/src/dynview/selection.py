"""Inference-time view selection: no-prior, task-prior, and image-prior.

The image-prior policy scores each t>0 candidate by the Hamming distance of
its perceptual hash to the hash of the t=0 view, divided by t (the 1/t factor
downweights context-rich views). Two modes are provided:

* ``topk``   - rank all candidates by that score against the t=0 view and keep
               the best n-1. This is the literal reading of the objective.
* ``marginal`` (default) - greedy: repeatedly add the candidate maximizing
               (min Hamming distance to all already-selected hashes) / t,
               which avoids picking two near-duplicate context views.

Ties break toward smaller t (less context). The t=0 view is always included,
for every policy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

from .geometry import (DEFAULT_GRID, DEFAULT_OUT_SIZE, Box, ViewSet,
                       build_candidate_views, sample_training_views)
from .phash import PerceptualHash64, hamming, phash64
from .raster import ImageRaster, realize_views

TASKS = ("attribute_detection", "region_recognition", "region_caption",
         "dense_caption")

# Per-task coefficient tables for the task-prior policy. Attribute detection
# works best on near-contextless views; captioning tasks on context-rich views
# (t around 0.4-0.5); coefficients above 0.5 hurt every task. The table is
# configuration and can be overridden per deployment.
DEFAULT_TASK_TABLE = MappingProxyType({
    "attribute_detection": (0.1, 0.2),
    "region_recognition": (0.3, 0.2),
    "region_caption": (0.5, 0.4),
    "dense_caption": (0.4, 0.5),
})


@dataclass(frozen=True)
class NoPrior:
    seed: int = 0
    candidate_ts: tuple[float, ...] = DEFAULT_GRID


@dataclass(frozen=True)
class TaskPrior:
    task: str
    table: object = DEFAULT_TASK_TABLE

    def __post_init__(self):
        if self.task not in self.table:
            raise ValueError(f"unknown task {self.task!r}; known: {sorted(self.table)}")
        for t in self.table[self.task]:
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"task table coefficient out of [0, 1]: {t}")


@dataclass(frozen=True)
class ImagePrior:
    mode: str = "marginal"
    candidate_ts: tuple[float, ...] = DEFAULT_GRID

    def __post_init__(self):
        if self.mode not in ("topk", "marginal"):
            raise ValueError(f"mode must be 'topk' or 'marginal', got {self.mode!r}")
        if not self.candidate_ts:
            raise ValueError("candidate_ts must be non-empty")
        ts = self.candidate_ts
        if any(a >= b for a, b in zip(ts, ts[1:])):
            raise ValueError(f"candidate_ts must be ascending, got {ts}")


@dataclass(frozen=True)
class SelectionResult:
    """Chosen views plus, for the image prior, the per-candidate score trace."""

    chosen: ViewSet
    policy: object
    scores: tuple[float, ...] | None = None  # aligned with policy.candidate_ts
    hashes: tuple[PerceptualHash64, ...] | None = None  # aligned with chosen

    @property
    def chosen_ts(self) -> tuple[float, ...]:
        return self.chosen.ts


def score_view(h1: PerceptualHash64, hi: PerceptualHash64, t_i: float) -> float:
    """Incremental-information score of a candidate: hamming(h1, hi) / t_i."""
    if t_i <= 0.0:
        raise ValueError(f"score is defined for t > 0 only, got t={t_i}")
    return hamming(h1, hi) / t_i


def select_image_prior(img: ImageRaster, b_r: Box, n: int,
                       policy: ImagePrior = ImagePrior(),
                       out_size: int = DEFAULT_OUT_SIZE) -> SelectionResult:
    """Select n views of ``img`` around ``b_r`` by maximizing hash information."""
    if n < 2:
        raise ValueError(f"image-prior selection needs n >= 2, got {n}")
    if len(policy.candidate_ts) < n - 1:
        raise ValueError(
            f"need at least {n - 1} candidates, got {len(policy.candidate_ts)}")
    candidates = build_candidate_views(b_r, img.bounds, policy.candidate_ts, out_size)
    rasters = realize_views(img, candidates)
    hashes = [phash64(r) for r in rasters]
    h1 = hashes[0]
    free = list(range(1, len(candidates)))  # indices of t>0 candidates
    scores = tuple(score_view(h1, hashes[i], candidates.views[i].t) for i in free)

    if policy.mode == "topk":
        order = sorted(free, key=lambda i: (-score_view(h1, hashes[i],
                                                        candidates.views[i].t),
                                            candidates.views[i].t))
        picked = order[:n - 1]
    else:
        picked = []
        selected_hashes = [h1]
        remaining = list(free)
        for _ in range(n - 1):
            best = max(remaining,
                       key=lambda i: (min(hamming(h, hashes[i])
                                          for h in selected_hashes)
                                      / candidates.views[i].t,
                                      -candidates.views[i].t))
            picked.append(best)
            selected_hashes.append(hashes[best])
            remaining.remove(best)

    idx = [0] + sorted(picked, key=lambda i: candidates.views[i].t)
    chosen = ViewSet(tuple(candidates.views[i] for i in idx), candidates.image_box)
    return SelectionResult(chosen=chosen, policy=policy, scores=scores,
                           hashes=tuple(hashes[i] for i in idx))


def task_prior_ts(task: str, n: int, table=DEFAULT_TASK_TABLE) -> tuple[float, ...]:
    """Coefficients for an n-view task-prior selection: [0] plus the first n-1
    table entries for the task, sorted ascending."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if task not in table:
        raise ValueError(f"unknown task {task!r}; known: {sorted(table)}")
    entries = tuple(table[task])
    if len(entries) < n - 1:
        raise ValueError(f"task table for {task!r} provides {len(entries)} "
                         f"coefficients, need {n - 1}")
    return (0.0,) + tuple(sorted(entries[:n - 1]))


def select_task_prior(task: str, n: int, b_r: Box, b_x: Box,
                      table=DEFAULT_TASK_TABLE,
                      out_size: int = DEFAULT_OUT_SIZE) -> SelectionResult:
    """Select n views using the fixed per-task coefficient table."""
    ts = task_prior_ts(task, n, table)
    chosen = build_candidate_views(b_r, b_x, ts[1:], out_size)
    return SelectionResult(chosen=chosen, policy=TaskPrior(task, table))


def select_no_prior(n: int, seed: int, b_r: Box, b_x: Box,
                    candidate_ts: tuple[float, ...] = DEFAULT_GRID,
                    out_size: int = DEFAULT_OUT_SIZE) -> SelectionResult:
    """Select the t=0 view plus n-1 uniformly random candidates (per seed)."""
    candidates = build_candidate_views(b_r, b_x, tuple(candidate_ts), out_size)
    chosen = sample_training_views(candidates, n, seed)
    return SelectionResult(chosen=chosen, policy=NoPrior(seed, tuple(candidate_ts)))
