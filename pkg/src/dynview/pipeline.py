"""Dataset ingestion and per-region view manifest emission.

Reads COCO-style JSON or JSONL region annotations, runs view selection per
region, optionally writes the chosen view crops as PNGs, and emits one JSON
manifest line per region. Manifests are self-describing: they echo the policy,
the perceptual hashes, the scores, and the configuration, so every stored
score is exactly recomputable from the stored hashes.
"""

from __future__ import annotations

import json
import logging
import zlib
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from .controltext import TagVocab, build_control_sentence, demo_vocab, parse_tags
from .geometry import (DEFAULT_GRID, DEFAULT_OUT_SIZE, Box, box_from_xywh,
                       build_candidate_views)
from .phash import HASH_BITS, HASH_INPUT_SIZE, PerceptualHash64, phash64
from .raster import ImageRaster, read_png, realize_views, write_png
from .roiops import DEFAULT_ROI_OUT, DEFAULT_SAMPLING_RATIO
from .selection import (ImagePrior, NoPrior, SelectionResult, TaskPrior,
                        score_view, select_image_prior, select_no_prior,
                        select_task_prior)

log = logging.getLogger("dynview.pipeline")

MANIFEST_VERSION = 1


class ManifestVersionError(RuntimeError):
    """Raised when a manifest file was written by an incompatible version."""


@dataclass
class Counters:
    ingested: int = 0
    emitted: int = 0
    skipped: int = 0
    errored: int = 0

    def as_dict(self) -> dict:
        return {"ingested": self.ingested, "emitted": self.emitted,
                "skipped": self.skipped, "errored": self.errored}


@dataclass(frozen=True)
class PipelineConfig:
    n_views: int = 3
    out_size: int = DEFAULT_OUT_SIZE
    candidate_ts: tuple[float, ...] = DEFAULT_GRID
    min_box_side: float = 1.0
    crops_dir: str | None = None  # None disables PNG crop output
    vocab: TagVocab | None = None  # None falls back to the demo vocab
    cache_size: int = 64


@dataclass(frozen=True)
class RegionRecord:
    image_id: str
    image_path: str
    box: Box
    region_idx: int = 0
    caption: str | None = None
    category: str | None = None
    degenerate: bool = False


@dataclass(frozen=True)
class ViewManifest:
    image_id: str
    region_idx: int
    image_path: str
    box: tuple[float, float, float, float]
    policy: dict
    chosen_ts: tuple[float, ...]
    crop_boxes: tuple[tuple[float, float, float, float], ...]
    view_paths: tuple[str, ...]
    phash_hex: tuple[str, ...]
    scores: tuple[float, ...]
    control_sentence: str | None
    degenerate: bool
    toolkit_version: str
    manifest_version: int
    config: dict

    def __post_init__(self):
        if self.chosen_ts[0] != 0.0:
            raise ValueError("manifest must start with the t=0 view")
        k = len(self.chosen_ts)
        for name, arr in (("crop_boxes", self.crop_boxes),
                          ("phash_hex", self.phash_hex),
                          ("scores", self.scores)):
            if len(arr) != k:
                raise ValueError(f"{name} length {len(arr)} != view count {k}")
        if self.view_paths and len(self.view_paths) != k:
            raise ValueError("view_paths length mismatch")

    def to_dict(self) -> dict:
        return {
            "image_id": self.image_id,
            "region_idx": self.region_idx,
            "image_path": self.image_path,
            "box": list(self.box),
            "policy": self.policy,
            "chosen_ts": list(self.chosen_ts),
            "crop_boxes": [list(b) for b in self.crop_boxes],
            "view_paths": list(self.view_paths),
            "phash_hex": list(self.phash_hex),
            "scores": list(self.scores),
            "control_sentence": self.control_sentence,
            "degenerate": self.degenerate,
            "toolkit_version": self.toolkit_version,
            "manifest_version": self.manifest_version,
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ViewManifest":
        if d.get("manifest_version") != MANIFEST_VERSION:
            raise ManifestVersionError(
                f"manifest version {d.get('manifest_version')} is incompatible "
                f"with reader version {MANIFEST_VERSION}")
        return cls(
            image_id=d["image_id"],
            region_idx=d["region_idx"],
            image_path=d["image_path"],
            box=tuple(d["box"]),
            policy=d["policy"],
            chosen_ts=tuple(d["chosen_ts"]),
            crop_boxes=tuple(tuple(b) for b in d["crop_boxes"]),
            view_paths=tuple(d["view_paths"]),
            phash_hex=tuple(d["phash_hex"]),
            scores=tuple(d["scores"]),
            control_sentence=d["control_sentence"],
            degenerate=d["degenerate"],
            toolkit_version=d["toolkit_version"],
            manifest_version=d["manifest_version"],
            config=d["config"],
        )


def policy_to_dict(policy) -> dict:
    if isinstance(policy, ImagePrior):
        return {"policy": "image_prior", "mode": policy.mode,
                "candidate_ts": list(policy.candidate_ts)}
    if isinstance(policy, TaskPrior):
        return {"policy": "task_prior", "task": policy.task,
                "table": {k: list(v) for k, v in dict(policy.table).items()}}
    if isinstance(policy, NoPrior):
        return {"policy": "no_prior", "seed": policy.seed,
                "candidate_ts": list(policy.candidate_ts)}
    raise TypeError(f"unknown policy {policy!r}")


def policy_from_dict(d: dict):
    kind = d.get("policy")
    if kind == "image_prior":
        return ImagePrior(mode=d["mode"], candidate_ts=tuple(d["candidate_ts"]))
    if kind == "task_prior":
        return TaskPrior(task=d["task"],
                         table={k: tuple(v) for k, v in d["table"].items()})
    if kind == "no_prior":
        return NoPrior(seed=d["seed"], candidate_ts=tuple(d["candidate_ts"]))
    raise ValueError(f"unknown policy kind {kind!r}")


def load_regions(path, fmt: str, images_dir=None, counters: Counters | None = None,
                 min_box_side: float = 1.0):
    """Yield RegionRecords from an annotation file.

    ``fmt`` is "coco_json" or "jsonl". Boxes arrive as (x, y, w, h) and are
    converted to corner form; degenerate boxes are min-size expanded and
    flagged. Records whose image file is missing are warned about, counted as
    skipped, and not yielded.
    """
    counters = counters if counters is not None else Counters()
    images_dir = Path(images_dir) if images_dir is not None else None

    if fmt == "coco_json":
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)  # JSONDecodeError carries line/column/offset
        images = {im["id"]: im for im in doc.get("images", [])}
        cats = {c["id"]: c["name"] for c in doc.get("categories", [])}
        rows = []
        for ann in doc.get("annotations", []):
            im = images.get(ann["image_id"])
            if im is None:
                raise ValueError(f"annotation references unknown image id "
                                 f"{ann['image_id']!r}")
            rows.append({
                "image_id": str(im["id"]),
                "file_name": im["file_name"],
                "bbox": ann["bbox"],
                "caption": ann.get("caption"),
                "category": cats.get(ann.get("category_id")),
            })
    elif fmt == "jsonl":
        rows = []
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as e:
                    raise ValueError(f"{path}:{lineno}: malformed JSON at "
                                     f"offset {e.pos}: {e.msg}") from e
                row.setdefault("file_name", row.get("image_path"))
                rows.append(row)
    else:
        raise ValueError(f"format must be 'coco_json' or 'jsonl', got {fmt!r}")

    region_counts: dict[str, int] = {}
    for row in rows:
        counters.ingested += 1
        file_name = row["file_name"]
        img_path = Path(file_name)
        if images_dir is not None and not img_path.is_absolute():
            img_path = images_dir / img_path
        image_id = str(row["image_id"])
        idx = region_counts.get(image_id, 0)
        region_counts[image_id] = idx + 1
        if not img_path.exists():
            log.warning("image file missing, skipping record: %s", img_path)
            counters.skipped += 1
            continue
        x, y, w, h = row["bbox"]
        box, degenerate = box_from_xywh(float(x), float(y), float(w), float(h),
                                        min_side=min_box_side)
        if degenerate:
            log.warning("degenerate box expanded for %s region %d", image_id, idx)
        yield RegionRecord(
            image_id=image_id,
            image_path=str(img_path),
            box=box,
            region_idx=idx,
            caption=row.get("caption"),
            category=row.get("category"),
            degenerate=degenerate,
        )


class _ImageCache:
    """Bounded LRU of decoded images keyed by path."""

    def __init__(self, max_size: int = 64):
        self.max_size = max_size
        self._cache: OrderedDict[str, ImageRaster] = OrderedDict()

    def get(self, path: str) -> ImageRaster:
        if path in self._cache:
            self._cache.move_to_end(path)
            return self._cache[path]
        img = read_png(path)
        self._cache[path] = img
        if len(self._cache) > self.max_size:
            self._cache.popitem(last=False)
        return img


def _region_seed(base_seed: int, rec: RegionRecord) -> int:
    # Stable per-region seed so no-prior runs are reproducible at any
    # parallelism, yet different regions draw different views.
    key = f"{rec.image_id}/{rec.region_idx}".encode()
    return (base_seed & 0xFFFFFFFF) ^ zlib.crc32(key)


def process_region(rec: RegionRecord, policy, cfg: PipelineConfig = PipelineConfig(),
                   cache: _ImageCache | None = None) -> ViewManifest:
    """Run selection for one region and assemble its manifest."""
    img = (cache or _ImageCache(1)).get(rec.image_path)
    b_x = img.bounds
    b_r = rec.box.clamp_to(b_x)
    n = cfg.n_views

    if isinstance(policy, ImagePrior):
        if n == 1:
            chosen = build_candidate_views(b_r, b_x, (), cfg.out_size)
            result = SelectionResult(chosen=chosen, policy=policy)
        else:
            result = select_image_prior(img, b_r, n, policy, cfg.out_size)
    elif isinstance(policy, TaskPrior):
        result = select_task_prior(policy.task, n, b_r, b_x, policy.table,
                                   cfg.out_size)
    elif isinstance(policy, NoPrior):
        result = select_no_prior(n, _region_seed(policy.seed, rec), b_r, b_x,
                                 policy.candidate_ts, cfg.out_size)
    else:
        raise TypeError(f"unknown policy {policy!r}")

    chosen = result.chosen
    rasters = realize_views(img, chosen)
    hashes = [phash64(r) for r in rasters]
    scores = [0.0] + [score_view(hashes[0], h, v.t)
                      for h, v in zip(hashes[1:], chosen.views[1:])]

    view_paths: list[str] = []
    if cfg.crops_dir is not None:
        crops_dir = Path(cfg.crops_dir)
        crops_dir.mkdir(parents=True, exist_ok=True)
        for view, raster in zip(chosen, rasters):
            name = f"{rec.image_id}_{rec.region_idx}_{view.t:g}.png"
            write_png(raster, crops_dir / name)
            view_paths.append(str(crops_dir / name))

    control_sentence = None
    if rec.caption is not None:
        vocab = cfg.vocab if cfg.vocab is not None else demo_vocab()
        control_sentence = build_control_sentence(parse_tags(rec.caption, vocab))

    return ViewManifest(
        image_id=rec.image_id,
        region_idx=rec.region_idx,
        image_path=rec.image_path,
        box=b_r.as_tuple(),
        policy=policy_to_dict(policy),
        chosen_ts=chosen.ts,
        crop_boxes=tuple(v.crop.as_tuple() for v in chosen),
        view_paths=tuple(view_paths),
        phash_hex=tuple(h.to_hex() for h in hashes),
        scores=tuple(scores),
        control_sentence=control_sentence,
        degenerate=rec.degenerate,
        toolkit_version=__version__,
        manifest_version=MANIFEST_VERSION,
        config={
            "out_size": cfg.out_size,
            "n_views": n,
            "candidate_ts": list(cfg.candidate_ts),
            "phash_bits": HASH_BITS,
            "phash_input_size": HASH_INPUT_SIZE,
            "roi_align_out": DEFAULT_ROI_OUT,
            "roi_align_sampling_ratio": DEFAULT_SAMPLING_RATIO,
        },
    )


def write_manifest(manifests, path) -> None:
    """Write manifests as JSONL, one per line, UTF-8. Float serialization uses
    Python's shortest round-trip repr, so read-back is exact."""
    with open(path, "w", encoding="utf-8") as f:
        for m in manifests:
            f.write(json.dumps(m.to_dict(), ensure_ascii=False) + "\n")


def read_manifest(path):
    """Yield ViewManifests from a JSONL manifest file."""
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                yield ViewManifest.from_dict(json.loads(line))


def run_batch(annotations, fmt: str, images_dir, out_path, policy,
              cfg: PipelineConfig = PipelineConfig(), jobs: int = 1) -> Counters:
    """Process every region of an annotation file into ``out_path`` (JSONL).

    Per-record failures go to the ``{out_path}.errors.jsonl`` sidecar and
    processing continues. Returns the throughput counters
    (ingested = emitted + skipped + errored).
    """
    counters = Counters()
    cache = _ImageCache(cfg.cache_size)
    records = list(load_regions(annotations, fmt, images_dir, counters,
                                cfg.min_box_side))

    def work(rec: RegionRecord):
        try:
            return rec, process_region(rec, policy, cfg, cache), None
        except Exception as e:  # record-level isolation
            return rec, None, str(e)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, records))
    else:
        results = [work(rec) for rec in records]

    errors = []
    out_path = Path(out_path)
    with open(out_path, "w", encoding="utf-8") as f:
        for rec, manifest, err in results:
            if err is not None:
                counters.errored += 1
                errors.append({"image_id": rec.image_id,
                               "region_idx": rec.region_idx, "error": err})
                continue
            f.write(json.dumps(manifest.to_dict(), ensure_ascii=False) + "\n")
            counters.emitted += 1

    sidecar = out_path.with_name(out_path.name + ".errors.jsonl")
    if errors:
        with open(sidecar, "w", encoding="utf-8") as f:
            for e in errors:
                f.write(json.dumps(e, ensure_ascii=False) + "\n")
    elif sidecar.exists():
        sidecar.unlink()
    return counters
