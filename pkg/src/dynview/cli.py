"""Batch command-line frontend.

stdout carries data only (JSONL or hash strings); logs go to stderr. Exit
codes: 0 success, 1 runtime error, 2 usage error. All commands are
deterministic given their flags (seeds are explicit).
"""

from __future__ import annotations

import json
import logging
import os
import sys

import click

from . import __version__
from .geometry import DEFAULT_GRID, DEFAULT_OUT_SIZE, Box, build_candidate_views
from .phash import phash64
from .pipeline import PipelineConfig, RegionRecord, process_region, run_batch
from .raster import read_png
from .selection import DEFAULT_TASK_TABLE, ImagePrior, NoPrior, TaskPrior

TASK_ALIASES = {
    "attribute": "attribute_detection",
    "attribute_detection": "attribute_detection",
    "recognition": "region_recognition",
    "region_recognition": "region_recognition",
    "region-caption": "region_caption",
    "region_caption": "region_caption",
    "dense-caption": "dense_caption",
    "dense_caption": "dense_caption",
}


def _setup_logging():
    level = os.environ.get("DYNVIEW_LOG", "WARNING").upper()
    logging.basicConfig(stream=sys.stderr,
                        level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _parse_box(ctx, param, value) -> Box:
    try:
        parts = [float(v) for v in value.split(",")]
        if len(parts) != 4:
            raise ValueError("expected 4 comma-separated values")
        return Box(*parts)
    except ValueError as e:
        raise click.BadParameter(f"--box: {e}", ctx=ctx, param=param)


def _parse_grid(ctx, param, value):
    if value is None:
        return DEFAULT_GRID
    try:
        return tuple(float(v) for v in value.split(","))
    except ValueError as e:
        raise click.BadParameter(f"--grid: {e}", ctx=ctx, param=param)


def _build_policy(policy: str, task: str | None, seed: int, mode: str, grid):
    if policy == "image-prior":
        return ImagePrior(mode=mode, candidate_ts=grid)
    if policy == "task-prior":
        if task is None:
            raise click.UsageError("--policy task-prior requires --task")
        name = TASK_ALIASES.get(task)
        if name is None:
            raise click.UsageError(
                f"--task: unknown task {task!r}; choose from "
                f"{', '.join(sorted(set(TASK_ALIASES)))}")
        return TaskPrior(task=name)
    return NoPrior(seed=seed, candidate_ts=grid)


@click.group()
@click.version_option(__version__)
def main():
    """Dynamic-resolution region view toolkit."""
    _setup_logging()


@main.command("views")
@click.argument("image", type=click.Path(exists=True, dir_okay=False))
@click.option("--box", required=True, callback=_parse_box,
              help="Region box as x0,y0,x1,y1 (pixels).")
@click.option("--grid", default=None, callback=_parse_grid,
              help="Comma-separated candidate coefficients (default 0.1..1.0).")
@click.option("--out-size", default=DEFAULT_OUT_SIZE, show_default=True)
def cmd_views(image, box, grid, out_size):
    """Print the candidate view table (one JSON row per view)."""
    img = read_png(image)
    try:
        vs = build_candidate_views(box, img.bounds, grid, out_size)
    except ValueError as e:
        raise click.UsageError(f"--box/--grid: {e}")
    for v in vs:
        click.echo(json.dumps({"t": v.t, "crop": list(v.crop.as_tuple()),
                               "out_size": v.out_size}))


@main.command("select")
@click.argument("image", type=click.Path(exists=True, dir_okay=False))
@click.option("--box", required=True, callback=_parse_box)
@click.option("--policy", type=click.Choice(["image-prior", "task-prior", "no-prior"]),
              default="image-prior", show_default=True)
@click.option("--task", default=None, help="Task name for --policy task-prior.")
@click.option("--n", default=3, show_default=True, help="Number of views.")
@click.option("--seed", default=0, show_default=True)
@click.option("--mode", type=click.Choice(["topk", "marginal"]), default="marginal",
              show_default=True, help="Image-prior search mode.")
@click.option("--grid", default=None, callback=_parse_grid)
@click.option("--out-size", default=DEFAULT_OUT_SIZE, show_default=True)
def cmd_select(image, box, policy, task, n, seed, mode, grid, out_size):
    """Select views for one region; print the manifest as one JSON line."""
    pol = _build_policy(policy, task, seed, mode, grid)
    rec = RegionRecord(image_id="cli", image_path=image, box=box)
    cfg = PipelineConfig(n_views=n, out_size=out_size, candidate_ts=grid)
    try:
        manifest = process_region(rec, pol, cfg)
    except ValueError as e:
        raise click.ClickException(str(e))
    click.echo(json.dumps(manifest.to_dict(), ensure_ascii=False))


@main.command("hash")
@click.argument("image", type=click.Path(exists=True, dir_okay=False))
def cmd_hash(image):
    """Print the 64-bit perceptual hash of an image as 16 hex digits."""
    click.echo(phash64(read_png(image)).to_hex())


@main.command("batch")
@click.option("--annotations", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["coco_json", "jsonl"]),
              default="coco_json", show_default=True)
@click.option("--images-dir", type=click.Path(exists=True, file_okay=False),
              default=None)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--crops-dir", type=click.Path(file_okay=False), default=None,
              help="Directory for PNG view crops (omit to skip crop output).")
@click.option("--policy", type=click.Choice(["image-prior", "task-prior", "no-prior"]),
              default="image-prior", show_default=True)
@click.option("--task", default=None)
@click.option("--n", default=3, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--mode", type=click.Choice(["topk", "marginal"]), default="marginal",
              show_default=True)
@click.option("--grid", default=None, callback=_parse_grid)
@click.option("--out-size", default=DEFAULT_OUT_SIZE, show_default=True)
@click.option("--jobs", default=os.cpu_count() or 1, show_default="logical cores")
def cmd_batch(annotations, fmt, images_dir, out, crops_dir, policy, task, n,
              seed, mode, grid, out_size, jobs):
    """Run the annotation-to-manifest pipeline over a dataset."""
    pol = _build_policy(policy, task, seed, mode, grid)
    cfg = PipelineConfig(n_views=n, out_size=out_size, candidate_ts=grid,
                         crops_dir=crops_dir)
    try:
        counters = run_batch(annotations, fmt, images_dir, out, pol, cfg, jobs=jobs)
    except ValueError as e:
        raise click.ClickException(str(e))
    click.echo(f"{counters.emitted} emitted, {counters.skipped} skipped, "
               f"{counters.errored} errored", err=True)
    if counters.errored:
        sys.exit(1)


if __name__ == "__main__":
    main()
