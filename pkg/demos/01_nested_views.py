"""Nested view construction.

A region box b_r inside an image b_x generates a family of crops
crop(t) = b_r + t * (b_x - b_r): t=0 is the region itself, t=1 is the whole
image, and every intermediate crop contains all tighter ones. This script
walks the default candidate grid and shows the nesting.

Run:  python3 demos/01_nested_views.py
"""

from dynview.geometry import (DEFAULT_GRID, Box, build_candidate_views,
                              interpolate_box, sample_training_views)


def main():
    b_x = Box(0, 0, 640, 480)           # the image
    b_r = Box(200, 150, 360, 330)       # the referred region

    print("interpolation endpoints:")
    print(f"  t=0.0 -> {interpolate_box(b_r, b_x, 0.0).as_tuple()}  (the region)")
    print(f"  t=0.5 -> {interpolate_box(b_r, b_x, 0.5).as_tuple()}")
    print(f"  t=1.0 -> {interpolate_box(b_r, b_x, 1.0).as_tuple()}  (the image)")

    views = build_candidate_views(b_r, b_x, DEFAULT_GRID)
    print(f"\ncandidate table ({len(views.views)} views, t=0 always first):")
    for v in views:
        print(f"  t={v.t:<4} crop={tuple(round(c, 1) for c in v.crop.as_tuple())}"
              f" area={v.crop.area:.0f}")

    print("\nnesting: every view contains all tighter views:")
    inner_to_outer = all(outer.crop.contains(inner.crop)
                         for inner, outer in zip(views.views, views.views[1:]))
    print(f"  holds for the whole chain: {inner_to_outer}")

    print("\nseeded training-time subsets (t=0 kept, the rest drawn at random):")
    for seed in (0, 1, 2):
        subset = sample_training_views(views, 3, rng_seed=seed)
        print(f"  seed={seed}: ts={subset.ts}")


if __name__ == "__main__":
    main()
