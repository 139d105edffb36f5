"""View selection policies.

Given the candidate views of a region, three policies pick which n to keep
(the t=0 view is always kept):

  image prior  - score each candidate by hamming(hash(t=0), hash(t)) / t and
                 keep the most informative ones ("topk"), or greedily keep the
                 one farthest from everything already selected ("marginal");
  task prior   - fixed coefficients that work best per task;
  no prior     - a seeded uniform draw.

Run:  python3 demos/03_view_selection.py
"""

import numpy as np

from dynview.geometry import Box
from dynview.raster import ImageRaster, bilinear_sample
from dynview.selection import (DEFAULT_TASK_TABLE, ImagePrior,
                               select_image_prior, select_no_prior,
                               select_task_prior)


def textured_image(rng, size=96):
    coarse = rng.random((12, 12, 3))
    ys, xs = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    s = 12 / size
    return ImageRaster(np.clip(bilinear_sample(coarse, (xs + 0.5) * s,
                                               (ys + 0.5) * s), 0, 1))


def main():
    rng = np.random.default_rng(11)
    img = textured_image(rng)
    b_r = Box(25, 30, 65, 70)

    for mode in ("marginal", "topk"):
        res = select_image_prior(img, b_r, 3, ImagePrior(mode), out_size=64)
        print(f"image prior ({mode}): ts={res.chosen_ts}")
        print("  per-candidate scores hamming/t:",
              [f"{s:.1f}" for s in res.scores[1:]])

    print("\ntask prior (fixed per-task coefficients):")
    for task in DEFAULT_TASK_TABLE:
        res = select_task_prior(task, 3, b_r, img.bounds)
        print(f"  {task:<22} ts={res.chosen_ts}")

    print("\nno prior (seeded draws; t=0 always present):")
    for seed in (0, 1, 2):
        res = select_no_prior(3, seed, b_r, img.bounds)
        print(f"  seed={seed}: ts={res.chosen_ts}")


if __name__ == "__main__":
    main()
