"""dynview: dynamic-resolution region view toolkit.

Builds nested crop views around a referred image region, selects informative
views with a frequency-domain perceptual hash, provides RoI numeric reference
kernels and training-loss oracles, and runs a batch annotation-to-manifest
pipeline.
"""

__version__ = "0.1.0"

from .geometry import (Box, ViewSet, ViewSpec, build_candidate_views,
                       interpolate_box, sample_training_views)
from .phash import PerceptualHash64, hamming, phash64
from .raster import ImageRaster, crop_resize, read_png, realize_views, to_luma, write_png
from .selection import (ImagePrior, NoPrior, SelectionResult, TaskPrior,
                        score_view, select_image_prior, select_no_prior,
                        select_task_prior)

__all__ = [
    "__version__",
    "Box", "ViewSpec", "ViewSet", "interpolate_box", "build_candidate_views",
    "sample_training_views",
    "ImageRaster", "read_png", "write_png", "crop_resize", "to_luma",
    "realize_views",
    "PerceptualHash64", "phash64", "hamming",
    "NoPrior", "TaskPrior", "ImagePrior", "SelectionResult", "score_view",
    "select_image_prior", "select_task_prior", "select_no_prior",
]
