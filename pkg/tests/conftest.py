import numpy as np
import pytest

from dynview.raster import ImageRaster, bilinear_sample
from dynview.geometry import Box


def smooth_image(rng, size=96, base=8, channels=1, lo=0.15, hi=0.85):
    """Natural-noise stand-in: low-frequency random field upsampled bilinearly."""
    coarse = rng.uniform(lo, hi, size=(base, base, channels))
    js = (np.arange(size) + 0.5) * (base / size)
    data = bilinear_sample(coarse, js[None, :], js[:, None])
    return ImageRaster(np.clip(data, 0.0, 1.0))


def random_box_pair(rng, w=100.0, h=100.0):
    """A random (b_r, b_x) pair with b_r strictly inside the image box."""
    x0 = rng.uniform(0, w - 2)
    y0 = rng.uniform(0, h - 2)
    x1 = rng.uniform(x0 + 1, w)
    y1 = rng.uniform(y0 + 1, h)
    return Box(x0, y0, x1, y1), Box(0.0, 0.0, w, h)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_coco_dataset(root, rng, n_images=3, regions_per_image=1, size=80,
                      captions=True):
    """Write PNG images plus a COCO-style annotation file; returns
    (annotations_path, images_dir)."""
    import json

    from dynview.raster import write_png

    images_dir = root / "images"
    images_dir.mkdir(parents=True, exist_ok=True)
    images, annotations = [], []
    ann_id = 1
    for i in range(n_images):
        img = smooth_image(rng, size=size, base=10, channels=3, lo=0.0, hi=1.0)
        name = f"img{i}.png"
        write_png(img, images_dir / name)
        images.append({"id": i, "file_name": name, "width": size, "height": size})
        for r in range(regions_per_image):
            x = float(rng.uniform(2, size / 2))
            y = float(rng.uniform(2, size / 2))
            w = float(rng.uniform(8, size / 2 - 2))
            h = float(rng.uniform(8, size / 2 - 2))
            ann = {"id": ann_id, "image_id": i, "bbox": [x, y, w, h]}
            if captions:
                ann["caption"] = "a white dog lying on a sofa"
            annotations.append(ann)
            ann_id += 1
    doc = {"images": images, "annotations": annotations, "categories": []}
    ann_path = root / "annotations.json"
    ann_path.write_text(json.dumps(doc), encoding="utf-8")
    return ann_path, images_dir
