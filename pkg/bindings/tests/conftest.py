import json

import numpy as np
import pytest

from dynview.raster import write_png

from oracles_shim import smooth_image


@pytest.fixture
def rng():
    return np.random.default_rng(4321)


@pytest.fixture
def fixture_corpus(tmp_path, rng):
    """A small shared corpus: PNG files, their bytes, and region boxes."""
    cases = []
    for i in range(6):
        img = smooth_image(rng, size=96, base=10)
        path = tmp_path / f"img{i}.png"
        write_png(img, path)
        box = (float(rng.uniform(5, 30)), float(rng.uniform(5, 30)),
               float(rng.uniform(55, 90)), float(rng.uniform(55, 90)))
        cases.append((path, path.read_bytes(), box))
    return cases


@pytest.fixture
def manifest_file(tmp_path, fixture_corpus):
    """A 3-line manifest written through the core pipeline."""
    from dynview.pipeline import PipelineConfig, RegionRecord, process_region, write_manifest
    from dynview.geometry import Box
    from dynview.selection import ImagePrior

    manifests = []
    for path, _, box in fixture_corpus[:3]:
        rec = RegionRecord(image_id=path.stem, image_path=str(path),
                           box=Box(*box), caption="a white dog lying on a sofa")
        manifests.append(process_region(rec, ImagePrior(),
                                        PipelineConfig(out_size=48)))
    out = tmp_path / "manifest.jsonl"
    write_manifest(manifests, out)
    return out
