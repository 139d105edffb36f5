import json

import numpy as np
import pytest

from dynview.geometry import Box
from dynview.pipeline import (Counters, ManifestVersionError, PipelineConfig,
                              RegionRecord, ViewManifest, load_regions,
                              policy_from_dict, policy_to_dict, process_region,
                              read_manifest, run_batch, write_manifest)
from dynview.raster import ImageRaster, write_png
from dynview.selection import ImagePrior, NoPrior, TaskPrior

from conftest import make_coco_dataset, smooth_image


@pytest.fixture
def dataset(tmp_path, rng):
    return make_coco_dataset(tmp_path, rng, n_images=3, regions_per_image=1)


@pytest.fixture
def one_image(tmp_path, rng):
    img = smooth_image(rng, size=80, base=10, channels=3, lo=0.0, hi=1.0)
    path = tmp_path / "img.png"
    write_png(img, path)
    return path


class TestLoadRegions:
    def test_coco_two_annotations(self, tmp_path, rng):
        ann, images = make_coco_dataset(tmp_path, rng, n_images=2)
        counters = Counters()
        records = list(load_regions(ann, "coco_json", images, counters))
        assert len(records) == 2
        assert counters.ingested == 2 and counters.skipped == 0
        assert all(r.caption for r in records)

    def test_degenerate_box_flagged(self, tmp_path, one_image):
        doc = {"images": [{"id": 0, "file_name": one_image.name,
                           "width": 80, "height": 80}],
               "annotations": [{"id": 1, "image_id": 0, "bbox": [10, 10, 0, 20]}]}
        ann = tmp_path / "ann.json"
        ann.write_text(json.dumps(doc))
        [rec] = load_regions(ann, "coco_json", one_image.parent)
        assert rec.degenerate
        assert rec.box.width == pytest.approx(1.0)

    def test_missing_image_skipped(self, tmp_path, rng):
        ann, images = make_coco_dataset(tmp_path, rng, n_images=2)
        (images / "img1.png").unlink()
        counters = Counters()
        records = list(load_regions(ann, "coco_json", images, counters))
        assert len(records) == 1
        assert counters.skipped == 1

    def test_truncated_file_names_offset(self, tmp_path):
        ann = tmp_path / "bad.json"
        ann.write_text('{"images": [', encoding="utf-8")
        with pytest.raises(json.JSONDecodeError) as exc:
            list(load_regions(ann, "coco_json"))
        assert exc.value.pos is not None

    def test_jsonl_format(self, tmp_path, one_image):
        ann = tmp_path / "ann.jsonl"
        rows = [{"image_id": "a", "image_path": one_image.name,
                 "bbox": [5, 5, 20, 20], "caption": "a dog"},
                {"image_id": "a", "image_path": one_image.name,
                 "bbox": [10, 10, 30, 30]}]
        ann.write_text("\n".join(json.dumps(r) for r in rows), encoding="utf-8")
        records = list(load_regions(ann, "jsonl", one_image.parent))
        assert len(records) == 2
        assert records[1].region_idx == 1

    def test_malformed_jsonl_line(self, tmp_path):
        ann = tmp_path / "bad.jsonl"
        ann.write_text('{"image_id": 1}\n{broken', encoding="utf-8")
        with pytest.raises(ValueError, match="offset"):
            list(load_regions(ann, "jsonl"))

    def test_unknown_format(self, tmp_path):
        ann = tmp_path / "x.csv"
        ann.write_text("")
        with pytest.raises(ValueError):
            list(load_regions(ann, "csv"))


class TestProcessRegion:
    def rec(self, one_image, caption=None):
        return RegionRecord(image_id="img", image_path=str(one_image),
                            box=Box(20, 20, 45, 50), caption=caption)

    def test_task_prior_attribute_n2(self, one_image):
        cfg = PipelineConfig(n_views=2, out_size=48)
        m = process_region(self.rec(one_image), TaskPrior("attribute_detection"), cfg)
        assert m.chosen_ts == (0.0, 0.1)

    def test_n1_single_region_crop(self, one_image):
        cfg = PipelineConfig(n_views=1, out_size=48)
        m = process_region(self.rec(one_image), ImagePrior(), cfg)
        assert m.chosen_ts == (0.0,)
        assert m.crop_boxes == ((20.0, 20.0, 45.0, 50.0),)

    def test_scores_recomputable_from_hashes(self, one_image):
        cfg = PipelineConfig(n_views=3, out_size=48)
        m = process_region(self.rec(one_image), ImagePrior(), cfg)
        h1 = int(m.phash_hex[0], 16)
        for t, hx, s in zip(m.chosen_ts[1:], m.phash_hex[1:], m.scores[1:]):
            assert s == bin(h1 ^ int(hx, 16)).count("1") / t
        assert m.scores[0] == 0.0

    def test_control_sentence_from_caption(self, one_image):
        cfg = PipelineConfig(n_views=2, out_size=48)
        m = process_region(self.rec(one_image, "a white dog on the sofa"),
                           TaskPrior("region_caption"), cfg)
        assert m.control_sentence == "white dog, sofa[SEP]"

    def test_crops_written(self, one_image, tmp_path):
        crops = tmp_path / "crops"
        cfg = PipelineConfig(n_views=2, out_size=32, crops_dir=str(crops))
        m = process_region(self.rec(one_image), TaskPrior("attribute_detection"), cfg)
        assert len(m.view_paths) == 2
        assert (crops / "img_0_0.png").exists()
        assert (crops / "img_0_0.1.png").exists()


class TestManifestRoundTrip:
    def test_empty_stream(self, tmp_path):
        path = tmp_path / "m.jsonl"
        write_manifest([], path)
        assert path.read_text() == ""
        assert list(read_manifest(path)) == []

    def test_order_and_exact_floats(self, one_image, tmp_path):
        cfg = PipelineConfig(n_views=3, out_size=48)
        rec = RegionRecord(image_id="img", image_path=str(one_image),
                           box=Box(20.125, 20.7, 45.3, 50.9))
        manifests = [process_region(rec, ImagePrior(mode=m), cfg)
                     for m in ("marginal", "topk", "marginal")]
        path = tmp_path / "m.jsonl"
        write_manifest(manifests, path)
        back = list(read_manifest(path))
        assert back == manifests

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text(json.dumps({"manifest_version": 999}) + "\n")
        with pytest.raises(ManifestVersionError):
            list(read_manifest(path))


class TestPolicySerialization:
    def test_round_trip(self):
        for pol in (ImagePrior("topk"), TaskPrior("dense_caption"),
                    NoPrior(seed=3)):
            assert policy_from_dict(policy_to_dict(pol)) == pol

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            policy_from_dict({"policy": "oracle"})


class TestRunBatch:
    def test_counters_conserve(self, dataset, tmp_path):
        ann, images = dataset
        out = tmp_path / "out.jsonl"
        cfg = PipelineConfig(n_views=3, out_size=48)
        counters = run_batch(ann, "coco_json", images, out, ImagePrior(), cfg)
        assert counters.emitted == 3
        assert counters.ingested == (counters.emitted + counters.skipped
                                     + counters.errored)
        assert len(list(read_manifest(out))) == 3

    def test_idempotent_rerun(self, dataset, tmp_path):
        ann, images = dataset
        cfg = PipelineConfig(n_views=3, out_size=48,
                             crops_dir=str(tmp_path / "crops"))
        out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        run_batch(ann, "coco_json", images, out1, ImagePrior(), cfg)
        crops1 = {p.name: p.read_bytes()
                  for p in (tmp_path / "crops").iterdir()}
        run_batch(ann, "coco_json", images, out2, ImagePrior(), cfg)
        assert out1.read_bytes() == out2.read_bytes()
        crops2 = {p.name: p.read_bytes()
                  for p in (tmp_path / "crops").iterdir()}
        assert crops1 == crops2

    def test_no_prior_deterministic_across_jobs(self, dataset, tmp_path):
        ann, images = dataset
        cfg = PipelineConfig(n_views=3, out_size=48)
        out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        run_batch(ann, "coco_json", images, out1, NoPrior(seed=5), cfg, jobs=1)
        run_batch(ann, "coco_json", images, out2, NoPrior(seed=5), cfg, jobs=4)
        assert out1.read_bytes() == out2.read_bytes()

    def test_error_sidecar(self, dataset, tmp_path):
        ann, images = dataset
        # corrupt one image after ingest-time existence check passes
        (images / "img2.png").write_bytes(b"not a png")
        out = tmp_path / "out.jsonl"
        counters = run_batch(ann, "coco_json", images, out, ImagePrior(),
                             PipelineConfig(n_views=2, out_size=48))
        assert counters.errored == 1 and counters.emitted == 2
        sidecar = tmp_path / "out.jsonl.errors.jsonl"
        errors = [json.loads(l) for l in sidecar.read_text().splitlines()]
        assert errors[0]["image_id"] == "2"
