import numpy as np
import pytest

from dynview.geometry import Box
from dynview.phash import (PerceptualHash64, dct2_ortho, hamming, idct2_ortho,
                           phash64)
from dynview.raster import ImageRaster, crop_resize

from conftest import smooth_image
from oracles import phash_bits_oracle, popcount_oracle


def oracle_hash_hex(img32: np.ndarray) -> str:
    bits = phash_bits_oracle(img32)
    return f"{int(bits, 2):016x}"


class TestPerceptualHash64:
    def test_bit_width(self):
        with pytest.raises(ValueError):
            PerceptualHash64(1 << 64)
        with pytest.raises(ValueError):
            PerceptualHash64(-1)

    def test_hex_round_trip(self, rng):
        h = PerceptualHash64(int(rng.integers(0, 2**63)))
        assert PerceptualHash64.from_hex(h.to_hex()) == h


class TestPhash64:
    def test_deterministic(self, rng):
        img = ImageRaster(rng.random((40, 52, 3)))
        a, b = phash64(img), phash64(img)
        assert a == b
        assert hamming(a, b) == 0

    def test_brightness_shift_invariance(self, rng):
        img = ImageRaster(rng.uniform(0.1, 0.7, size=(48, 48, 1)))
        shifted = ImageRaster(img.data + 0.1)  # no clamping occurs
        assert hamming(phash64(img), phash64(shifted)) == 0

    def test_checkerboard_vs_inverse_matches_oracle(self):
        board = np.indices((32, 32)).sum(axis=0) % 2
        a = ImageRaster(board[:, :, None].astype(np.float64))
        b = ImageRaster(1.0 - a.data)
        expected = popcount_oracle(oracle_hash_hex(a.data[:, :, 0]),
                                   oracle_hash_hex(b.data[:, :, 0]))
        assert hamming(phash64(a), phash64(b)) == expected

    def test_matches_naive_dct_oracle(self, rng):
        for _ in range(25):
            img32 = rng.random((32, 32))
            got = phash64(ImageRaster(img32[:, :, None])).to_hex()
            assert got == oracle_hash_hex(img32)

    def test_constant_image_degenerate_hash(self):
        # all AC bits clear; the DC bit alone reflects the brightness level
        black = ImageRaster(np.zeros((32, 32, 1)))
        assert phash64(black).bits == 0
        gray = ImageRaster(np.full((32, 32, 1), 0.5))
        assert phash64(gray).bits == 1 << 63

    def test_resize_robustness(self, rng):
        # regression guard: hashes of half-scale smooth images stay close
        ok = 0
        cases = 500
        for _ in range(cases):
            img = smooth_image(rng, size=128, base=8)
            half = crop_resize(img, Box(0, 0, 128, 128), 64)
            if hamming(phash64(img), phash64(half)) <= 10:
                ok += 1
        assert ok / cases >= 0.95


class TestHamming:
    def test_self_is_zero(self):
        h = PerceptualHash64(0x0123456789ABCDEF)
        assert hamming(h, h) == 0

    def test_complement_is_64(self):
        h = PerceptualHash64(0x0123456789ABCDEF)
        assert hamming(h, ~h) == 64

    def test_known_popcount(self):
        a = PerceptualHash64(0b10110)
        b = PerceptualHash64(0b00110 | (0b111 << 20))
        assert hamming(a, b) == bin(a.bits ^ b.bits).count("1") == 4

    def test_metric_properties(self, rng):
        for _ in range(200):
            a, b, c = (PerceptualHash64(int(v))
                       for v in rng.integers(0, 2**63, size=3))
            assert hamming(a, b) == hamming(b, a)
            assert (hamming(a, b) == 0) == (a == b)
            assert hamming(a, c) <= hamming(a, b) + hamming(b, c)


class TestDct:
    def test_orthonormal_round_trip(self, rng):
        block = rng.random((32, 32))
        back = idct2_ortho(dct2_ortho(block))
        assert np.abs(back - block).max() <= 1e-6
