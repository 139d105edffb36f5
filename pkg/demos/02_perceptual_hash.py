"""64-bit perceptual hashing.

The hash is a frequency-domain fingerprint: luma, 32x32 resize, orthonormal
2D DCT, then each of the top-left 8x8 coefficients is thresholded against the
median of the 63 AC coefficients. Similar images land a few bit flips apart;
a global brightness shift (which only moves the DC coefficient) does not flip
any bit at all.

Run:  python3 demos/02_perceptual_hash.py
"""

import numpy as np

from dynview.geometry import Box
from dynview.phash import hamming, phash64
from dynview.raster import ImageRaster, crop_resize


def smooth(rng, size=128):
    coarse = rng.random((8, 8, 1))
    big = crop_resize(ImageRaster(coarse), Box(0, 0, 8, 8), size)
    return big


def main():
    rng = np.random.default_rng(3)
    img = smooth(rng)
    h = phash64(img)
    print(f"hash of a smooth 128x128 image: {h.to_hex()}")

    shifted = ImageRaster(np.clip(img.data + 0.05, 0.0, 1.0))
    print(f"after +0.05 brightness shift:   {phash64(shifted).to_hex()} "
          f"(hamming {hamming(h, phash64(shifted))})")

    half = crop_resize(img, Box(0, 0, 128, 128), 64)
    print(f"after downscaling to 64x64:     {phash64(half).to_hex()} "
          f"(hamming {hamming(h, phash64(half))})")

    other = smooth(np.random.default_rng(4))
    print(f"an unrelated image:             {phash64(other).to_hex()} "
          f"(hamming {hamming(h, phash64(other))})")

    print("\nhamming distance is a metric on hashes:")
    a, b = phash64(img), phash64(other)
    print(f"  d(a,a)=0: {hamming(a, a) == 0}")
    print(f"  symmetric: {hamming(a, b) == hamming(b, a)}")
    print(f"  d(a,~a)=64: {hamming(a, ~a) == 64}")


if __name__ == "__main__":
    main()
