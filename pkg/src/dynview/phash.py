"""64-bit DCT perceptual hash and Hamming distance.

Pipeline: luma -> 32x32 bilinear resize -> orthonormal 2D DCT-II -> top-left
8x8 coefficient block -> threshold each coefficient against the median of the
63 AC coefficients (the DC coefficient is excluded from the median but its bit
is set from the same comparison). Bits are packed row-major, first coefficient
in the most significant bit, so the hex string reads in scan order.

Because a uniform brightness shift only moves the DC coefficient of an
orthonormal DCT, hashes are invariant to brightness shifts that do not clamp.
A constant image has all AC coefficients zero, so the strict ">" against the
zero median clears every AC bit; only the DC bit can be set (it is, for any
non-black constant). Coefficients are rounded to 9 decimals before
thresholding so analytically-zero coefficients stay zero across FFT backends.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .geometry import Box
from .raster import ImageRaster, crop_resize, to_luma

HASH_INPUT_SIZE = 32
HASH_BLOCK = 8
HASH_BITS = HASH_BLOCK * HASH_BLOCK


@dataclass(frozen=True)
class PerceptualHash64:
    """A 64-bit frequency-domain image fingerprint."""

    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << HASH_BITS):
            raise ValueError(f"hash must fit in {HASH_BITS} bits, got {self.bits:#x}")

    def to_hex(self) -> str:
        return f"{self.bits:016x}"

    @classmethod
    def from_hex(cls, s: str) -> "PerceptualHash64":
        if len(s) != 16:
            raise ValueError(f"expected 16 hex digits, got {s!r}")
        return cls(int(s, 16))

    def __invert__(self) -> "PerceptualHash64":
        return PerceptualHash64(self.bits ^ ((1 << HASH_BITS) - 1))


def dct2_ortho(block: np.ndarray) -> np.ndarray:
    """Orthonormal 2D DCT-II of a square block."""
    return scipy.fft.dctn(block, type=2, norm="ortho")


def idct2_ortho(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dct2_ortho`."""
    return scipy.fft.idctn(coeffs, type=2, norm="ortho")


def phash64(img: ImageRaster) -> PerceptualHash64:
    """Compute the 64-bit perceptual hash of a raster. Deterministic."""
    luma = to_luma(img)
    small = crop_resize(luma, Box(0.0, 0.0, float(luma.width), float(luma.height)),
                        HASH_INPUT_SIZE)
    coeffs = dct2_ortho(small.data[:, :, 0])
    # quantize so exactly-symmetric inputs (AC coefficients that are zero
    # analytically) hash identically regardless of FFT backend noise
    block = np.round(coeffs[:HASH_BLOCK, :HASH_BLOCK].reshape(-1), 9)
    median = float(np.median(block[1:]))  # AC only; DC excluded from the statistic
    bits = 0
    for k, c in enumerate(block):
        if c > median:
            bits |= 1 << (HASH_BITS - 1 - k)
    return PerceptualHash64(bits)


def hamming(a: PerceptualHash64, b: PerceptualHash64) -> int:
    """Population count of a XOR b, in [0, 64]."""
    return (a.bits ^ b.bits).bit_count()
