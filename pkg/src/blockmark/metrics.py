"""Bit error rate, PSNR and the +/-1 correlation coefficient."""
import math

import numpy as np

from .imaging import ImageError

PSNR_INF = math.inf


def _pair(reference, detected):
    a = np.asarray(reference).astype(np.int64).ravel()
    b = np.asarray(detected).astype(np.int64).ravel()
    if len(a) != len(b):
        raise ValueError(f"bit sequences differ in length: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise ValueError("bit sequences are empty")
    return a, b


def ber(reference, detected):
    """Percentage of positions where the two bit sequences differ."""
    a, b = _pair(reference, detected)
    return 100.0 * int(np.count_nonzero(a != b)) / len(a)


def corr_coeff(reference, detected):
    a, b = _pair(reference, detected)
    w = 2 * a - 1
    v = 2 * b - 1
    # integer sums: exact for +/-1 sequences
    return int(np.dot(w, v)) / math.sqrt(int(np.dot(w, w)) * int(np.dot(v, v)))


def psnr(a, b):
    """PSNR in dB between two 8-bit images; ``math.inf`` when identical."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ImageError(f"image shapes differ: {x.shape} vs {y.shape}")
    mse = float(np.mean((x - y) ** 2))
    if mse == 0:
        return PSNR_INF
    return 10.0 * math.log10(255.0**2 / mse)


def format_psnr(value):
    return "inf" if math.isinf(value) else repr(float(value))
