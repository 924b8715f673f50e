"""Deterministic attacks on watermarked images.

Every attack returns an 8-bit-realizable float64 image of unchanged size.
Geometric attacks undo themselves (the angle or scale factor is assumed
known), so the residual distortion is interpolation and requantization.
"""
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import kernels
from .imaging import ImageError, as_gray, requantize, round_half_away
from .rng import SplitMix64

KINDS = ("none", "jpeg", "awgn", "mean", "median", "rotate", "scale", "crop")


class AttackError(ValueError):
    pass


def awgn(img, sigma, noise_seed=0):
    """Add i.i.d. Gaussian noise (row-major draw order), then clamp and quantize."""
    arr = as_gray(img)
    if not sigma >= 0:
        raise AttackError(f"sigma must be nonnegative, got {sigma}")
    noise = SplitMix64(noise_seed).gaussian(arr.size).reshape(arr.shape)
    return requantize(arr + sigma * noise)


def _check_window(arr, window):
    if int(window) != window or window < 3 or window % 2 == 0:
        raise AttackError(f"window must be odd and >= 3, got {window}")
    if window > min(arr.shape):
        raise AttackError(f"window {window} exceeds the image size {arr.shape[1]}x{arr.shape[0]}")


def mean_filter(img, window=3):
    arr = as_gray(img)
    _check_window(arr, window)
    r = window // 2
    padded = np.pad(arr, r, mode="edge")
    means = sliding_window_view(padded, (window, window)).sum(axis=(-2, -1)) / (window * window)
    return requantize(means)


def median_filter(img, window=3):
    arr = as_gray(img)
    _check_window(arr, window)
    padded = np.pad(arr, window // 2, mode="edge")
    return requantize(kernels.median_window(np.ascontiguousarray(padded), int(window)))


def _exact_cos_sin(angle_degrees):
    quarter = {0: (1.0, 0.0), 90: (0.0, 1.0), 180: (-1.0, 0.0), 270: (0.0, -1.0)}
    a = float(angle_degrees) % 360.0
    if a in quarter:
        return quarter[a]
    rad = np.deg2rad(a)
    return float(np.cos(rad)), float(np.sin(rad))


def rotate(img, angle_degrees):
    """Rotate counterclockwise about the image center, bilinear, same-size canvas.

    Samples falling outside the source take the nearest edge value. No
    quantization is applied.
    """
    arr = as_gray(img)
    h, w = arr.shape
    c, s = _exact_cos_sin(angle_degrees)
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    dy, dx = np.mgrid[0:h, 0:w].astype(np.float64)
    dy -= cy
    dx -= cx
    sx = np.clip(cx + c * dx - s * dy, 0.0, w - 1.0)
    sy = np.clip(cy + s * dx + c * dy, 0.0, h - 1.0)
    return kernels.bilinear_sample(np.ascontiguousarray(arr), sx, sy)


def rotate_attack(img, angle_degrees):
    """Rotate, store, rotate back by the known angle, store."""
    turned = requantize(rotate(img, angle_degrees))
    return requantize(rotate(turned, -angle_degrees))


def resize(img, new_height, new_width):
    """Bilinear resample with pixel-center alignment and clamped source coordinates."""
    arr = as_gray(img)
    h, w = arr.shape
    if new_height < 1 or new_width < 1:
        raise AttackError(f"cannot resample to {new_width}x{new_height}")
    ys = np.clip((np.arange(new_height) + 0.5) * (h / new_height) - 0.5, 0.0, h - 1.0)
    xs = np.clip((np.arange(new_width) + 0.5) * (w / new_width) - 0.5, 0.0, w - 1.0)
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    return kernels.bilinear_sample(np.ascontiguousarray(arr), np.ascontiguousarray(gx),
                                   np.ascontiguousarray(gy))


def scale_attack(img, factor):
    arr = as_gray(img)
    if not 0 < factor <= 1:
        raise AttackError(f"scale factor must be in (0, 1], got {factor}")
    h, w = arr.shape
    sh = int(round_half_away(factor * h))
    sw = int(round_half_away(factor * w))
    if sh < 1 or sw < 1:
        raise AttackError(f"scale factor {factor} shrinks a {w}x{h} image to nothing")
    small = requantize(resize(arr, sh, sw))
    return requantize(resize(small, h, w))


# Annex K luminance table.
JPEG_LUMA_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)


def jpeg_quant_table(quality):
    """IJG quality scaling of the luminance table (integer arithmetic)."""
    if int(quality) != quality or not 1 <= quality <= 100:
        raise AttackError(f"JPEG quality must be an integer in 1..100, got {quality}")
    quality = int(quality)
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    return np.clip((JPEG_LUMA_TABLE * scale + 50) // 100, 1, 255)


def _dct_matrix(n=8):
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    m = np.cos((2 * i + 1) * k * np.pi / (2 * n)) * np.sqrt(2.0 / n)
    m[0] /= np.sqrt(2.0)
    return m


_DCT8 = _dct_matrix(8)


def jpeg_attack(img, quality):
    """Baseline JPEG luminance loss model: 8x8 DCT, quantize, dequantize, inverse."""
    arr = as_gray(img)
    table = jpeg_quant_table(quality).astype(np.float64)
    h, w = arr.shape
    if h % 8 or w % 8:
        raise AttackError(f"JPEG model needs dimensions divisible by 8, got {w}x{h}")
    blocks = arr.reshape(h // 8, 8, w // 8, 8).swapaxes(1, 2) - 128.0
    coeffs = _DCT8 @ blocks @ _DCT8.T
    coeffs = round_half_away(coeffs / table) * table
    restored = _DCT8.T @ coeffs @ _DCT8 + 128.0
    return requantize(restored.swapaxes(1, 2).reshape(h, w))


def crop_attack(img, x, y, width, height, fill=0):
    """Overwrite the rectangle ``[y, y+height) x [x, x+width)`` with ``fill``."""
    arr = requantize(img)
    h, w = arr.shape
    if min(x, y, width, height) < 0 or x + width > w or y + height > h:
        raise AttackError(f"crop rectangle x={x} y={y} w={width} h={height} "
                          f"is outside the {w}x{h} image")
    if not 0 <= fill <= 255:
        raise AttackError(f"fill must be in 0..255, got {fill}")
    arr[y:y + height, x:x + width] = float(fill)
    return arr


@dataclass(frozen=True)
class AttackSpec:
    """An attack kind with its parameters, e.g. ``AttackSpec("jpeg", {"quality": 30})``."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise AttackError(f"unknown attack kind {self.kind!r}; expected one of {KINDS}")

    def render(self):
        """Stable ``key=value`` rendering with keys sorted."""
        return ";".join(f"{k}={self.params[k]}" for k in sorted(self.params))

    def apply(self, img):
        p = self.params
        if self.kind == "none":
            return requantize(img)
        if self.kind == "jpeg":
            return jpeg_attack(img, p["quality"])
        if self.kind == "awgn":
            return awgn(img, p["sigma"], p.get("noise_seed", 0))
        if self.kind == "mean":
            return mean_filter(img, p["window"])
        if self.kind == "median":
            return median_filter(img, p["window"])
        if self.kind == "rotate":
            return rotate_attack(img, p["angle"])
        if self.kind == "scale":
            return scale_attack(img, p["factor"])
        if self.kind == "crop":
            return crop_attack(img, p["x"], p["y"], p["w"], p["h"], p.get("fill", 0))
        raise AssertionError(self.kind)
