"""Lowpass multiplicative watermark embedding and non-blind detection.

One bit goes into each embedding block: every coefficient of the block's
last lowpass band is multiplied by ``alpha`` for a 1 or divided by it for a
0. Detection divides received by original lowpass coefficients and takes a
majority vote against ``(alpha + 1/alpha) / 2``.

Method ``M1`` embeds in every block. Method ``M2`` embeds only in the
``num_blocks`` blocks of highest variance, ranked on the original image.
Bits always map to embedding blocks in ascending row-major block order.
"""
from dataclasses import dataclass, field

import numpy as np

from . import wavelet
from .imaging import ImageError, as_gray, block_variances, is_power_of_two, segment_blocks
from .rng import random_bits

METHODS = ("M1", "M2")


class InvalidKey(ValueError):
    """Invalid watermark key parameters."""


@dataclass(frozen=True)
class WatermarkKey:
    method: str = "M1"
    alpha: float = 1.01
    block_size: int = 32
    levels: int = 5
    num_blocks: int = 256
    seed: int = 0
    epsilon: float = 1e-6

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.method not in METHODS:
            raise InvalidKey(f"method must be one of {METHODS}, got {self.method!r}")
        if not (np.isfinite(self.alpha) and self.alpha > 1):
            raise InvalidKey(f"alpha must exceed 1, got {self.alpha}")
        if not is_power_of_two(self.block_size) or self.block_size < 2:
            raise InvalidKey(f"block_size must be a power of two >= 2, got {self.block_size}")
        depth = wavelet.max_levels(self.block_size)
        if not 1 <= self.levels <= depth:
            raise InvalidKey(
                f"levels must be between 1 and log2(block_size) = {depth}, got {self.levels}"
            )
        if self.num_blocks < 1:
            raise InvalidKey(f"num_blocks must be positive, got {self.num_blocks}")
        if not 0 <= self.seed < 2**64:
            raise InvalidKey(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.epsilon >= 0:
            raise InvalidKey(f"epsilon must be nonnegative, got {self.epsilon}")

    @property
    def threshold(self):
        return threshold(self.alpha)


def default_key(method, seed=0):
    """Default geometry: M1 on 32x32 blocks, M2 on 256 of the 16x16 blocks."""
    if method == "M1":
        return WatermarkKey("M1", alpha=1.01, block_size=32, levels=5, num_blocks=256, seed=seed)
    if method == "M2":
        return WatermarkKey("M2", alpha=1.025, block_size=16, levels=4, num_blocks=256, seed=seed)
    raise InvalidKey(f"method must be one of {METHODS}, got {method!r}")


def threshold(alpha):
    if not alpha > 1:
        raise InvalidKey(f"alpha must exceed 1, got {alpha}")
    return (alpha + 1.0 / alpha) / 2.0


def total_blocks(key, width, height):
    b = key.block_size
    if width % b or height % b:
        raise ImageError(f"{width}x{height} image is not divisible into {b}x{b} blocks")
    return (width // b) * (height // b)


def capacity(key, width, height):
    n = total_blocks(key, width, height)
    if key.method == "M1":
        return n
    if key.num_blocks > n:
        raise InvalidKey(f"num_blocks {key.num_blocks} exceeds the {n} blocks available")
    return key.num_blocks


def select_blocks(img, key):
    """Embedding block indices (row-major), ascending."""
    grid = segment_blocks(img, key.block_size)
    n = len(grid)
    if key.method == "M1":
        return np.arange(n)
    if key.num_blocks > n:
        raise InvalidKey(f"num_blocks {key.num_blocks} exceeds the {n} blocks available")
    variances = block_variances(grid)
    # stable sort on -variance: equal variances keep row-major order
    ranked = np.argsort(-variances, kind="stable")
    return np.sort(ranked[: key.num_blocks])


def generate_watermark(seed, length):
    return random_bits(seed, length)


def _as_bits(bits):
    arr = np.asarray(bits)
    if arr.ndim != 1 or not np.all((arr == 0) | (arr == 1)):
        raise ValueError("watermark bits must be a 1-D sequence of 0/1 values")
    return arr.astype(np.uint8)


def embed(img, bits, key):
    host = as_gray(img)
    bits = _as_bits(bits)
    h, w = host.shape
    cap = capacity(key, w, h)
    if len(bits) != cap:
        raise ValueError(f"payload has {len(bits)} bits but capacity is {cap}")
    grid = segment_blocks(host, key.block_size)
    flat = grid.flat()
    chosen = select_blocks(host, key)
    pyr = wavelet.dwt2d(flat[chosen], key.levels)
    one = (bits == 1)[:, None, None]
    pyr.ll = np.where(one, pyr.ll * key.alpha, pyr.ll / key.alpha)
    flat[chosen] = wavelet.idwt2d(pyr)
    b = key.block_size
    return flat.reshape(h // b, w // b, b, b).swapaxes(1, 2).reshape(h, w)


@dataclass
class DetectionReport:
    bits: np.ndarray
    margins: np.ndarray
    undecidable: np.ndarray
    threshold: float
    blocks: np.ndarray = field(default=None)

    def __len__(self):
        return len(self.bits)


def vote(ll_original, ll_received, thresh, epsilon):
    """Majority vote over one block's lowpass ratios.

    Returns ``(bit, margin, undecidable)`` where ``margin`` is the fraction of
    usable coefficients whose ratio exceeds ``thresh``.
    """
    orig = np.asarray(ll_original, dtype=np.float64).ravel()
    recv = np.asarray(ll_received, dtype=np.float64).ravel()
    usable = np.abs(orig) >= epsilon
    n = int(usable.sum())
    if n == 0:
        return 0, 0.0, True
    ones = int(np.count_nonzero(recv[usable] / orig[usable] > thresh))
    return int(2 * ones > n), ones / n, False


def detect(original, received, key):
    orig = as_gray(original)
    recv = as_gray(received)
    if orig.shape != recv.shape:
        raise ImageError(f"original is {orig.shape[1]}x{orig.shape[0]} but received is "
                         f"{recv.shape[1]}x{recv.shape[0]}")
    chosen = select_blocks(orig, key)
    t = threshold(key.alpha)
    ll_o = wavelet.dwt2d(segment_blocks(orig, key.block_size).flat()[chosen], key.levels).ll
    ll_r = wavelet.dwt2d(segment_blocks(recv, key.block_size).flat()[chosen], key.levels).ll
    ll_o = ll_o.reshape(len(chosen), -1)
    ll_r = ll_r.reshape(len(chosen), -1)
    usable = np.abs(ll_o) >= key.epsilon
    counts = usable.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        above = usable & (ll_r / np.where(usable, ll_o, 1.0) > t)
    ones = above.sum(axis=1)
    undecidable = counts == 0
    bits = ((2 * ones > counts) & ~undecidable).astype(np.uint8)
    margins = np.where(undecidable, 0.0, ones / np.maximum(counts, 1))
    return DetectionReport(bits=bits, margins=margins, undecidable=undecidable,
                           threshold=t, blocks=chosen)
