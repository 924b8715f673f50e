"""Grayscale rasters, 8-bit quantization and block segmentation.

Images are plain 2-D numpy arrays: ``float64`` for working images and
``uint8`` for stored (8-bit) buffers. Pixel ``(row, col)`` is row-major.
"""
from dataclasses import dataclass

import numpy as np


class ImageError(ValueError):
    """Raised for malformed images or incompatible geometry."""


def is_power_of_two(n):
    return n > 0 and (n & (n - 1)) == 0


def as_gray(img):
    """Validate ``img`` as a finite single-channel image and return it as float64."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ImageError(f"expected a single-channel 2-D image, got shape {arr.shape}")
    if arr.size == 0:
        raise ImageError("image is empty")
    if not np.all(np.isfinite(arr)):
        raise ImageError("image contains non-finite pixel values")
    return arr


def round_half_away(x):
    """Round to the nearest integer, ties away from zero."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def quantize_to_8bit(img):
    """Round half away from zero and clamp to [0, 255]; returns a uint8 buffer."""
    arr = as_gray(img)
    return np.clip(round_half_away(arr), 0, 255).astype(np.uint8)


def requantize(img):
    """Quantize to 8 bits and return as a float64 working image."""
    return quantize_to_8bit(img).astype(np.float64)


@dataclass(frozen=True)
class BlockGrid:
    """Non-overlapping square tiling of an image.

    ``blocks`` has shape ``(rows, cols, block_size, block_size)``.
    """

    block_size: int
    blocks: np.ndarray

    @property
    def rows(self):
        return self.blocks.shape[0]

    @property
    def cols(self):
        return self.blocks.shape[1]

    def __len__(self):
        return self.rows * self.cols

    def flat(self):
        """Blocks as a ``(rows*cols, B, B)`` stack in row-major block order."""
        b = self.block_size
        return self.blocks.reshape(-1, b, b)


def check_block_geometry(height, width, block_size):
    if not is_power_of_two(block_size):
        raise ImageError(f"block size must be a power of two, got {block_size}")
    if height % block_size:
        raise ImageError(f"height {height} is not divisible by block size {block_size}")
    if width % block_size:
        raise ImageError(f"width {width} is not divisible by block size {block_size}")


def segment_blocks(img, block_size):
    arr = as_gray(img)
    h, w = arr.shape
    check_block_geometry(h, w, block_size)
    b = block_size
    blocks = arr.reshape(h // b, b, w // b, b).swapaxes(1, 2).copy()
    return BlockGrid(block_size=b, blocks=blocks)


def assemble_blocks(grid):
    blocks = np.asarray(grid.blocks, dtype=np.float64)
    b = grid.block_size
    if blocks.ndim != 4 or blocks.shape[2:] != (b, b):
        raise ImageError(f"malformed block grid of shape {blocks.shape} for block size {b}")
    rows, cols = blocks.shape[:2]
    return blocks.swapaxes(1, 2).reshape(rows * b, cols * b).copy()


def block_variance(block):
    """Population variance (divisor = element count)."""
    arr = np.asarray(block, dtype=np.float64)
    if arr.size == 0:
        raise ImageError("block is empty")
    return float(np.mean((arr - arr.mean()) ** 2))


def block_variances(grid):
    """Population variance of every block, row-major order."""
    flat = grid.flat()
    means = flat.mean(axis=(1, 2), keepdims=True)
    return ((flat - means) ** 2).mean(axis=(1, 2))
