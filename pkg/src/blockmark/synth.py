"""Seeded synthetic test images with natural-image statistics.

Stand-ins for the standard 512x512 test photographs, which are not bundled.
``textured_image`` is a dead-leaves occlusion model (sharp object edges,
scale-invariant sizes) with a ``1/f`` grain field on top.
"""
import numpy as np

from .rng import SplitMix64


def fractal_field(seed, size=512, slope=1.3):
    """Zero-mean, unit-variance Gaussian field with a ``1/f**slope`` amplitude spectrum."""
    noise = SplitMix64(seed).gaussian(size * size).reshape(size, size)
    fy = np.fft.fftfreq(size)[:, None]
    fx = np.fft.rfftfreq(size)[None, :]
    radius = np.hypot(fy, fx)
    radius[0, 0] = 1.0
    spectrum = np.fft.rfft2(noise) / radius**slope
    spectrum[0, 0] = 0.0
    field = np.fft.irfft2(spectrum, s=(size, size))
    return (field - field.mean()) / field.std()


def dead_leaves(seed, size=512, r_min=2.0, r_max=120.0, count=6000, low=72.0, high=232.0):
    """Occluding disks with radius density ~ r**-3 and uniform gray levels."""
    stream = SplitMix64(seed)
    u = stream.uniform53(4 * count).reshape(count, 4)
    # inverse CDF of p(r) ~ r**-3 on [r_min, r_max]
    a, b = r_min**-2, r_max**-2
    radii = (a - u[:, 0] * (a - b)) ** -0.5
    cy = u[:, 1] * size
    cx = u[:, 2] * size
    gray = low + u[:, 3] * (high - low)
    img = np.full((size, size), (low + high) / 2.0)
    for r, y, x, g in zip(radii, cy, cx, gray):
        y0, y1 = max(int(y - r), 0), min(int(y + r) + 1, size)
        x0, x1 = max(int(x - r), 0), min(int(x + r) + 1, size)
        if y0 >= y1 or x0 >= x1:
            continue
        yy, xx = np.ogrid[y0:y1, x0:x1]
        inside = (yy - y) ** 2 + (xx - x) ** 2 <= r * r
        img[y0:y1, x0:x1][inside] = g
    return img


# Disk gray ranges. MODERATE keeps every 32x32 block mean well above 50, the
# level below which an M1 one-bit is erased by 8-bit rounding; FULL_RANGE
# includes dark and bright objects as natural photographs do.
MODERATE = (72.0, 232.0)
FULL_RANGE = (8.0, 248.0)


def textured_image(seed, size=512, gray_range=MODERATE, grain=8.0):
    """Integral 8-bit test image: dead leaves plus ``1/f`` grain."""
    low, high = gray_range
    base = dead_leaves(seed, size, low=low, high=high)
    field = fractal_field(seed ^ 0x5DEECE66D, size)
    return np.round(np.clip(base + grain * field, 0.0, 255.0))
