"""Pure numpy versions of the compiled kernels.

Accumulation order follows ``_ckernels`` exactly, so results are bit-identical.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def _tap_indices(n, taps):
    k = np.arange(n // 2)
    return [(2 * k - j) % n for j in range(taps)]


def analysis_rows(x, lo, hi):
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.shape[1]
    approx = np.zeros((x.shape[0], n // 2))
    detail = np.zeros((x.shape[0], n // 2))
    for j, idx in enumerate(_tap_indices(n, len(lo))):
        v = x[:, idx]
        approx = approx + lo[j] * v
        detail = detail + hi[j] * v
    return approx, detail


def synthesis_rows(a, d, lo, hi):
    m, half = a.shape
    n = 2 * half
    out = np.zeros((m, n))
    for j, idx in enumerate(_tap_indices(n, len(lo))):
        out[:, idx] = out[:, idx] + (lo[j] * a + hi[j] * d)
    return out


def median_window(padded, window, chunk_rows=64):
    padded = np.ascontiguousarray(padded, dtype=np.float64)
    h = padded.shape[0] - window + 1
    w = padded.shape[1] - window + 1
    count = window * window
    out = np.empty((h, w))
    views = sliding_window_view(padded, (window, window))
    for start in range(0, h, chunk_rows):
        stop = min(start + chunk_rows, h)
        flat = views[start:stop].reshape(stop - start, w, count)
        out[start:stop] = np.partition(flat, count // 2, axis=-1)[..., count // 2]
    return out


def bilinear_sample(img, xs, ys):
    ih, iw = img.shape
    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    x1 = np.minimum(x0 + 1, iw - 1)
    y1 = np.minimum(y0 + 1, ih - 1)
    fx = xs - x0
    fy = ys - y0
    top = img[y0, x0] * (1.0 - fx) + img[y0, x1] * fx
    bottom = img[y1, x0] * (1.0 - fx) + img[y1, x1] * fx
    return top * (1.0 - fy) + bottom * fy
