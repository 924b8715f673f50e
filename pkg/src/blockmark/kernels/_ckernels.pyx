# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

Every routine mirrors ``_pykernels`` operation for operation so the two
backends agree bit for bit.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()


def analysis_rows(const double[:, ::1] x, const double[::1] lo, const double[::1] hi):
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1], half = n // 2
    cdef Py_ssize_t taps = lo.shape[0]
    cdef Py_ssize_t r, k, j, idx
    cdef double acc_a, acc_d, v
    approx = np.empty((m, half), dtype=np.float64)
    detail = np.empty((m, half), dtype=np.float64)
    cdef double[:, ::1] a = approx
    cdef double[:, ::1] d = detail
    for r in range(m):
        for k in range(half):
            acc_a = 0.0
            acc_d = 0.0
            for j in range(taps):
                idx = (2 * k - j) % n
                if idx < 0:
                    idx += n
                v = x[r, idx]
                acc_a = acc_a + lo[j] * v
                acc_d = acc_d + hi[j] * v
            a[r, k] = acc_a
            d[r, k] = acc_d
    return approx, detail


def synthesis_rows(const double[:, ::1] a, const double[:, ::1] d,
                   const double[::1] lo, const double[::1] hi):
    cdef Py_ssize_t m = a.shape[0], half = a.shape[1], n = 2 * half
    cdef Py_ssize_t taps = lo.shape[0]
    cdef Py_ssize_t r, k, j, idx
    out = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] x = out
    # tap-major order: each tap scatters to distinct positions, as in the numpy path
    for r in range(m):
        for j in range(taps):
            for k in range(half):
                idx = (2 * k - j) % n
                if idx < 0:
                    idx += n
                x[r, idx] = x[r, idx] + (lo[j] * a[r, k] + hi[j] * d[r, k])
    return out


cdef double _select(double* buf, Py_ssize_t count, Py_ssize_t k) nogil:
    """k-th smallest value (Wirth's selection); reorders ``buf`` in place."""
    cdef Py_ssize_t lo = 0, hi = count - 1, i, j
    cdef double pivot, tmp
    while lo < hi:
        pivot = buf[k]
        i = lo
        j = hi
        while True:
            while buf[i] < pivot:
                i += 1
            while pivot < buf[j]:
                j -= 1
            if i <= j:
                tmp = buf[i]
                buf[i] = buf[j]
                buf[j] = tmp
                i += 1
                j -= 1
            if i > j:
                break
        if j < k:
            lo = i
        if k < i:
            hi = j
    return buf[k]


def median_window(const double[:, ::1] padded, int window):
    cdef Py_ssize_t h = padded.shape[0] - window + 1
    cdef Py_ssize_t w = padded.shape[1] - window + 1
    cdef Py_ssize_t count = window * window, mid = count // 2
    cdef Py_ssize_t y, x, dy, dx, t
    out = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double[::1] scratch = np.empty(count, dtype=np.float64)
    cdef double* buf = &scratch[0]
    with nogil:
        for y in range(h):
            for x in range(w):
                t = 0
                for dy in range(window):
                    for dx in range(window):
                        buf[t] = padded[y + dy, x + dx]
                        t += 1
                o[y, x] = _select(buf, count, mid)
    return out


def bilinear_sample(const double[:, ::1] img, const double[:, ::1] xs, const double[:, ::1] ys):
    cdef Py_ssize_t ih = img.shape[0], iw = img.shape[1]
    cdef Py_ssize_t h = xs.shape[0], w = xs.shape[1]
    cdef Py_ssize_t r, c, x0, x1, y0, y1
    cdef double sx, sy, fx, fy, top, bottom
    out = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for r in range(h):
            for c in range(w):
                sx = xs[r, c]
                sy = ys[r, c]
                x0 = <Py_ssize_t>floor(sx)
                y0 = <Py_ssize_t>floor(sy)
                x1 = x0 + 1 if x0 + 1 < iw else iw - 1
                y1 = y0 + 1 if y0 + 1 < ih else ih - 1
                fx = sx - x0
                fy = sy - y0
                top = img[y0, x0] * (1.0 - fx) + img[y0, x1] * fx
                bottom = img[y1, x0] * (1.0 - fx) + img[y1, x1] * fx
                o[r, c] = top * (1.0 - fy) + bottom * fy
    return out


def median_window_u8(const cnp.uint8_t[:, ::1] padded, int window):
    """Median filter for 8-bit data by a sliding 256-bin histogram."""
    cdef Py_ssize_t h = padded.shape[0] - window + 1
    cdef Py_ssize_t w = padded.shape[1] - window + 1
    cdef Py_ssize_t mid = (window * window) // 2
    cdef Py_ssize_t y, x, dy, dx, lt, m
    cdef int hist[256]
    cdef int v
    out = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for y in range(h):
            for v in range(256):
                hist[v] = 0
            for dy in range(window):
                for dx in range(window):
                    hist[padded[y + dy, dx]] += 1
            m = 0
            lt = 0
            while lt + hist[m] <= mid:
                lt += hist[m]
                m += 1
            o[y, 0] = m
            for x in range(1, w):
                for dy in range(window):
                    v = padded[y + dy, x - 1]
                    hist[v] -= 1
                    if v < m:
                        lt -= 1
                    v = padded[y + dy, x + window - 1]
                    hist[v] += 1
                    if v < m:
                        lt += 1
                # restore count(< m) <= mid < count(<= m)
                while lt > mid:
                    m -= 1
                    lt -= hist[m]
                while lt + hist[m] <= mid:
                    lt += hist[m]
                    m += 1
                o[y, x] = m
    return out
