"""Inner-loop kernels with a compiled backend and a numpy fallback.

The compiled extension is used when it imports; set ``BLOCKMARK_PURE_PYTHON=1``
to force the fallback.
"""
import os

import numpy as np

from . import _pykernels as python_backend

try:
    if os.environ.get("BLOCKMARK_PURE_PYTHON") == "1":
        raise ImportError("compiled kernels disabled by BLOCKMARK_PURE_PYTHON")
    from . import _ckernels as compiled_backend
except ImportError:
    compiled_backend = None


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


if compiled_backend is not None:
    BACKEND = "cython"

    # memoryview signatures require C-contiguous float64 input
    def analysis_rows(x, lo, hi):
        return compiled_backend.analysis_rows(_c(x), _c(lo), _c(hi))

    def synthesis_rows(a, d, lo, hi):
        return compiled_backend.synthesis_rows(_c(a), _c(d), _c(lo), _c(hi))

    def median_window(padded, window):
        padded = _c(padded)
        small = padded.astype(np.uint8)
        if np.array_equal(small, padded):
            return compiled_backend.median_window_u8(small, int(window))
        return compiled_backend.median_window(padded, int(window))

    def bilinear_sample(img, xs, ys):
        return compiled_backend.bilinear_sample(_c(img), _c(xs), _c(ys))

else:
    BACKEND = "python"
    analysis_rows = python_backend.analysis_rows
    synthesis_rows = python_backend.synthesis_rows
    median_window = python_backend.median_window
    bilinear_sample = python_backend.bilinear_sample

__all__ = [
    "BACKEND",
    "analysis_rows",
    "synthesis_rows",
    "median_window",
    "bilinear_sample",
    "compiled_backend",
    "python_backend",
]
