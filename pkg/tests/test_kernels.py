"""The compiled and numpy kernels must agree bit for bit."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from blockmark import kernels
from blockmark.wavelet import SYM4

compiled = kernels.compiled_backend
python = kernels.python_backend
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")

finite = st.floats(-1e4, 1e4, allow_nan=False)


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


@needs_compiled
@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.sampled_from([2, 4, 8, 16, 32]), st.data())
def test_analysis_synthesis_parity(rows, n, data):
    x = data.draw(arrays(np.float64, (rows, n), elements=finite))
    lo, hi = SYM4.analysis_low, SYM4.analysis_high
    a1, d1 = compiled.analysis_rows(np.ascontiguousarray(x), lo, hi)
    a2, d2 = python.analysis_rows(x, lo, hi)
    assert np.array_equal(a1, a2) and np.array_equal(d1, d2)
    assert np.array_equal(compiled.synthesis_rows(a1, d1, lo, hi),
                          python.synthesis_rows(a1, d1, lo, hi))


@needs_compiled
@pytest.mark.parametrize("window", [3, 5, 7])
def test_median_parity(window, rng):
    padded = rng.integers(0, 256, (40, 37)).astype(np.float64)
    assert np.array_equal(compiled.median_window(padded, window),
                          python.median_window(padded, window))


def test_median_against_sort(rng):
    padded = rng.normal(size=(9, 9))
    out = python.median_window(padded, 5)
    for y in range(5):
        for x in range(5):
            assert out[y, x] == sorted(padded[y:y + 5, x:x + 5].ravel())[12]


@needs_compiled
def test_bilinear_parity(rng):
    img = rng.uniform(0, 255, (30, 20))
    xs = rng.uniform(0, 19, (25, 25))
    ys = rng.uniform(0, 29, (25, 25))
    xs[0, :3] = [0.0, 19.0, 7.0]
    ys[0, :3] = [0.0, 29.0, 29.0]
    assert np.array_equal(compiled.bilinear_sample(img, xs, ys),
                          python.bilinear_sample(img, xs, ys))


def test_bilinear_integer_grid_is_exact(rng):
    img = rng.uniform(0, 255, (6, 5))
    ys, xs = np.mgrid[0:6, 0:5].astype(np.float64)
    assert np.array_equal(kernels.bilinear_sample(img, xs, ys), img)


@needs_compiled
@pytest.mark.parametrize("window", [3, 5, 7, 9])
def test_histogram_median_parity(window, rng):
    padded = rng.integers(0, 256, (50, 41)).astype(np.uint8)
    padded[10:20] = rng.choice([0, 255], (10, 41))
    expected = python.median_window(padded.astype(np.float64), window)
    assert np.array_equal(compiled.median_window_u8(padded, window), expected)


def test_median_dispatch_handles_fractional(rng):
    padded = rng.uniform(0, 255, (12, 12))
    assert np.array_equal(kernels.median_window(padded, 3), python.median_window(padded, 3))
