"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Each row reports the best-of-N wall time per backend and checks that both
backends produced identical output.
"""
import argparse
import time
from contextlib import contextmanager

import numpy as np

from blockmark import attacks, engine, kernels
from blockmark.synth import textured_image
from blockmark.wavelet import SYM4

NAMES = ("analysis_rows", "synthesis_rows", "median_window", "bilinear_sample")


def _compiled_entry_points():
    # the package-level wrappers coerce contiguity for the compiled backend
    if kernels.BACKEND == "cython":
        return {n: getattr(kernels, n) for n in NAMES}
    return None


@contextmanager
def backend(entry_points):
    saved = {n: getattr(kernels, n) for n in NAMES}
    for n in NAMES:
        setattr(kernels, n, entry_points[n])
    try:
        yield
    finally:
        for n, f in saved.items():
            setattr(kernels, n, f)


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    img = textured_image(0)
    rows = np.random.default_rng(0).normal(size=(1024 * 16, 16))
    a, d = kernels.python_backend.analysis_rows(rows, SYM4.analysis_low, SYM4.analysis_high)
    bits = engine.generate_watermark(0, 256)
    m1, m2 = engine.default_key("M1"), engine.default_key("M2")
    marked = engine.embed(img, bits, m1)
    lo, hi = SYM4.analysis_low, SYM4.analysis_high
    return [
        ("dwt rows 16384x16", lambda: kernels.analysis_rows(rows, lo, hi)[0]),
        ("idwt rows 16384x16", lambda: kernels.synthesis_rows(a, d, lo, hi)),
        ("embed M1 512x512", lambda: engine.embed(img, bits, m1)),
        ("detect M1 512x512", lambda: engine.detect(img, marked, m1).bits),
        ("embed M2 512x512", lambda: engine.embed(img, bits, m2)),
        ("median 3x3 512x512", lambda: attacks.median_filter(img, 3)),
        ("median 7x7 512x512", lambda: attacks.median_filter(img, 7)),
        ("rotate 5deg 512x512", lambda: attacks.rotate_attack(img, 5)),
        ("scale 0.5 512x512", lambda: attacks.scale_attack(img, 0.5)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    compiled = _compiled_entry_points()
    if compiled is None:
        raise SystemExit("compiled kernels unavailable (not built, or BLOCKMARK_PURE_PYTHON=1)")
    python = {n: getattr(kernels.python_backend, n) for n in NAMES}
    print(f"{'case':<22}{'python ms':>11}{'cython ms':>11}{'speedup':>9}  identical")
    for name, fn in cases():
        with backend(python):
            t_py, out_py = best_of(fn, args.repeat)
        with backend(compiled):
            t_c, out_c = best_of(fn, args.repeat)
        same = np.array_equal(out_py, out_c)
        print(f"{name:<22}{t_py * 1e3:>11.1f}{t_c * 1e3:>11.1f}{t_py / t_c:>8.1f}x  {same}")


if __name__ == "__main__":
    main()
