"""Orthonormal periodic 2-D DWT over square power-of-two blocks.

Analysis is circular convolution followed by keeping even-indexed outputs,
``approx[k] = sum_j lo[j] * x[(2k - j) mod n]``. Synthesis is the exact
transpose. All transforms accept a stack of blocks with any leading batch
shape, which is how the watermark engine processes a whole image at once.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .imaging import is_power_of_two


class WaveletError(ValueError):
    pass


@dataclass(frozen=True)
class FilterBank:
    name: str
    analysis_low: np.ndarray
    analysis_high: np.ndarray

    @property
    def synthesis_low(self):
        # orthonormal bank: synthesis filters equal the analysis filters (transpose operator)
        return self.analysis_low

    @property
    def synthesis_high(self):
        return self.analysis_high

    @classmethod
    def from_lowpass(cls, name, lowpass):
        lo = np.asarray(lowpass, dtype=np.float64)
        n = len(lo)
        hi = np.array([(-1) ** (j + 1) * lo[n - 1 - j] for j in range(n)])
        lo.setflags(write=False)
        hi.setflags(write=False)
        return cls(name=name, analysis_low=lo, analysis_high=hi)


# Least-asymmetric Daubechies filter with 8 taps (4 vanishing moments),
# from the spectral factorization at 60 digits and rounded to double. The
# widely copied 12-digit tabulation leaves sum(high) near 1e-12.
SYM4 = FilterBank.from_lowpass(
    "sym4",
    [
        -0.07576571478950221,
        -0.029635527646002493,
        0.497618667632775,
        0.8037387518051321,
        0.29785779560530606,
        -0.09921954357663353,
        -0.012603967262031304,
        0.032223100604051466,
    ],
)

HAAR = FilterBank.from_lowpass("haar", [2**-0.5, 2**-0.5])


@dataclass
class SubbandPyramid:
    """Multi-level decomposition of one block (or a stack of blocks).

    ``details[0]`` is the finest level; each entry is an ``(LH, HL, HH)``
    triple where the first letter names the row (horizontal) filter and the
    second the column filter. Arrays carry any leading batch dimensions.
    """

    block_size: int
    levels: int
    ll: np.ndarray
    details: list

    def coefficient_count(self):
        n = self.ll.shape[-1] * self.ll.shape[-2]
        for bands in self.details:
            n += sum(b.shape[-1] * b.shape[-2] for b in bands)
        return n

    def energy(self):
        total = np.sum(self.ll**2, axis=(-2, -1))
        for bands in self.details:
            for b in bands:
                total = total + np.sum(b**2, axis=(-2, -1))
        return total


def max_levels(side):
    return int(side).bit_length() - 1


def dwt1d_step(signal, fb=SYM4):
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or len(x) < 2 or len(x) % 2:
        raise WaveletError(f"signal length must be even and >= 2, got {x.shape}")
    a, d = kernels.analysis_rows(x[None, :], fb.analysis_low, fb.analysis_high)
    return a[0], d[0]


def idwt1d_step(approx, detail, fb=SYM4):
    a = np.asarray(approx, dtype=np.float64)
    d = np.asarray(detail, dtype=np.float64)
    if a.shape != d.shape or a.ndim != 1:
        raise WaveletError(f"approx/detail length mismatch: {a.shape} vs {d.shape}")
    return kernels.synthesis_rows(
        np.ascontiguousarray(a[None, :]), np.ascontiguousarray(d[None, :]),
        fb.synthesis_low, fb.synthesis_high,
    )[0]


def _analyze_last_axis(x, fb):
    n = x.shape[-1]
    flat = np.ascontiguousarray(x).reshape(-1, n)
    a, d = kernels.analysis_rows(flat, fb.analysis_low, fb.analysis_high)
    shape = x.shape[:-1] + (n // 2,)
    return a.reshape(shape), d.reshape(shape)


def _synthesize_last_axis(a, d, fb):
    half = a.shape[-1]
    out = kernels.synthesis_rows(
        np.ascontiguousarray(a).reshape(-1, half),
        np.ascontiguousarray(d).reshape(-1, half),
        fb.synthesis_low, fb.synthesis_high,
    )
    return out.reshape(a.shape[:-1] + (2 * half,))


def _split(x, fb):
    lo_r, hi_r = _analyze_last_axis(x, fb)
    ll_t, lh_t = _analyze_last_axis(lo_r.swapaxes(-1, -2), fb)
    hl_t, hh_t = _analyze_last_axis(hi_r.swapaxes(-1, -2), fb)
    t = lambda m: np.ascontiguousarray(m.swapaxes(-1, -2))
    return t(ll_t), (t(lh_t), t(hl_t), t(hh_t))


def _merge(ll, bands, fb):
    lh, hl, hh = bands
    lo_r = _synthesize_last_axis(ll.swapaxes(-1, -2), lh.swapaxes(-1, -2), fb)
    hi_r = _synthesize_last_axis(hl.swapaxes(-1, -2), hh.swapaxes(-1, -2), fb)
    return _synthesize_last_axis(lo_r.swapaxes(-1, -2), hi_r.swapaxes(-1, -2), fb)


def dwt2d(block, levels=None, fb=SYM4):
    """Decompose a square power-of-two block (or a stack of them).

    ``levels`` defaults to the full depth, log2(side), leaving a 1x1 LL band.
    """
    x = np.asarray(block, dtype=np.float64)
    if x.ndim < 2 or x.shape[-1] != x.shape[-2]:
        raise WaveletError(f"block must be square, got shape {x.shape[-2:]}")
    side = x.shape[-1]
    if not is_power_of_two(side) or side < 2:
        raise WaveletError(f"block side must be a power of two >= 2, got {side}")
    depth = max_levels(side)
    if levels is None:
        levels = depth
    if not 1 <= levels <= depth:
        raise WaveletError(f"levels must be in [1, {depth}] for a {side}x{side} block, got {levels}")
    details = []
    ll = x
    for _ in range(levels):
        ll, bands = _split(ll, fb)
        details.append(bands)
    return SubbandPyramid(block_size=side, levels=levels, ll=ll, details=details)


def idwt2d(pyr, fb=SYM4):
    if len(pyr.details) != pyr.levels:
        raise WaveletError(f"pyramid has {len(pyr.details)} detail levels, expected {pyr.levels}")
    ll = np.asarray(pyr.ll, dtype=np.float64)
    for level in range(pyr.levels, 0, -1):
        side = pyr.block_size >> level
        bands = pyr.details[level - 1]
        if ll.shape[-2:] != (side, side) or any(b.shape != ll.shape for b in bands):
            raise WaveletError(f"malformed pyramid at level {level}: expected {side}x{side} bands")
        ll = _merge(ll, bands, fb)
    return ll
