"""Exit criteria A1-A13, one test each.

Standard-image checks read ``<name>.pgm`` files (goldhill, baboon, barbara,
boat, lena) from the directory named by ``BLOCKMARK_STANDARD_IMAGES`` and
are skipped with a notice when it is unset. A summary line per criterion is
printed at the end of the pytest run.
"""
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from blockmark import wavelet
from blockmark.attacks import awgn, jpeg_attack, mean_filter, rotate_attack
from blockmark.cli import main
from blockmark.engine import (
    WatermarkKey,
    default_key,
    detect,
    embed,
    generate_watermark,
    threshold,
)
from blockmark.imaging import requantize, segment_blocks
from blockmark.metrics import ber, corr_coeff, psnr
from blockmark.pgm import load_pgm, save_pgm
from blockmark.synth import FULL_RANGE, textured_image

RESULTS = {}
RUNS = 5
STANDARD = ("goldhill", "baboon", "barbara", "boat")
# mean watermarked PSNR reported for Goldhill, Baboon, Barbara, Boat
PAPER_PSNR = {"M1": (46.45, 45.93, 46.26, 45.60), "M2": (47.34, 47.65, 48.04, 47.79)}


def record(cid, ok, detail):
    RESULTS[cid] = ("PASS" if ok else "FAIL", detail)
    assert ok, f"{cid}: {detail}"


def skip(cid, detail):
    RESULTS[cid] = ("SKIP", detail)
    pytest.skip(detail)


def standard_dir():
    d = os.environ.get("BLOCKMARK_STANDARD_IMAGES")
    return Path(d) if d else None


def standard_image(name):
    d = standard_dir()
    if d is None or not (d / f"{name}.pgm").exists():
        return None
    return load_pgm(d / f"{name}.pgm").astype(np.float64)


def mean_ber(method, images, attack, runs=RUNS):
    """Five-run protocol: run ``r`` uses payload seed ``r``."""
    values = []
    for img in images:
        for r in range(runs):
            key = default_key(method, seed=r)
            bits = generate_watermark(r, 256)
            marked = requantize(embed(img, bits, key))
            values.append(ber(bits, detect(img, attack(marked, r), key).bits))
    return float(np.mean(values))


@pytest.fixture(scope="module")
def synthetic():
    return [textured_image(seed) for seed in range(20)]


def test_a1_perfect_reconstruction():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst_err = worst_energy = 0.0
    for side in (8, 16, 32, 64):
        x = rng.uniform(0, 255, (1000, side, side))
        pyr = wavelet.dwt2d(x, side.bit_length() - 1)
        worst_err = max(worst_err, float(np.abs(wavelet.idwt2d(pyr) - x).max()))
        e_in = np.sum(x**2, axis=(1, 2))
        worst_energy = max(worst_energy, float(np.max(np.abs(pyr.energy() - e_in) / e_in)))
    elapsed = time.perf_counter() - start
    record("A1", worst_err < 1e-8 and worst_energy < 1e-9 and elapsed < 10,
           f"max err {worst_err:.2e} (<1e-8), energy rel {worst_energy:.2e} (<1e-9), "
           f"{elapsed:.2f}s (<10s)")


def test_a2_filter_bank_sanity():
    lo, hi = wavelet.SYM4.analysis_low, wavelet.SYM4.analysis_high
    sums = (abs(np.sum(lo**2) - 1), abs(np.sum(lo) - math.sqrt(2)), abs(np.sum(hi)))
    worst_ll = worst_detail = 0.0
    for side in (2, 4, 8, 16, 32, 64):
        levels = side.bit_length() - 1
        for c in (0.0, 1.0, 100.0, 255.0, -37.5):
            p = wavelet.dwt2d(np.full((side, side), c), levels)
            worst_ll = max(worst_ll, abs(p.ll[0, 0] - c * 2**levels))
            worst_detail = max(worst_detail, max(np.abs(b).max() for t in p.details for b in t))
    ok = max(sums) < 1e-12 and worst_ll < 1e-9 and worst_detail < 1e-9
    record("A2", ok, f"filter sums off by {max(sums):.1e} (<1e-12); LL rule off by "
                     f"{worst_ll:.1e}, details {worst_detail:.1e} (<1e-9)")


def test_a3_no_attack_roundtrip(synthetic):
    start = time.perf_counter()
    errors = 0
    for i, img in enumerate(synthetic):
        for method in ("M1", "M2"):
            key = default_key(method, seed=i)
            bits = generate_watermark(1000 + i, 256)
            errors += int(np.count_nonzero(detect(img, requantize(embed(img, bits, key)), key).bits != bits))
    elapsed = time.perf_counter() - start
    record("A3", errors == 0 and elapsed < 30,
           f"{errors} bit errors over 20 images x 2 keys (need 0), {elapsed:.1f}s (<30s)")


def _natural_images():
    try:
        import skimage.data as data
    except ImportError:
        return []
    return [(n, getattr(data, n)().astype(np.float64))
            for n in ("camera", "moon", "grass", "brick", "gravel")]


def test_a4_imperceptibility(synthetic):
    images = [(f"synthetic{i}", img) for i, img in enumerate(synthetic)] + _natural_images()
    standard = [(n, standard_image(n)) for n in STANDARD]
    images += [(n, img) for n, img in standard if img is not None]
    worst = min(psnr(img, requantize(embed(img, generate_watermark(0, 256), default_key(m))))
                for _, img in images for m in ("M1", "M2"))
    detail = f"min PSNR {worst:.2f} dB over {len(images)} images (>=40)"
    ok = worst >= 40
    if all(img is not None for _, img in standard):
        for method, reported in PAPER_PSNR.items():
            for (name, img), ref in zip(standard, reported):
                runs = [psnr(img, requantize(embed(img, generate_watermark(r, 256),
                                                   default_key(method, r)))) for r in range(RUNS)]
                ok &= abs(np.mean(runs) - ref) <= 3
        detail += "; standard-image means within 3 dB of reported values checked"
    else:
        detail += "; standard images absent, paper-value band not checked"
    record("A4", ok, detail)


def test_a5_jpeg_robustness(synthetic):
    images = synthetic[:4]
    curve = [mean_ber("M2", images, lambda x, r, q=q: jpeg_attack(x, q)) for q in range(10, 100, 10)]
    monotone = all(b <= a for a, b in zip(curve, curve[1:]))
    high_q = max(curve[3:])
    record("A5", monotone and high_q <= 1.0,
           f"M2 BER by quality 10..90: {[round(c, 3) for c in curve]}; "
           f"max at q>=40 {high_q:.3f}% (<=1), non-increasing={monotone}")


def test_a6_lena_point_check():
    lena = standard_image("lena")
    if lena is None:
        skip("A6", "Lena not supplied (set BLOCKMARK_STANDARD_IMAGES); paper point-check skipped")
    q10 = mean_ber("M2", [lena], lambda x, r: jpeg_attack(x, 10))
    q20 = mean_ber("M2", [lena], lambda x, r: jpeg_attack(x, 20))
    record("A6", abs(q10 - 3.91) <= 3 and q20 <= 1,
           f"Lena M2 BER q10 {q10:.2f}% (3.91+-3), q20 {q20:.2f}% (<=1)")


def test_a7_noise_robustness(synthetic):
    images = synthetic[:4]
    lines, ok = [], True
    for method in ("M1", "M2"):
        zero = mean_ber(method, images, lambda x, r: awgn(x, 0, r))
        curve = [mean_ber(method, images, lambda x, r, s=s: awgn(x, s, r))
                 for s in (5, 10, 15, 20, 25, 30)]
        inversions = sum(b < a for a, b in zip(curve, curve[1:]))
        ok &= zero == 0 and inversions <= 1
        lines.append(f"{method} sigma0 {zero:.2f}%, sigma5..30 {[round(c, 2) for c in curve]} "
                     f"({inversions} inversions)")
    record("A7", ok, "; ".join(lines))


def test_a8_rotation(synthetic):
    imgs = [standard_image(n) for n in STANDARD]
    if all(img is not None for img in imgs):
        worst = max(mean_ber("M2", [img], lambda x, r, a=a: rotate_attack(x, a))
                    for img in imgs for a in (0.5, -0.5))
        record("A8", worst == 0, f"standard images, M2 at +-0.5 deg: max BER {worst:.2f}% (need 0)")
        return
    worst = max(mean_ber("M2", [img], lambda x, r, a=a: rotate_attack(x, a))
                for img in synthetic[:4] for a in (0.5, -0.5))
    record("A8", worst <= 3, f"synthetic fallback (standard images absent), M2 at +-0.5 deg: "
                             f"max per-image BER {worst:.2f}% (<=3)")


def test_a9_filtering(synthetic):
    imgs = [standard_image(n) for n in STANDARD]
    if all(img is not None for img in imgs):
        worst = max(mean_ber("M2", [img], lambda x, r: mean_filter(x, 3)) for img in imgs)
        record("A9", worst <= 6, f"standard images, M2 under 3x3 mean: max BER {worst:.2f}% (<=6)")
        return
    # full tonal range, as in photographs; see synth.MODERATE for why A3 uses less
    textured = [textured_image(100 + s, gray_range=FULL_RANGE) for s in range(10)]
    m1 = mean_ber("M1", textured, lambda x, r: mean_filter(x, 3))
    m2 = mean_ber("M2", textured, lambda x, r: mean_filter(x, 3))
    record("A9", m2 < m1, f"synthetic fallback (standard images absent), 3x3 mean over 10 "
                          f"full-range textured images: M2 {m2:.3f}% < M1 {m1:.3f}%")


def _brute_force_bit(ll_orig, ll_recv, alpha, epsilon):
    t = (alpha + 1 / alpha) / 2
    usable = ones = 0
    for o, r in zip(ll_orig.ravel().tolist(), ll_recv.ravel().tolist()):
        if abs(o) >= epsilon:
            usable += 1
            ones += r / o > t
    return 1 if usable and ones > usable / 2 else 0


def test_a10_vote_oracle():
    rng = np.random.default_rng(10)
    mismatches = ties = guarded = 0
    for _ in range(200):
        side = int(rng.choice([4, 8, 16]))
        levels = int(rng.integers(1, side.bit_length() - 1)) if side > 4 else 1
        alpha = float(rng.uniform(1.005, 1.1))
        key = WatermarkKey("M1", alpha, side, levels, epsilon=1e-6)
        pyr = wavelet.dwt2d(rng.uniform(20, 230, (side, side)), levels)
        n = pyr.ll.size
        ll = pyr.ll.ravel()
        ll[rng.random(n) < 0.15] = 0.0
        ratios = rng.choice([alpha, 1 / alpha], n)
        if n % 2 == 0 and rng.random() < 0.3:
            ratios = rng.permutation(np.repeat([alpha, 1 / alpha], n // 2))
            ll[:] = np.where(ll == 0, 50.0, ll)
            ties += 1
        if rng.random() < 0.05:
            ll[:] = 0.0
        pyr.ll = ll.reshape(pyr.ll.shape)
        original = wavelet.idwt2d(pyr)
        pyr.ll = pyr.ll * ratios.reshape(pyr.ll.shape) + rng.normal(0, 0.05, pyr.ll.shape)
        received = wavelet.idwt2d(pyr)
        report = detect(original, received, key)
        ll_o = wavelet.dwt2d(original, levels).ll
        ll_r = wavelet.dwt2d(received, levels).ll
        guarded += int(np.any(np.abs(ll_o) < key.epsilon))
        mismatches += int(report.bits[0] != _brute_force_bit(ll_o, ll_r, alpha, key.epsilon))
    record("A10", mismatches == 0 and ties > 0 and guarded > 0,
           f"{mismatches} mismatches in 200 instances ({ties} tie cases, {guarded} with "
           f"epsilon-guarded coefficients)")


def test_a11_metric_identities():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 512))
        a, b = rng.integers(0, 2, n), rng.integers(0, 2, n)
        worst = max(worst, abs(corr_coeff(a, b) - (1 - ber(a, b) / 50)))
    img = np.full((16, 16), 100.0)
    value = psnr(img, img + 1)
    record("A11", worst <= 1e-12 and abs(value - 48.1308) <= 1e-3,
           f"max |cc - (1 - ber/50)| = {worst:.1e} over 1000 pairs; PSNR(diff 1) = {value:.4f} dB")


def test_a12_determinism(tmp_path, synthetic):
    d = tmp_path / "imgs"
    d.mkdir()
    save_pgm(synthetic[0].astype(np.uint8), d / "tex.pgm")
    csvs = []
    for name in ("a.csv", "b.csv"):
        main(["bench", "--images", str(d), "--suite", "filtering", "--runs", "2",
              "--output", str(tmp_path / name), "--quiet"])
        csvs.append((tmp_path / name).read_bytes() + (tmp_path / name.replace(".csv", "_summary.csv")).read_bytes())
    main(["gen-key", "--method", "M2", "-o", str(tmp_path / "k.json"), "--quiet"])
    pgms = []
    for name in ("w1.pgm", "w2.pgm"):
        main(["embed", "--key", str(tmp_path / "k.json"), "--input", str(d / "tex.pgm"),
              "--output", str(tmp_path / name), "--quiet"])
        pgms.append((tmp_path / name).read_bytes())
    record("A12", csvs[0] == csvs[1] and pgms[0] == pgms[1] and len(pgms[0]) > 512 * 512,
           f"bench CSVs identical={csvs[0] == csvs[1]}, embedded PGMs identical={pgms[0] == pgms[1]}")


def test_a13_performance(synthetic):
    img = synthetic[0]
    timings = []
    for method in ("M1", "M2"):
        key = default_key(method)
        bits = generate_watermark(0, 256)
        t0 = time.perf_counter()
        marked = requantize(embed(img, bits, key))
        t1 = time.perf_counter()
        detect(img, marked, key)
        t2 = time.perf_counter()
        timings.append((method, t1 - t0, t2 - t1))
    ok = all(e < 2 and d < 2 for _, e, d in timings)
    record("A13", ok, ", ".join(f"{m} embed {e * 1000:.0f} ms / detect {d * 1000:.0f} ms"
                                for m, e, d in timings) + " (<2 s each)")
