"""Benchmark grids over images, watermark keys, attacks and repeated runs.

Run ``r`` of a key uses payload seed ``key.seed + r`` and, for noise
attacks, noise seed ``key.seed + r``. Everything else is fixed, so the
CSVs are byte-identical across invocations (``wall_ms`` is written as 0
unless timing is requested).
"""
import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import engine
from .attacks import AttackSpec
from .imaging import quantize_to_8bit, requantize
from .metrics import ber, corr_coeff, format_psnr, psnr

COLUMNS = ["image", "method", "attack_kind", "attack_params", "run",
           "ber_percent", "psnr_db", "corr_coeff", "wall_ms", "error"]

ROTATION_ANGLES = (0.5, -0.5, 1, -1, 5, -5, 10, 30)
SCALE_FACTORS = (0.9, 0.8, 0.7, 0.6, 0.5)
JPEG_QUALITIES = tuple(range(10, 100, 10))
NOISE_SIGMAS = (5, 10, 15, 20, 25, 30)
FILTER_WINDOWS = (3, 5, 7)
CROP_FRACTIONS = (0.0625, 0.25)


def suite(name, width=512, height=512):
    """Attack grid for a named suite, in column order."""
    if name == "none":
        return [AttackSpec("none")]
    if name == "jpeg":
        return [AttackSpec("jpeg", {"quality": q}) for q in JPEG_QUALITIES]
    if name == "noise":
        return [AttackSpec("awgn", {"sigma": s}) for s in NOISE_SIGMAS]
    if name == "rotation":
        return [AttackSpec("rotate", {"angle": a}) for a in ROTATION_ANGLES]
    if name == "scaling":
        return [AttackSpec("scale", {"factor": f}) for f in SCALE_FACTORS]
    if name == "filtering":
        return ([AttackSpec("mean", {"window": w}) for w in FILTER_WINDOWS]
                + [AttackSpec("median", {"window": w}) for w in FILTER_WINDOWS])
    if name == "crop":
        specs = []
        for frac in CROP_FRACTIONS:
            cw = int(round(width * math.sqrt(frac)))
            ch = int(round(height * math.sqrt(frac)))
            specs.append(AttackSpec("crop", {"x": (width - cw) // 2, "y": (height - ch) // 2,
                                             "w": cw, "h": ch, "fill": 0}))
        return specs
    if name == "all":
        return [s for n in SUITES[1:-1] for s in suite(n, width, height)]
    raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")


SUITES = ("none", "jpeg", "noise", "rotation", "scaling", "filtering", "crop", "all")


@dataclass
class BenchRow:
    image: str
    method: str
    attack: AttackSpec
    run: int
    ber_percent: float = math.nan
    psnr_db: float = math.nan
    corr_coeff: float = math.nan
    wall_ms: int = 0
    error: str = ""

    def as_csv(self):
        failed = bool(self.error)
        return [self.image, self.method, self.attack.kind, self.attack.render(), self.run,
                "" if failed else repr(self.ber_percent),
                "" if failed else format_psnr(self.psnr_db),
                "" if failed else repr(self.corr_coeff),
                self.wall_ms, self.error]


def _with_run_seed(spec, noise_seed):
    if spec.kind == "awgn":
        return replace(spec, params={**spec.params, "noise_seed": noise_seed})
    return spec


def run_cell_group(name, host, key, attacks, runs=5, timing=False):
    """All rows for one (image, key): ``attacks`` x ``runs``, attack-major order."""
    host = np.asarray(host, dtype=np.float64)
    rows = {}
    try:
        h, w = host.shape
        cap = engine.capacity(key, w, h)
    except ValueError as exc:
        return [BenchRow(name, key.method, spec, r, error=str(exc))
                for spec in attacks for r in range(runs)]
    for r in range(runs):
        seed = (key.seed + r) % 2**64
        bits = engine.generate_watermark(seed, cap)
        marked = requantize(engine.embed(host, bits, key))
        for i, spec in enumerate(attacks):
            spec = _with_run_seed(spec, seed)
            row = BenchRow(name, key.method, spec, r)
            start = time.perf_counter()
            try:
                received = spec.apply(marked)
                found = engine.detect(host, received, key).bits
                row.ber_percent = ber(bits, found)
                row.corr_coeff = corr_coeff(bits, found)
                row.psnr_db = psnr(quantize_to_8bit(host), quantize_to_8bit(received))
            except ValueError as exc:
                row.error = str(exc)
            if timing:
                row.wall_ms = int(round((time.perf_counter() - start) * 1000))
            rows[i, r] = row
    return [rows[i, r] for i in range(len(attacks)) for r in range(runs)]


def _group_task(args):
    return run_cell_group(*args)


def run_bench(images, keys, suite_name, runs=5, timing=False, workers=1):
    """``images`` is a list of ``(name, array)``; rows come out in grid order.

    Grid order is image, then key, then attack, then run, regardless of
    ``workers``.
    """
    tasks = []
    for name, host in images:
        h, w = np.shape(host)
        attacks = suite(suite_name, w, h)
        for key in keys:
            tasks.append((name, host, key, attacks, runs, timing))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            groups = list(pool.map(_group_task, tasks))
    else:
        groups = [_group_task(t) for t in tasks]
    return [row for group in groups for row in group]


def rows_to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow(row.as_csv())
    return buf.getvalue()


def _mean(values):
    values = list(values)
    if any(math.isinf(v) for v in values):
        return math.inf
    return sum(values) / len(values)


def summarize(rows):
    """Per (image, method, metric) row with one column per attack: the run mean.

    Cells whose runs include an error are left empty.
    """
    labels, cells, order = [], {}, []
    for row in rows:
        label = f"{row.attack.kind}:{row.attack.render()}" if row.attack.params else row.attack.kind
        if row.attack.kind == "awgn":
            label = f"awgn:sigma={row.attack.params['sigma']}"
        if label not in labels:
            labels.append(label)
        group = (row.image, row.method)
        if group not in order:
            order.append(group)
        cells.setdefault((group, label), []).append(row)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["image", "method", "metric"] + labels)
    for group in order:
        for metric in ("ber_percent", "corr_coeff", "psnr_db"):
            out = list(group) + [metric]
            for label in labels:
                members = cells.get((group, label), [])
                if not members or any(m.error for m in members):
                    out.append("")
                    continue
                value = _mean(getattr(m, metric) for m in members)
                out.append(format_psnr(value) if metric == "psnr_db" else repr(value))
            writer.writerow(out)
    return buf.getvalue()
