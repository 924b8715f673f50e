"""``blockmark`` command line: gen-key, embed, attack, detect, bench.

Exit codes: 0 success, 1 usage error, 2 data or format error, 3 internal
invariant failure.
"""
import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, engine, formats
from .attacks import KINDS, AttackError, AttackSpec
from .engine import InvalidKey, WatermarkKey
from .imaging import quantize_to_8bit
from .metrics import ber, corr_coeff, format_psnr, psnr
from .pgm import load_pgm, save_pgm
from .synth import textured_image

EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _say(args, *parts):
    if not args.quiet:
        print(*parts)


def _writable(path, force):
    if os.path.exists(path) and not force:
        raise DataError(f"{path} exists; pass --force to overwrite")
    return path


def cmd_gen_key(args):
    base = engine.default_key(args.method)
    fields = {
        "method": args.method,
        "alpha": base.alpha if args.alpha is None else args.alpha,
        "block_size": base.block_size if args.block_size is None else args.block_size,
        "levels": args.levels,
        "num_blocks": base.num_blocks if args.num_blocks is None else args.num_blocks,
        "seed": args.seed,
        "epsilon": args.epsilon,
    }
    if fields["levels"] is None:
        fields["levels"] = int(fields["block_size"]).bit_length() - 1
    try:
        key = WatermarkKey(**fields)
    except InvalidKey as exc:
        raise UsageError(str(exc)) from None
    if args.geometry:
        w, h = _parse_geometry(args.geometry)
        try:
            cap = engine.capacity(key, w, h)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        _say(args, f"capacity {cap} bits for a {w}x{h} image")
    formats.save_key(key, _writable(args.output, args.force))
    _say(args, f"wrote {args.output}")


def _parse_geometry(text):
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"geometry must look like 512x512, got {text!r}") from None
    return w, h


def cmd_embed(args):
    key = formats.load_key(args.key)
    host = load_pgm(args.input).astype(np.float64)
    h, w = host.shape
    cap = engine.capacity(key, w, h)
    if args.bits:
        bits = formats.load_bits(args.bits)
        if len(bits) != cap:
            raise DataError(f"payload has {len(bits)} bits but capacity is {cap}")
    else:
        bits = engine.generate_watermark(key.seed, cap)
    out = quantize_to_8bit(engine.embed(host, bits, key))
    sidecar = args.bits_out or f"{args.output}.bits"
    _writable(args.output, args.force)
    if not args.bits:
        _writable(sidecar, args.force)
    save_pgm(out, args.output)
    if not args.bits:
        formats.save_bits(bits, sidecar)
    _say(args, f"embedded {cap} bits ({key.method}); PSNR {format_psnr(psnr(host, out))} dB")
    if not args.bits:
        _say(args, f"payload written to {sidecar}")


def _attack_spec(args):
    kind = args.type
    need = {"jpeg": ["quality"], "awgn": ["sigma"], "mean": ["window"], "median": ["window"],
            "rotate": ["angle"], "scale": ["factor"], "crop": ["rect"]}
    for name in need.get(kind, []):
        if getattr(args, name) is None:
            raise UsageError(f"--type {kind} requires --{name.replace('_', '-')}")
    if kind == "jpeg":
        if not 1 <= args.quality <= 100:
            raise UsageError(f"quality must be in 1..100, got {args.quality}")
        return AttackSpec("jpeg", {"quality": args.quality})
    if kind == "awgn":
        if args.sigma < 0:
            raise UsageError(f"sigma must be >= 0, got {args.sigma}")
        return AttackSpec("awgn", {"sigma": args.sigma, "noise_seed": args.noise_seed})
    if kind in ("mean", "median"):
        if args.window < 3 or args.window % 2 == 0:
            raise UsageError(f"window must be odd and >= 3, got {args.window}")
        return AttackSpec(kind, {"window": args.window})
    if kind == "rotate":
        return AttackSpec("rotate", {"angle": args.angle})
    if kind == "scale":
        if not 0 < args.factor <= 1:
            raise UsageError(f"scale factor must be in (0, 1], got {args.factor}")
        return AttackSpec("scale", {"factor": args.factor})
    if kind == "crop":
        try:
            x, y, cw, ch = (int(v) for v in args.rect.split(","))
        except ValueError:
            raise UsageError(f"--rect must be x,y,w,h, got {args.rect!r}") from None
        if not 0 <= args.fill <= 255:
            raise UsageError(f"fill must be in 0..255, got {args.fill}")
        return AttackSpec("crop", {"x": x, "y": y, "w": cw, "h": ch, "fill": args.fill})
    return AttackSpec("none")


def cmd_attack(args):
    spec = _attack_spec(args)
    img = load_pgm(args.input)
    try:
        out = spec.apply(img)
    except AttackError as exc:
        raise UsageError(str(exc)) from None
    save_pgm(quantize_to_8bit(out), _writable(args.output, args.force))
    _say(args, json.dumps({"type": spec.kind, **spec.params}, sort_keys=True))


def cmd_detect(args):
    key = formats.load_key(args.key)
    original = load_pgm(args.original)
    received = load_pgm(args.received)
    if original.shape != received.shape:
        raise DataError(f"received image is {received.shape[1]}x{received.shape[0]} but the "
                        f"original is {original.shape[1]}x{original.shape[0]}")
    report = engine.detect(original, received, key)
    extra = {}
    if args.expected:
        expected = formats.load_bits(args.expected)
        if len(expected) != len(report.bits):
            raise DataError(f"expected payload has {len(expected)} bits, "
                            f"detector recovered {len(report.bits)}")
        extra = {"expected": expected, "ber": ber(expected, report.bits),
                 "corr": corr_coeff(expected, report.bits)}
    doc = formats.report_to_dict(report, psnr=psnr(original, received), **extra)
    with open(_writable(args.report, args.force), "w") as fh:
        fh.write(formats.dump_report(doc))
    msg = f"recovered {len(report.bits)} bits"
    if extra:
        msg += f"; BER {extra['ber']:.4f}%  CC {extra['corr']:.4f}"
    _say(args, msg)


def _bench_images(args):
    images = []
    if args.images:
        paths = sorted(Path(args.images).glob("*.pgm"))
        if not paths:
            raise DataError(f"no .pgm images found in {args.images}")
        for p in paths:
            images.append((p.stem, load_pgm(p).astype(np.float64)))
    for i in range(args.synthetic):
        images.append((f"synthetic{i:02d}", textured_image(args.synthetic_seed + i)))
    if not images:
        raise UsageError("pass --images DIR and/or --synthetic COUNT")
    return images


def cmd_bench(args):
    keys = ([formats.load_key(p) for p in args.key] if args.key
            else [engine.default_key("M1", args.seed), engine.default_key("M2", args.seed)])
    images = _bench_images(args)
    rows = bench.run_bench(images, keys, args.suite, runs=args.runs,
                           timing=args.timing, workers=args.workers)
    summary_path = args.summary or str(Path(args.output).with_suffix("")) + "_summary.csv"
    _writable(args.output, args.force)
    _writable(summary_path, args.force)
    with open(args.output, "w", newline="") as fh:
        fh.write(bench.rows_to_csv(rows))
    with open(summary_path, "w", newline="") as fh:
        fh.write(bench.summarize(rows))
    failed = sum(1 for r in rows if r.error)
    _say(args, f"{len(rows)} rows -> {args.output}; summary -> {summary_path}"
         + (f"; {failed} failed" if failed else ""))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--force", action="store_true", help="overwrite existing outputs")
    common.add_argument("--quiet", action="store_true", help="suppress informational output")

    p = _Parser(prog="blockmark", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-key", parents=[common], help="write a watermark key file")
    g.add_argument("--method", choices=engine.METHODS, default="M1")
    g.add_argument("--alpha", type=float)
    g.add_argument("--block-size", type=int)
    g.add_argument("--levels", type=int, help="default: log2(block size)")
    g.add_argument("--num-blocks", type=int, help="embedding blocks for M2")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--epsilon", type=float, default=1e-6)
    g.add_argument("--geometry", help="WxH; print the capacity for this image size")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen_key)

    e = sub.add_parser("embed", parents=[common], help="watermark a PGM image")
    e.add_argument("--key", required=True)
    e.add_argument("--input", required=True)
    e.add_argument("--output", required=True)
    e.add_argument("--bits", help="payload file; default is generated from the key seed")
    e.add_argument("--bits-out", help="sidecar path for a generated payload (default OUTPUT.bits)")
    e.set_defaults(func=cmd_embed)

    a = sub.add_parser("attack", parents=[common], help="apply one attack to a PGM image")
    a.add_argument("--type", required=True, choices=KINDS)
    a.add_argument("--quality", type=int)
    a.add_argument("--sigma", type=float)
    a.add_argument("--noise-seed", type=int, default=0)
    a.add_argument("--window", type=int)
    a.add_argument("--angle", type=float)
    a.add_argument("--factor", type=float)
    a.add_argument("--rect", help="x,y,w,h")
    a.add_argument("--fill", type=int, default=0)
    a.add_argument("--input", required=True)
    a.add_argument("--output", required=True)
    a.set_defaults(func=cmd_attack)

    d = sub.add_parser("detect", parents=[common], help="recover the payload (non-blind)")
    d.add_argument("--key", required=True)
    d.add_argument("--original", required=True)
    d.add_argument("--received", required=True)
    d.add_argument("--expected", help="payload file to score against")
    d.add_argument("--report", required=True)
    d.set_defaults(func=cmd_detect)

    b = sub.add_parser("bench", parents=[common], help="run an attack grid and write CSVs")
    b.add_argument("--key", action="append", help="key file (repeatable); default M1 and M2")
    b.add_argument("--seed", type=int, default=0, help="seed for the default keys")
    b.add_argument("--images", help="directory of 8-bit PGM images")
    b.add_argument("--synthetic", type=int, default=0, help="add COUNT synthetic images")
    b.add_argument("--synthetic-seed", type=int, default=0)
    b.add_argument("--suite", choices=bench.SUITES, default="all")
    b.add_argument("--runs", type=int, default=5)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--timing", action="store_true", help="record wall_ms (breaks byte-identity)")
    b.add_argument("--output", required=True)
    b.add_argument("--summary", help="summary CSV path (default OUTPUT_summary.csv)")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"blockmark {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError, OSError) as exc:
        print(f"blockmark {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"blockmark {args.command}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
