"""Key files, payload sidecars and detection reports on disk.

Key files and reports are JSON documents carrying a ``schema`` version.
Payloads are a line of ``0``/``1`` characters.
"""
import json
import math
from dataclasses import asdict, fields

import numpy as np

from .engine import InvalidKey, WatermarkKey
from .metrics import format_psnr

KEY_SCHEMA = 1
REPORT_SCHEMA = 1


class FormatError(ValueError):
    pass


def key_to_dict(key):
    return {"schema": KEY_SCHEMA, **asdict(key)}


def key_from_dict(doc):
    if not isinstance(doc, dict):
        raise FormatError("key file must hold a JSON object")
    expected = {"schema"} | {f.name for f in fields(WatermarkKey)}
    unknown = sorted(set(doc) - expected)
    missing = sorted(expected - set(doc))
    if unknown:
        raise FormatError(f"unknown key file fields: {', '.join(unknown)}")
    if missing:
        raise FormatError(f"missing key file fields: {', '.join(missing)}")
    if doc["schema"] != KEY_SCHEMA:
        raise FormatError(f"unsupported key schema {doc['schema']!r}, expected {KEY_SCHEMA}")
    checks = {"method": str, "alpha": (int, float), "block_size": int, "levels": int,
              "num_blocks": int, "seed": int, "epsilon": (int, float)}
    for name, kind in checks.items():
        value = doc[name]
        if isinstance(value, bool) or not isinstance(value, kind):
            raise FormatError(f"key field {name!r} has the wrong type: {value!r}")
    try:
        return WatermarkKey(**{k: v for k, v in doc.items() if k != "schema"})
    except InvalidKey as exc:
        raise FormatError(f"invalid key: {exc}") from None


def dump_key(key):
    return json.dumps(key_to_dict(key), indent=2) + "\n"


def save_key(key, path):
    with open(path, "w") as fh:
        fh.write(dump_key(key))


def load_key(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"key file is not valid JSON: {exc}") from None
    return key_from_dict(doc)


def bits_to_text(bits):
    return "".join("1" if b else "0" for b in np.asarray(bits).ravel()) + "\n"


def bits_from_text(text):
    s = text.strip()
    if not s or set(s) - {"0", "1"}:
        raise FormatError("payload must be a non-empty string of 0/1 characters")
    return np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0")


def save_bits(bits, path):
    with open(path, "w") as fh:
        fh.write(bits_to_text(bits))


def load_bits(path):
    with open(path) as fh:
        return bits_from_text(fh.read())


def report_to_dict(report, expected=None, ber=None, corr=None, psnr=None):
    doc = {
        "schema": REPORT_SCHEMA,
        "threshold": float(report.threshold),
        "bits": bits_to_text(report.bits).strip(),
        "blocks": [int(i) for i in report.blocks],
        "margins": [float(m) for m in report.margins],
        "undecidable": [bool(u) for u in report.undecidable],
    }
    if expected is not None:
        doc["expected_bits"] = bits_to_text(expected).strip()
        doc["ber_percent"] = float(ber)
        doc["corr_coeff"] = float(corr)
    if psnr is not None:
        doc["psnr_db"] = format_psnr(psnr) if math.isinf(psnr) else float(psnr)
    return doc


def dump_report(doc):
    return json.dumps(doc, indent=2) + "\n"
