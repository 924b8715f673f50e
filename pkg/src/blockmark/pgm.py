"""Binary PGM (P5, maxval 255) reader and writer."""
import re

import numpy as np


class PGMError(ValueError):
    pass


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def parse_pgm(data):
    data = bytes(data)
    magic = data[:2]
    if magic != b"P5":
        name = magic.decode("ascii", "replace") if magic[:1] == b"P" else "non-PGM"
        raise PGMError(f"unsupported format {name}: only binary 8-bit grayscale P5 is accepted")
    pos = 2
    fields = []
    for _ in range(3):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise PGMError("truncated PGM header")
        try:
            fields.append(int(m.group(1)))
        except ValueError:
            raise PGMError(f"malformed PGM header field {m.group(1)!r}") from None
        pos = m.end()
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PGMError(f"invalid PGM dimensions {width}x{height}")
    if maxval != 255:
        raise PGMError(f"unsupported maxval {maxval}: only 255 is accepted")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise PGMError("truncated PGM header")
    pos += 1
    need = width * height
    payload = data[pos:pos + need]
    if len(payload) < need:
        raise PGMError(f"truncated PGM payload: expected {need} bytes, found {len(payload)}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()


def load_pgm(path):
    with open(path, "rb") as fh:
        return parse_pgm(fh.read())


def encode_pgm(buffer):
    arr = np.asarray(buffer)
    if arr.ndim != 2:
        raise PGMError(f"PGM holds a single channel, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if np.any(arr != np.round(arr)) or arr.min() < 0 or arr.max() > 255:
            raise PGMError("PGM samples must be integers in 0..255")
        arr = arr.astype(np.uint8)
    h, w = arr.shape
    return b"P5\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(arr).tobytes()


def save_pgm(buffer, path):
    data = encode_pgm(buffer)
    with open(path, "wb") as fh:
        fh.write(data)
