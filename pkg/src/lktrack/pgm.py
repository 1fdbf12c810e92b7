"""Binary 8-bit PGM (P5) frames."""
from __future__ import annotations

import os

import numpy as np

from .errors import ParseError


def _tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments."""
    out = []
    i = 0
    n = len(buf)
    while len(out) < count:
        while i < n and buf[i:i + 1].isspace():
            i += 1
        if i < n and buf[i:i + 1] == b"#":
            while i < n and buf[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < n and not buf[i:i + 1].isspace() and buf[i:i + 1] != b"#":
            i += 1
        if start == i:
            raise ParseError("truncated PGM header")
        out.append(buf[start:i])
    # exactly one whitespace byte separates the header from the raster
    return out, i + 1


def read_pgm(path) -> np.ndarray:
    """Read a P5 file and return intensities scaled to [0, 1]."""
    with open(path, "rb") as fh:
        buf = fh.read()
    try:
        toks, offset = _tokens(buf, 4)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if toks[0] != b"P5":
        raise ParseError(f"{path}: not a binary PGM (magic {toks[0]!r})")
    try:
        width, height, maxval = (int(t) for t in toks[1:])
    except ValueError:
        raise ParseError(f"{path}: malformed PGM header") from None
    if width <= 0 or height <= 0 or not 0 < maxval < 256:
        raise ParseError(f"{path}: unsupported PGM geometry {width}x{height} maxval {maxval}")
    raw = buf[offset:offset + width * height]
    if len(raw) != width * height:
        raise ParseError(f"{path}: expected {width * height} pixel bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype=np.uint8).reshape(height, width)
    return data.astype(np.float64) / float(maxval)


def to_bytes(img: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(np.asarray(img, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)


def write_pgm(path, img: np.ndarray) -> None:
    data = to_bytes(img)
    if data.ndim != 2:
        raise ValueError("PGM frames must be 2-D")
    height, width = data.shape
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (width, height))
        fh.write(data.tobytes())
    os.replace(tmp, path)
