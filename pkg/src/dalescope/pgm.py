"""Netpbm graymap (PGM) reading and writing, P2 and P5.

``maxval`` maps to ``levels - 1``.  P5 samples are one byte for
``maxval < 256`` and two big-endian bytes otherwise.
"""

from __future__ import annotations

import os

import numpy as np

from .grid import Grid


class PGMError(ValueError):
    pass


def _tokens(data: bytes, count: int, pos: int = 0):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    out = []
    n = len(data)
    while len(out) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise PGMError("truncated PGM header")
        if data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        out.append(data[start:pos])
    return out, pos


def decode(data: bytes) -> Grid:
    (magic, w, h, maxval), pos = _tokens(data, 4)
    if magic not in (b"P2", b"P5"):
        raise PGMError(f"not a PGM file (magic {magic!r})")
    try:
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError:
        raise PGMError("non-integer PGM header field") from None
    if width < 1 or height < 1:
        raise PGMError(f"bad PGM size {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise PGMError(f"bad PGM maxval {maxval}")
    n = width * height
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = data[pos:pos + n * dtype.itemsize]
        if len(raw) < n * dtype.itemsize:
            raise PGMError("truncated PGM raster")
        cells = np.frombuffer(raw, dtype=dtype).astype(np.int32)
    else:
        try:
            cells = np.array(data[pos:].split(), dtype=np.int64)
        except ValueError:
            raise PGMError("non-integer sample in P2 raster") from None
        if cells.size < n:
            raise PGMError("truncated PGM raster")
        cells = cells[:n].astype(np.int32)
    if cells.size and cells.max() > maxval:
        raise PGMError("sample exceeds maxval")
    return Grid(cells.reshape(height, width), levels=maxval + 1)


def encode(g: Grid, binary: bool = True) -> bytes:
    maxval = g.levels - 1
    if maxval > 65535:
        raise PGMError(f"levels {g.levels} exceed the PGM limit of 65536")
    header = f"{'P5' if binary else 'P2'}\n{g.width} {g.height}\n{maxval}\n".encode("ascii")
    if binary:
        dtype = ">u2" if maxval > 255 else "u1"
        return header + g.cells.astype(dtype).tobytes()
    lines = [" ".join(str(v) for v in row) for row in g.cells]
    return header + ("\n".join(lines) + "\n").encode("ascii")


def read_pgm(path: str | os.PathLike) -> Grid:
    with open(path, "rb") as fh:
        return decode(fh.read())


def write_pgm(path: str | os.PathLike, g: Grid, binary: bool = True) -> None:
    with open(path, "wb") as fh:
        fh.write(encode(g, binary))
