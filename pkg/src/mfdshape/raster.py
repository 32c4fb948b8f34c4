"""Binary rasters and Netpbm (PBM) input/output.

Foreground convention: a PBM ``1`` (black) pixel is a shape pixel.
Arrays are indexed ``[row, col]``; coordinates written as ``(x, y)`` mean
``(col, row)``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, PreconditionError

_WHITESPACE = frozenset(b" \t\n\r\v\f")
_HASH = ord("#")


@dataclass(frozen=True, eq=False)
class BinaryShape:
    """Immutable 2-D boolean raster; ``True`` marks shape pixels."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pixels, dtype=bool, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise PreconditionError(f"shape must be a non-empty 2-D grid, got {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def foreground_count(self) -> int:
        return int(np.count_nonzero(self.pixels))

    def __eq__(self, other):
        if not isinstance(other, BinaryShape):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

    __hash__ = None

    def __repr__(self):
        return f"BinaryShape({self.width}x{self.height}, foreground={self.foreground_count})"


def require_foreground(shape: BinaryShape) -> None:
    if not shape.pixels.any():
        raise PreconditionError("no foreground")


def pad(shape: BinaryShape, margin: int) -> BinaryShape:
    """Surround ``shape`` with ``margin`` background pixels on every side."""
    margin = int(margin)
    if margin < 0:
        raise PreconditionError(f"margin must be >= 0, got {margin}")
    if margin == 0:
        return shape
    return BinaryShape(np.pad(shape.pixels, margin, mode="constant", constant_values=False))


# --- PBM -----------------------------------------------------------------


class _HeaderReader:
    def __init__(self, data: bytes, path):
        self.data = data
        self.pos = 0
        self.path = path

    def _skip_space_and_comments(self):
        data = self.data
        while self.pos < len(data):
            c = data[self.pos]
            if c in _WHITESPACE:
                self.pos += 1
            elif c == _HASH:
                end = data.find(b"\n", self.pos)
                self.pos = len(data) if end < 0 else end + 1
            else:
                break

    def token(self) -> tuple[bytes, int]:
        self._skip_space_and_comments()
        start = self.pos
        data = self.data
        while self.pos < len(data) and data[self.pos] not in _WHITESPACE and data[self.pos] != _HASH:
            self.pos += 1
        if start == self.pos:
            raise ParseError("unexpected end of header", start, self.path)
        return data[start:self.pos], start

    def dimension(self, name: str) -> int:
        tok, at = self.token()
        if not tok.isdigit():
            raise ParseError(f"invalid {name} {tok!r}", at, self.path)
        value = int(tok)
        if value < 1:
            raise ParseError(f"zero {name}", at, self.path)
        return value


def parse_pbm(data: bytes, path=None) -> BinaryShape:
    """Decode P1 (ASCII) or P4 (binary) PBM bytes."""
    if len(data) < 2:
        raise ParseError("file too short for a PBM magic number", 0, path)
    magic = data[:2]
    if magic not in (b"P1", b"P4"):
        raise ParseError(f"unsupported magic number {magic!r}", 0, path)
    reader = _HeaderReader(data, path)
    reader.pos = 2
    if len(data) > 2 and data[2] not in _WHITESPACE and data[2] != _HASH:
        raise ParseError("missing whitespace after magic number", 2, path)
    width = reader.dimension("width")
    height = reader.dimension("height")

    if magic == b"P4":
        # exactly one whitespace byte separates the header from the raster
        if reader.pos >= len(data) or data[reader.pos] not in _WHITESPACE:
            raise ParseError("missing whitespace before raster", reader.pos, path)
        start = reader.pos + 1
        row_bytes = (width + 7) // 8
        need = row_bytes * height
        if len(data) - start < need:
            raise ParseError(f"truncated raster: need {need} bytes, found {len(data) - start}", len(data), path)
        packed = np.frombuffer(data, dtype=np.uint8, count=need, offset=start).reshape(height, row_bytes)
        pixels = np.unpackbits(packed, axis=1, count=width).astype(bool)
        return BinaryShape(pixels)

    values = np.empty(width * height, dtype=bool)
    i = 0
    pos = reader.pos
    n = len(data)
    while i < values.size:
        while pos < n and (data[pos] in _WHITESPACE or data[pos] == _HASH):
            if data[pos] == _HASH:
                end = data.find(b"\n", pos)
                pos = n if end < 0 else end + 1
            else:
                pos += 1
        if pos >= n:
            raise ParseError(f"truncated raster: got {i} of {values.size} pixels", pos, path)
        c = data[pos]
        if c == ord("1"):
            values[i] = True
        elif c == ord("0"):
            values[i] = False
        else:
            raise ParseError(f"invalid pixel value {bytes([c])!r}", pos, path)
        i += 1
        pos += 1
    return BinaryShape(values.reshape(height, width))


def load_pbm(path) -> BinaryShape:
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_pbm(data, path)


def encode_pbm(shape: BinaryShape) -> bytes:
    header = f"P4\n{shape.width} {shape.height}\n".encode("ascii")
    return header + np.packbits(shape.pixels, axis=1).tobytes()


def save_pbm(shape: BinaryShape, path) -> None:
    """Write ``shape`` as a P4 file, rows zero-padded to whole bytes."""
    data = encode_pbm(shape)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write PBM: {exc.strerror}", os.fspath(path)) from exc
