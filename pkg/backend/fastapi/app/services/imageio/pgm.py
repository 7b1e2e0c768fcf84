"""PGM (P2 ASCII / P5 binary) reader and P5 writer for [0, 1] grayscale images."""
from __future__ import annotations
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ...errors import InvalidDataError, InvalidDimensionError, ParseError

_WHITESPACE = b" \t\n\r\x0b\x0c"
MAX_MAXVAL = 65535


@dataclass(frozen=True)
class GrayImage:
    pixels: NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        p = np.asarray(self.pixels, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise InvalidDimensionError(f"gray image must be a non-empty 2D array, got {p.shape}")
        if not np.all(np.isfinite(p)) or p.min() < 0.0 or p.max() > 1.0:
            raise InvalidDataError("gray pixels must lie in [0, 1]")
        object.__setattr__(self, "pixels", p)

    @classmethod
    def from_array(cls, values: ArrayLike, clip: bool = True) -> "GrayImage":
        v = np.asarray(values, dtype=np.float64)
        return cls(np.clip(v, 0.0, 1.0) if clip else v)

    @property
    def rows(self) -> int:
        return self.pixels.shape[0]

    @property
    def cols(self) -> int:
        return self.pixels.shape[1]


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip_space(self, allow_comments: bool = True) -> int:
        start = self.pos
        while self.pos < len(self.data):
            b = self.data[self.pos:self.pos + 1]
            if b in _WHITESPACE and b:
                self.pos += 1
            elif b == b"#" and allow_comments:
                end = self.data.find(b"\n", self.pos)
                self.pos = len(self.data) if end < 0 else end + 1
            else:
                break
        return self.pos - start

    def read_int(self, what: str) -> int:
        skipped = self.skip_space()
        if self.pos >= len(self.data):
            raise ParseError(f"unexpected end of data while reading {what}", self.pos)
        if skipped == 0:
            raise ParseError(f"expected whitespace before {what}", self.pos)
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos:self.pos + 1].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError(f"expected a decimal integer for {what}", self.pos)
        return int(self.data[start:self.pos])


def load_pgm(data: bytes) -> GrayImage:
    if len(data) < 2:
        raise ParseError("missing PGM magic", 0)
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"unsupported magic {magic!r}, expected P2 or P5", 0)
    r = _Reader(data)
    r.pos = 2
    cols = r.read_int("width")
    rows = r.read_int("height")
    maxval = r.read_int("maxval")
    if cols < 1 or rows < 1:
        raise ParseError(f"invalid dimensions {cols}x{rows}", r.pos)
    if maxval < 1 or maxval > MAX_MAXVAL:
        raise ParseError(f"maxval must be in 1..{MAX_MAXVAL}, got {maxval}", r.pos)
    count = rows * cols

    if magic == b"P5":
        if r.pos >= len(data) or data[r.pos:r.pos + 1] not in _WHITESPACE:
            raise ParseError("expected a single whitespace byte after maxval", r.pos)
        r.pos += 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        payload = data[r.pos:r.pos + need]
        if len(payload) < need:
            raise ParseError(f"truncated payload: need {need} bytes, have {len(payload)}", len(data))
        if len(data) > r.pos + need:
            raise ParseError("trailing bytes after raster", r.pos + need)
        values = np.frombuffer(payload, dtype=dtype).astype(np.int64)
        if values.max() > maxval:
            bad = int(np.argmax(values > maxval))
            raise ParseError(f"sample {values[bad]} exceeds maxval {maxval}", r.pos + bad * dtype.itemsize)
    else:
        if count > (len(data) - r.pos) // 2:
            raise ParseError(f"{cols}x{rows} raster cannot fit in the remaining {len(data) - r.pos} bytes", r.pos)
        values = np.empty(count, dtype=np.int64)
        for i in range(count):
            at = r.pos
            v = r.read_int(f"sample {i}")
            if v > maxval:
                raise ParseError(f"sample {v} exceeds maxval {maxval}", at)
            values[i] = v
        r.skip_space()
        if r.pos != len(data):
            raise ParseError("trailing data after raster", r.pos)

    return GrayImage(values.reshape(rows, cols).astype(np.float64) / maxval)


def save_pgm(image: GrayImage, maxval: int = 255) -> bytes:
    if maxval not in (255, MAX_MAXVAL):
        raise ValueError(f"maxval must be 255 or {MAX_MAXVAL}, got {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    samples = np.rint(image.pixels * maxval).astype(dtype)
    header = f"P5\n{image.cols} {image.rows}\n{maxval}\n".encode("ascii")
    return header + samples.tobytes()
