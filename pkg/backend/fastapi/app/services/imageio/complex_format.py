"""FRFT2D binary container for complex images.

Layout: magic b"FRFT2D\\0\\0" (8 bytes), rows and cols as u32 little endian,
then rows*cols interleaved (re, im) float64 little endian samples, row-major.
Cipher files append the 32-byte key fingerprint after the samples.
"""
from __future__ import annotations
import struct
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike

from ...errors import ParseError
from ..frft.core import ComplexImage, ensure_complex_image

MAGIC = b"FRFT2D\x00\x00"
HEADER = struct.Struct("<8sII")
FINGERPRINT_SIZE = 32
_SAMPLE = np.dtype("<c16")


def save_complex(image: ArrayLike) -> bytes:
    data = ensure_complex_image(image)
    rows, cols = data.shape
    return HEADER.pack(MAGIC, rows, cols) + data.astype(_SAMPLE).tobytes()


def _read(data: bytes, trailer: int) -> Tuple[ComplexImage, bytes]:
    if len(data) < HEADER.size:
        raise ParseError(f"need a {HEADER.size}-byte header, have {len(data)} bytes", len(data))
    magic, rows, cols = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ParseError(f"bad magic {magic!r}", 0)
    if rows < 1 or cols < 1:
        raise ParseError(f"invalid dimensions {rows}x{cols}", 8)
    need = HEADER.size + rows * cols * _SAMPLE.itemsize + trailer
    if len(data) != need:
        raise ParseError(f"payload length mismatch: {rows}x{cols} needs {need} bytes, have {len(data)}",
                         min(len(data), need))
    end = need - trailer
    samples = np.frombuffer(data, dtype=_SAMPLE, count=rows * cols, offset=HEADER.size)
    return samples.astype(np.complex128).reshape(rows, cols), data[end:]


def load_complex(data: bytes) -> ComplexImage:
    image, _ = _read(data, 0)
    return image


def save_cipher(image: ArrayLike, fingerprint: bytes) -> bytes:
    if len(fingerprint) != FINGERPRINT_SIZE:
        raise ValueError(f"fingerprint must be {FINGERPRINT_SIZE} bytes")
    return save_complex(image) + fingerprint


def load_cipher(data: bytes) -> Tuple[ComplexImage, bytes]:
    return _read(data, FINGERPRINT_SIZE)
