"""Key file: b"DRPEKEY1", seed u64, rows u32, cols u32, alpha f64, beta f64 (little endian, radians).

The mask is never stored; loading a key regenerates it from the seed.
"""
from __future__ import annotations
import struct

from ...errors import ParseError
from ..frft.core import Angle
from .drpe import DrpeKey, generate_key

MAGIC = b"DRPEKEY1"
LAYOUT = struct.Struct("<8sQIIdd")
MAX_CELLS = 4096 * 4096


def save_key(key: DrpeKey) -> bytes:
    return LAYOUT.pack(MAGIC, key.seed, key.rows, key.cols, key.alpha.radians, key.beta.radians)


def load_key(data: bytes) -> DrpeKey:
    if len(data) != LAYOUT.size:
        raise ParseError(f"key file must be {LAYOUT.size} bytes, have {len(data)}", min(len(data), LAYOUT.size))
    magic, seed, rows, cols, alpha, beta = LAYOUT.unpack(data)
    if magic != MAGIC:
        raise ParseError(f"bad key magic {magic!r}", 0)
    if rows * cols > MAX_CELLS:
        raise ParseError(f"key dimensions {rows}x{cols} exceed {MAX_CELLS} cells", 16)
    try:
        return generate_key(seed, rows, cols, Angle(alpha), Angle(beta))
    except ValueError as e:
        raise ParseError(f"invalid key fields: {e}", 8) from e
