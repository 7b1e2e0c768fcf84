from __future__ import annotations
import io
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from PIL import Image

from ...errors import DimensionMismatchError, InvalidDataError
from .pgm import GrayImage

SEPARATOR = 1.0
DEGENERATE_GRAY = 0.5


def normalize_for_display(values: ArrayLike) -> NDArray[np.float64]:
    v = np.asarray(values, dtype=np.float64)
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        return np.full(v.shape, DEGENERATE_GRAY)
    return (v - lo) / (hi - lo)


def _grid(count: int, columns: Optional[int]) -> Tuple[int, int]:
    columns = count if not columns else min(columns, count)
    return math.ceil(count / columns), columns


def render_panel(images: Sequence[Tuple[str, ArrayLike]], columns: Optional[int] = None) -> GrayImage:
    """Tile min-max normalized arrays into a grid with 1-pixel separators."""
    if not images:
        raise InvalidDataError("render_panel needs at least one image")
    tiles = [normalize_for_display(a) for _, a in images]
    h, w = tiles[0].shape
    for (label, _), t in zip(images, tiles):
        if t.shape != (h, w):
            raise DimensionMismatchError(f"panel tile {label!r} is {t.shape}, expected {(h, w)}")
    grid_rows, grid_cols = _grid(len(tiles), columns)
    out = np.full((grid_rows * (h + 1) - 1, grid_cols * (w + 1) - 1), SEPARATOR)
    for i, t in enumerate(tiles):
        r, c = divmod(i, grid_cols)
        out[r * (h + 1):r * (h + 1) + h, c * (w + 1):c * (w + 1) + w] = t
    return GrayImage(out)


def panel_legend(images: Sequence[Tuple[str, ArrayLike]], columns: Optional[int] = None) -> List[str]:
    _, grid_cols = _grid(len(images), columns)
    return [f"{i // grid_cols}\t{i % grid_cols}\t{label}" for i, (label, _) in enumerate(images)]


def to_png(image: GrayImage) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.rint(image.pixels * 255).astype(np.uint8)).save(buf, format="PNG")
    return buf.getvalue()
