from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from ...errors import InvalidDimensionError


def synthetic_image(size: int = 128, seed: int = 0) -> NDArray[np.float64]:
    """Deterministic test image in [0, 1]: smooth gradient, soft blobs and a faint texture."""
    if size < 2:
        raise InvalidDimensionError(f"synthetic image size must be >= 2, got {size}")
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size] / size
    img = 0.3 * x + 0.15 * y

    for _ in range(7):
        cx, cy = rng.uniform(0.15, 0.85, size=2)
        width = rng.uniform(0.04, 0.15)
        amp = rng.uniform(-0.35, 0.35)
        img += amp * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * width ** 2))

    for _ in range(3):
        fx, fy = rng.uniform(-12, 12, size=2)
        img += 0.04 * np.sin(2 * np.pi * (fx * x + fy * y) + rng.uniform(0, 2 * np.pi))
    img += 0.015 * rng.standard_normal((size, size))

    lo, hi = img.min(), img.max()
    return (img - lo) / (hi - lo)
