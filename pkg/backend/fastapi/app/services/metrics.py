from __future__ import annotations
import math

import numpy as np
from numpy.typing import ArrayLike

from ..errors import DimensionMismatchError, InvalidDataError, UndefinedCorrelationError


def _pair(reference: ArrayLike, candidate: ArrayLike):
    r = np.asarray(reference, dtype=np.float64)
    c = np.asarray(candidate, dtype=np.float64)
    if r.shape != c.shape:
        raise DimensionMismatchError(f"shape mismatch: {r.shape} vs {c.shape}")
    return r.ravel(), c.ravel()


def correlation(reference: ArrayLike, candidate: ArrayLike) -> float:
    """Pearson correlation; a zero-variance input is an error, not 0."""
    r, c = _pair(reference, candidate)
    dr = r - r.mean()
    dc = c - c.mean()
    srr = float(dr @ dr)
    scc = float(dc @ dc)
    if srr == 0.0 or scc == 0.0:
        raise UndefinedCorrelationError("correlation is undefined for a constant input")
    # sqrt(a*a) == a exactly, so identical inputs give exactly 1.0
    value = float(dr @ dc) / math.sqrt(srr * scc)
    return max(-1.0, min(1.0, value))


def relative_l2(reference: ArrayLike, candidate: ArrayLike) -> float:
    r = np.asarray(reference)
    c = np.asarray(candidate)
    if r.shape != c.shape:
        raise DimensionMismatchError(f"shape mismatch: {r.shape} vs {c.shape}")
    norm = float(np.linalg.norm(r))
    if norm == 0.0:
        raise InvalidDataError("relative error is undefined for a zero reference")
    return float(np.linalg.norm(c - r)) / norm


def psnr(reference: ArrayLike, candidate: ArrayLike) -> float:
    """PSNR in dB with peak = max(reference); math.inf for identical inputs."""
    r, c = _pair(reference, candidate)
    mse = float(np.mean((c - r) ** 2))
    if mse == 0.0:
        return math.inf
    peak = float(r.max())
    if peak <= 0.0:
        raise InvalidDataError("PSNR needs a positive reference peak")
    return 10.0 * math.log10(peak * peak / mse)
