from __future__ import annotations
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ...errors import DimensionMismatchError, InvalidDataError
from .core import Angle, ComplexImage, ensure_complex_image, ifrft2d

# phase is forced to 0 where amplitude < ZERO_AMPLITUDE_RATIO * max(amplitude)
ZERO_AMPLITUDE_RATIO = 1e-12


@dataclass(frozen=True)
class PolarParts:
    amplitude: NDArray[np.float64] = field(repr=False)
    phase: NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        if self.amplitude.shape != self.phase.shape or self.amplitude.ndim != 2:
            raise DimensionMismatchError(
                f"amplitude {self.amplitude.shape} and phase {self.phase.shape} must be equal 2D shapes")
        if np.any(self.amplitude < 0):
            raise InvalidDataError("amplitude must be non-negative")
        if np.any(self.phase < -math.pi) or np.any(self.phase >= math.pi):
            raise InvalidDataError("phase must lie in [-pi, pi)")

    @property
    def shape(self):
        return self.amplitude.shape

    def recompose(self) -> ComplexImage:
        return self.amplitude * np.exp(1j * self.phase)


def polar_decompose(spectrum: ArrayLike) -> PolarParts:
    s = ensure_complex_image(spectrum)
    amplitude = np.abs(s)
    phase = np.angle(s)
    phase[phase >= math.pi] = -math.pi  # half-open [-pi, pi)
    peak = float(amplitude.max())
    phase[amplitude < ZERO_AMPLITUDE_RATIO * peak] = 0.0
    if peak == 0.0:
        phase[:] = 0.0
    return PolarParts(amplitude=amplitude, phase=phase)


def reconstruct_from_amplitude(parts: PolarParts, alpha: "Angle | float", beta: "Angle | float") -> ComplexImage:
    """f_A: inverse transform of the amplitude alone."""
    return ifrft2d(parts.amplitude.astype(np.complex128), alpha, beta)


def reconstruct_from_phase(parts: PolarParts, alpha: "Angle | float", beta: "Angle | float") -> ComplexImage:
    """f_phi: inverse transform of the unit-modulus factor exp(i*phase)."""
    return ifrft2d(np.exp(1j * parts.phase), alpha, beta)


def magnitude(image: ArrayLike) -> NDArray[np.float64]:
    return np.abs(np.asarray(image))
