from __future__ import annotations
import logging
import math
from typing import Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ...errors import InvalidAngleError, UndefinedCorrelationError
from ...types import PredictedShifts, ShiftSettings, ShiftTheoremReport
from ..metrics import correlation, relative_l2
from .core import Angle, ComplexImage, as_angle, ensure_complex_image, frft2d
from .polar import magnitude, polar_decompose, reconstruct_from_amplitude, reconstruct_from_phase

logger = logging.getLogger(__name__)

# stored shifts are rounded to this many decimals so that 10.2 and 0.2 reduce to the same float
SHIFT_DECIMALS = 12


def reduce_mod1(value: float) -> float:
    if not math.isfinite(value):
        raise ValueError(f"shift must be finite, got {value!r}")
    r = round(value % 1.0, SHIFT_DECIMALS)
    return 0.0 if r >= 1.0 else r + 0.0


class FrequencyShift(BaseModel):
    """Frequency shift (delta, epsilon) in cycles per pixel, stored mod 1."""
    model_config = ConfigDict(frozen=True)

    delta: float = 0.0
    epsilon: float = 0.0

    @field_validator("delta", "epsilon", mode="before")
    @classmethod
    def _mod1(cls, v: float) -> float:
        return reduce_mod1(float(v))

    @property
    def is_zero(self) -> bool:
        return self.delta == 0.0 and self.epsilon == 0.0


class SpatialShift(BaseModel):
    """Circular translation in whole pixels; reduced mod the image size when applied."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    rho: int = 0
    lambda_: int = Field(default=0, alias="lambda")

    @property
    def is_zero(self) -> bool:
        return self.rho == 0 and self.lambda_ == 0


# -------- shift operators --------

def apply_frequency_shift(image: ArrayLike, shift: FrequencyShift) -> ComplexImage:
    data = ensure_complex_image(image)
    if shift.is_zero:
        return data.copy()
    rows, cols = data.shape
    fx = np.exp(2j * np.pi * shift.delta * np.arange(rows))
    fy = np.exp(2j * np.pi * shift.epsilon * np.arange(cols))
    return data * fx[:, None] * fy[None, :]


def apply_spatial_shift(image: ArrayLike, shift: SpatialShift) -> ComplexImage:
    data = ensure_complex_image(image)
    return np.roll(data, (shift.rho, shift.lambda_), axis=(0, 1))


# -------- theorem predictions --------

def sampling_interval(size: int) -> float:
    return math.sqrt(2.0 * math.pi / size)


def predicted_shifts(alpha: "Angle | float", beta: "Angle | float", fshift: FrequencyShift,
                     sshift: Optional[SpatialShift] = None,
                     shape: Optional[Tuple[int, int]] = None) -> PredictedShifts:
    """Displacements stated by the frequency- and spatial-shift theorems.

    `shape` adds pixel conversions: continuous displacements from a frequency
    shift map to d / sqrt(2 pi / N) pixels; spatial shifts are given in pixels
    already, so their prediction rho*cos(alpha) is a pixel count as is.
    """
    a = as_angle(alpha).radians
    b = as_angle(beta).radians
    sshift = sshift or SpatialShift()
    d, e = fshift.delta, fshift.epsilon
    amplitude_uv = (2 * math.pi * d * math.sin(a), 2 * math.pi * e * math.sin(b))
    spatial_uv = (sshift.rho * math.cos(a), sshift.lambda_ * math.cos(b))
    space_xy = (math.pi * d * math.sin(2 * a), math.pi * e * math.sin(2 * b))
    if shape is None:
        return PredictedShifts(amplitude_uv=amplitude_uv, spatial_uv=spatial_uv, space_xy=space_xy)
    du, dv = sampling_interval(shape[0]), sampling_interval(shape[1])
    return PredictedShifts(
        amplitude_uv=amplitude_uv, spatial_uv=spatial_uv, space_xy=space_xy,
        amplitude_uv_px=(amplitude_uv[0] / du, amplitude_uv[1] / dv),
        spatial_uv_px=spatial_uv,
        space_xy_px=(space_xy[0] / du, space_xy[1] / dv),
    )


# -------- verification --------

def _require_generic(alpha: Angle, beta: Angle) -> None:
    if not (alpha.is_generic and beta.is_generic):
        raise InvalidAngleError(f"shift-theorem checks need generic angles, got {alpha.degrees} / {beta.degrees} deg")


def phase_only_magnitude(image: ArrayLike, alpha: "Angle | float", beta: "Angle | float") -> NDArray[np.float64]:
    return magnitude(reconstruct_from_phase(polar_decompose(frft2d(image, alpha, beta)), alpha, beta))


def amplitude_only_magnitude(image: ArrayLike, alpha: "Angle | float", beta: "Angle | float") -> NDArray[np.float64]:
    return magnitude(reconstruct_from_amplitude(polar_decompose(frft2d(image, alpha, beta)), alpha, beta))


def _settings(image_id: str, alpha: Angle, beta: Angle, fshift: Optional[FrequencyShift] = None,
              sshift: Optional[SpatialShift] = None) -> ShiftSettings:
    fshift = fshift or FrequencyShift()
    sshift = sshift or SpatialShift()
    return ShiftSettings(image_id=image_id, alpha_deg=alpha.degrees, beta_deg=beta.degrees,
                         delta=fshift.delta, epsilon=fshift.epsilon, rho=sshift.rho, lambda_=sshift.lambda_)


def verify_phase_invariance(image: ArrayLike, alpha: "Angle | float", beta: "Angle | float",
                            shift: FrequencyShift, image_id: str = "image") -> ShiftTheoremReport:
    """Compare |f_phi| with and without the frequency shift; the theorem predicts no displacement."""
    alpha, beta = as_angle(alpha), as_angle(beta)
    _require_generic(alpha, beta)
    data = ensure_complex_image(image)
    if not np.any(data):
        # all phases are 0 by convention here
        raise UndefinedCorrelationError("phase invariance is undefined for an all-zero image")
    m0 = phase_only_magnitude(data, alpha, beta)
    m1 = phase_only_magnitude(apply_frequency_shift(data, shift), alpha, beta)
    report = ShiftTheoremReport(
        pipeline="phase",
        correlation=correlation(m0, m1),
        relative_l2_error=relative_l2(m0, m1),
        settings=_settings(image_id, alpha, beta, shift),
    )
    logger.debug("phase invariance %s: corr=%.6f err=%.3e", image_id, report.correlation, report.relative_l2_error)
    return report


def verify_amplitude_variance(image: ArrayLike, alpha: "Angle | float", beta: "Angle | float",
                              shift: FrequencyShift, image_id: str = "image") -> ShiftTheoremReport:
    alpha, beta = as_angle(alpha), as_angle(beta)
    _require_generic(alpha, beta)
    data = ensure_complex_image(image)
    m0 = amplitude_only_magnitude(data, alpha, beta)
    m1 = amplitude_only_magnitude(apply_frequency_shift(data, shift), alpha, beta)
    pred = predicted_shifts(alpha, beta, shift, shape=data.shape)
    report = ShiftTheoremReport(
        pipeline="amplitude",
        correlation=correlation(m0, m1),
        relative_l2_error=relative_l2(m0, m1),
        predicted_shift_uv=pred.space_xy,
        predicted_shift_px=pred.space_xy_px,
        settings=_settings(image_id, alpha, beta, shift),
    )
    logger.debug("amplitude variance %s: corr=%.6f err=%.3e", image_id, report.correlation, report.relative_l2_error)
    return report


def verify_spatial_shift_theorem(image: ArrayLike, alpha: "Angle | float", beta: "Angle | float",
                                 shift: SpatialShift, image_id: str = "image") -> ShiftTheoremReport:
    """Align |F'| with |F| around the predicted (rho cos a, lambda cos b) translation.

    The search covers the nearest integer alignment and its 8 neighbours; the
    chosen alignment and the fractional prediction are both reported.
    """
    alpha, beta = as_angle(alpha), as_angle(beta)
    data = ensure_complex_image(image)
    m0 = magnitude(frft2d(data, alpha, beta))
    m1 = magnitude(frft2d(apply_spatial_shift(data, shift), alpha, beta))
    pred = predicted_shifts(alpha, beta, FrequencyShift(), shift, shape=data.shape)
    cu, cv = int(round(pred.spatial_uv_px[0])), int(round(pred.spatial_uv_px[1]))

    best: Optional[Tuple[float, Tuple[int, int]]] = None
    for du, dv in [(0, 0)] + [(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1) if (i, j) != (0, 0)]:
        offset = (cu + du, cv + dv)
        c = correlation(np.roll(m0, offset, axis=(0, 1)), m1)
        if best is None or c > best[0]:
            best = (c, offset)
    corr, offset = best
    aligned = np.roll(m0, offset, axis=(0, 1))
    return ShiftTheoremReport(
        pipeline="spatial",
        correlation=corr,
        relative_l2_error=relative_l2(aligned, m1),
        predicted_shift_uv=pred.spatial_uv,
        predicted_shift_px=pred.spatial_uv_px,
        alignment_px=offset,
        settings=_settings(image_id, alpha, beta, sshift=shift),
    )
