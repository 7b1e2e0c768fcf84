from .core import (Angle, AngleClass, ComplexImage, FrftPlan, build_plan, ensure_complex_image, frft1d, frft2d,
                   ifrft2d)
from .polar import PolarParts, magnitude, polar_decompose, reconstruct_from_amplitude, reconstruct_from_phase
from .shifts import (FrequencyShift, SpatialShift, apply_frequency_shift, apply_spatial_shift, predicted_shifts,
                     verify_amplitude_variance, verify_phase_invariance, verify_spatial_shift_theorem)

__all__ = [
    "Angle", "AngleClass", "ComplexImage", "FrftPlan", "build_plan", "ensure_complex_image", "frft1d", "frft2d",
    "ifrft2d", "PolarParts", "magnitude", "polar_decompose", "reconstruct_from_amplitude", "reconstruct_from_phase",
    "FrequencyShift", "SpatialShift", "apply_frequency_shift", "apply_spatial_shift", "predicted_shifts",
    "verify_amplitude_variance", "verify_phase_invariance", "verify_spatial_shift_theorem",
]
