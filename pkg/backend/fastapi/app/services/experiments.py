"""Shift-theorem and encryption experiments shared by the CLI and the HTTP service."""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..types import AttackMetrics, ShiftTheoremReport, StageMetrics
from .crypto.drpe import (DrpeKey, encrypt, encrypt_attacked, quality_metrics, recover_invariant,
                          recover_naive)
from .frft.core import Angle, as_angle
from .frft.shifts import (FrequencyShift, SpatialShift, amplitude_only_magnitude, apply_frequency_shift,
                          phase_only_magnitude, verify_amplitude_variance, verify_phase_invariance,
                          verify_spatial_shift_theorem)
from .imageio.panel import panel_legend, render_panel
from .imageio.pgm import GrayImage

logger = logging.getLogger(__name__)

Tile = Tuple[str, NDArray[np.float64]]


@dataclass
class ShiftDemoResult:
    tiles: List[Tile]
    columns: int
    reports: List[ShiftTheoremReport] = field(default_factory=list)

    @property
    def panel(self) -> GrayImage:
        return render_panel(self.tiles, columns=self.columns)

    @property
    def legend(self) -> List[str]:
        return panel_legend(self.tiles, columns=self.columns)


def run_shift_demo(image: ArrayLike, alpha: "Angle | float", beta: "Angle | float", deltas: Sequence[float],
                   epsilon: float = 0.0, image_id: str = "image",
                   spatial: Optional[SpatialShift] = None) -> ShiftDemoResult:
    """Amplitude-only and phase-only reconstructions with and without each frequency shift.

    Grid columns are: unshifted, then one per delta. Rows are: input (real part),
    |amplitude-only reconstruction|, |phase-only reconstruction|.
    A non-zero `spatial` shift adds one spatial-shift theorem report.
    """
    alpha, beta = as_angle(alpha), as_angle(beta)
    plain = np.asarray(image, dtype=np.float64)
    inputs: List[Tile] = [("original", plain)]
    amps: List[Tile] = [("amplitude-only", amplitude_only_magnitude(plain, alpha, beta))]
    phases: List[Tile] = [("phase-only", phase_only_magnitude(plain, alpha, beta))]
    reports: List[ShiftTheoremReport] = []

    for d in deltas:
        shift = FrequencyShift(delta=d, epsilon=epsilon)
        shifted = apply_frequency_shift(plain, shift)
        tag = f"delta={d:g} epsilon={epsilon:g}"
        inputs.append((f"shifted input (real) {tag}", shifted.real))
        amps.append((f"amplitude-only {tag}", amplitude_only_magnitude(shifted, alpha, beta)))
        phases.append((f"phase-only {tag}", phase_only_magnitude(shifted, alpha, beta)))
        for verify in (verify_phase_invariance, verify_amplitude_variance):
            report = verify(plain, alpha, beta, shift, image_id=image_id)
            reports.append(report.model_copy(update={"label": tag}))
        logger.info("shift demo %s: phase err=%.3e amplitude err=%.3e", tag,
                    reports[-2].relative_l2_error, reports[-1].relative_l2_error)

    if spatial is not None and not spatial.is_zero:
        reports.append(verify_spatial_shift_theorem(plain, alpha, beta, spatial, image_id=image_id).model_copy(
            update={"label": f"rho={spatial.rho} lambda={spatial.lambda_}"}))

    return ShiftDemoResult(tiles=inputs + amps + phases, columns=len(inputs), reports=reports)


@dataclass
class AttackDemoResult:
    tiles: List[Tile]
    metrics: AttackMetrics
    columns: int = 3

    @property
    def panel(self) -> GrayImage:
        return render_panel(self.tiles, columns=self.columns)

    @property
    def legend(self) -> List[str]:
        return panel_legend(self.tiles, columns=self.columns)


def _stage(name: str, reference: NDArray[np.float64], candidate: NDArray[np.float64]) -> StageMetrics:
    q = quality_metrics(reference, candidate)
    return StageMetrics(stage=name, correlation=q.correlation, relative_l2=q.relative_l2, psnr=q.psnr)


def run_attack_demo(image: ArrayLike, key: DrpeKey, shift: FrequencyShift,
                    spatial: Optional[SpatialShift] = None) -> AttackDemoResult:
    """Six panels: plain, |cipher|, clean recovery, |attacked cipher|, naive and invariant recovery.

    A `spatial` translation in the attack path survives recovery, so it lowers
    the invariant-recovery correlation against the untranslated plaintext.
    """
    plain = np.asarray(image, dtype=np.float64)
    cipher = encrypt(plain, key)
    attacked = encrypt_attacked(plain, key, shift, spatial)
    clean = recover_naive(cipher, key)
    clean_invariant = recover_invariant(cipher, key)
    naive = recover_naive(attacked, key)
    invariant = recover_invariant(attacked, key)

    metrics = AttackMetrics(
        alpha_deg=key.alpha.degrees, beta_deg=key.beta.degrees, delta=shift.delta, epsilon=shift.epsilon,
        key_fingerprint=key.fingerprint.hex(),
        stages=[
            _stage("clean_recovery", plain, clean),
            _stage("naive_recovery_attacked", plain, naive),
            _stage("invariant_recovery_attacked", plain, invariant),
            _stage("invariant_attacked_vs_clean", clean_invariant, invariant),
        ],
    )
    logger.info("attack demo: naive corr=%.4f invariant corr=%.4f",
                metrics.stage("naive_recovery_attacked").correlation,
                metrics.stage("invariant_recovery_attacked").correlation)
    tiles: List[Tile] = [
        ("plaintext", plain),
        ("|cipher|", np.abs(cipher.data)),
        ("clean recovery", clean),
        ("|attacked cipher|", np.abs(attacked.data)),
        ("naive recovery (attacked)", naive),
        ("invariant recovery (attacked)", invariant),
    ]
    return AttackDemoResult(tiles=tiles, metrics=metrics)

