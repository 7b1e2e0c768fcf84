"""Invariant suite: one PropertyResult per checked property, grouped by module."""
from __future__ import annotations
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Callable, List, Tuple

import numpy as np
from numpy.typing import NDArray

from ...config import AppConfig, get_config
from ...errors import ParseError
from ...types import PropertyResult, VerificationReport
from ..crypto.drpe import (encrypt, encrypt_attacked, generate_key, recover_invariant, wrong_angle_correlation,
                           wrong_seed_correlations)
from ..crypto.keyfile import load_key
from ..frft.core import Angle, build_plan, frft2d, ifrft2d, parity_indices
from ..frft.polar import ZERO_AMPLITUDE_RATIO, polar_decompose
from ..frft.shifts import (FrequencyShift, SpatialShift, apply_frequency_shift, apply_spatial_shift,
                           verify_amplitude_variance, verify_phase_invariance)
from ..imageio.complex_format import load_cipher, load_complex, save_complex
from ..imageio.pgm import GrayImage, load_pgm, save_pgm
from ..imageio.synthetic import synthetic_image
from ..metrics import relative_l2

logger = logging.getLogger(__name__)

_COMPARE: dict = {
    "<": lambda m, t: m < t,
    "<=": lambda m, t: m <= t,
    ">=": lambda m, t: m >= t,
    ">": lambda m, t: m > t,
    "==": lambda m, t: m == t,
}


def _result(module: str, name: str, measured: float, threshold: float, comparison: str,
            detail: str = "") -> PropertyResult:
    measured = float(measured)
    passed = math.isfinite(measured) and bool(_COMPARE[comparison](measured, threshold))
    if not passed:
        logger.warning("property %s/%s failed: %r %s %r %s", module, name, measured, comparison, threshold, detail)
    return PropertyResult(name=name, module=module, measured=measured, threshold=threshold,
                          comparison=comparison, passed=passed, detail=detail)


def _random_complex(rng: np.random.Generator, shape) -> NDArray[np.complex128]:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def dft_matrix(size: int) -> NDArray[np.complex128]:
    n = np.arange(size)
    return np.exp(-2j * np.pi * np.outer(n, n) / size) / math.sqrt(size)


class _Operators:
    """Plan operators, optionally perturbed at entry [0, 0] to exercise the failure path."""

    def __init__(self, fault: float = 0.0):
        self.fault = fault

    def __call__(self, size: int, angle: Angle) -> NDArray[np.complex128]:
        op = build_plan(size, angle).operator
        if self.fault:
            op = op.copy()
            op[0, 0] += self.fault
        return op


# -------- frft-core --------

def check_frft(cfg: AppConfig, rng: np.random.Generator, ops: _Operators) -> List[PropertyResult]:
    th, v = cfg.thresholds, cfg.verification
    lo, hi = v.unitarity_sizes
    worst_unitary = worst_pair = 0.0
    for _ in range(v.unitarity_trials):
        size = int(rng.integers(lo, hi + 1))
        angle = Angle(float(rng.uniform(0.0, 2.0 * math.pi)))
        u = ops(size, angle)
        worst_unitary = max(worst_unitary, np.max(np.abs(u @ u.conj().T - np.eye(size))))
        worst_pair = max(worst_pair, np.max(np.abs(ops(size, -angle) - u.conj().T)))

    worst_add = 0.0
    n = v.additivity_size
    for _ in range(v.additivity_trials):
        a1, a2 = (Angle(float(x)) for x in rng.uniform(0.0, 2.0 * math.pi, size=2))
        x = _random_complex(rng, n)
        worst_add = max(worst_add, relative_l2(ops(n, a1 + a2) @ x, ops(n, a2) @ (ops(n, a1) @ x)))

    worst_dft = worst_parity = worst_identity = 0.0
    for size in v.special_sizes:
        worst_dft = max(worst_dft, np.max(np.abs(ops(size, Angle(math.pi / 2)) - dft_matrix(size))))
        parity = np.eye(size)[parity_indices(size)]
        worst_parity = max(worst_parity, np.max(np.abs(ops(size, Angle(math.pi)) - parity)))
        worst_identity = max(worst_identity, np.max(np.abs(ops(size, Angle(2 * math.pi)) - np.eye(size))))

    image = _random_complex(rng, (12, 20))
    alpha, beta = (Angle(float(x)) for x in rng.uniform(0.1, 3.0, size=2))
    by_hand = (build_plan(20, beta).operator @ (build_plan(12, alpha).operator @ image).T).T
    separability = np.max(np.abs(frft2d(image, alpha, beta) - by_hand))

    m = v.image_size
    worst_parseval = worst_inverse = 0.0
    for deg in (9.0, 36.0, 90.0, 137.0):
        g = _random_complex(rng, (m, m))
        out = frft2d(g, Angle.from_degrees(deg), Angle.from_degrees(deg))
        worst_parseval = max(worst_parseval, abs(np.linalg.norm(out) - np.linalg.norm(g)) / np.linalg.norm(g))
        worst_inverse = max(worst_inverse, relative_l2(g, ifrft2d(out, Angle.from_degrees(deg),
                                                                      Angle.from_degrees(deg))))

    mod = "frft-core"
    return [
        _result(mod, "unitarity", worst_unitary, th.unitarity, "<", f"{v.unitarity_trials} random (N, alpha)"),
        _result(mod, "inverse plan is conjugate transpose", worst_pair, th.conjugate_pair, "<="),
        _result(mod, "index additivity", worst_add, th.additivity, "<", f"{v.additivity_trials} pairs at N={n}"),
        _result(mod, "special angle pi/2 equals DFT", worst_dft, th.special_dft, "<",
                f"N in {v.special_sizes}"),
        _result(mod, "special angle pi equals parity", worst_parity, th.special_exact, "<="),
        _result(mod, "special angle 2pi equals identity", worst_identity, th.special_exact, "<="),
        _result(mod, "separability", separability, 0.0, "<=", "12x20, bit-identical"),
        _result(mod, "parseval", worst_parseval, th.parseval, "<", f"{m}x{m}"),
        _result(mod, "inverse round trip", worst_inverse, th.inverse, "<", "angles 9, 36, 90, 137 deg"),
    ]


# -------- polar-reconstruction --------

def check_polar(cfg: AppConfig, rng: np.random.Generator) -> List[PropertyResult]:
    th = cfg.thresholds
    s = _random_complex(rng, (32, 32))
    round_trip = relative_l2(s, polar_decompose(s).recompose())

    g = rng.uniform(0.0, 1.0, (32, 32))
    alpha, beta = Angle.from_degrees(36.0), Angle.from_degrees(52.0)
    consistency = relative_l2(g, ifrft2d(frft2d(g, alpha, beta), alpha, beta))

    s[4:9, 10:20] = 0.0
    s[20, 3] = 1e-20
    parts = polar_decompose(s)
    small = parts.amplitude < ZERO_AMPLITUDE_RATIO * parts.amplitude.max()
    violations = int(np.count_nonzero(np.exp(1j * parts.phase[small]) != 1.0))

    mod = "polar-reconstruction"
    return [
        _result(mod, "polar round trip", round_trip, th.polar_round_trip, "<="),
        _result(mod, "decomposition consistency", consistency, th.inverse, "<"),
        _result(mod, "phase zero convention", violations, 0, "==", f"{int(small.sum())} near-zero cells"),
    ]


# -------- shift-ops --------

def _sweep_case(size: int, degrees: float, delta: float, seed: int) -> Tuple[str, float]:
    image = np.random.default_rng([seed, size]).uniform(0.0, 1.0, (size, size))
    angle = Angle.from_degrees(degrees)
    shift = FrequencyShift(delta=delta)
    phase = verify_phase_invariance(image, angle, angle, shift).relative_l2_error
    amplitude = verify_amplitude_variance(image, angle, angle, shift).relative_l2_error
    return f"N={size} angle={degrees:g} delta={delta:g}", amplitude - phase


def phase_dominance_sweep(cfg: AppConfig) -> List[Tuple[str, float]]:
    """(case, amplitude error - phase error) for every sweep combination."""
    sw = cfg.sweep
    cases = list(product(sw.sizes, sw.angles_deg, sw.deltas))
    with ThreadPoolExecutor() as ex:
        return list(ex.map(lambda c: _sweep_case(*c, sw.seed), cases))


def check_shifts(cfg: AppConfig, rng: np.random.Generator) -> List[PropertyResult]:
    th = cfg.thresholds
    g = _random_complex(rng, (48, 40))
    shifted = apply_frequency_shift(g, FrequencyShift(delta=0.37, epsilon=0.61))
    modulus = np.max(np.abs(np.abs(shifted) - np.abs(g))) / np.max(np.abs(g))

    periodic = max(
        np.max(np.abs(apply_frequency_shift(g, FrequencyShift(delta=0.2)) -
                      apply_frequency_shift(g, FrequencyShift(delta=10.2)))),
        np.max(np.abs(apply_frequency_shift(g, FrequencyShift(epsilon=0.3)) -
                      apply_frequency_shift(g, FrequencyShift(epsilon=-2.7)))),
    )

    worst_comp = 0.0
    for d1, d2 in ((0.3, 0.45), (0.7, 0.6), (0.25, 0.75)):
        twice = apply_frequency_shift(apply_frequency_shift(g, FrequencyShift(delta=d1)), FrequencyShift(delta=d2))
        once = apply_frequency_shift(g, FrequencyShift(delta=d1 + d2))
        worst_comp = max(worst_comp, np.max(np.abs(twice - once)))

    sweep = phase_dominance_sweep(cfg)
    violations = [case for case, margin in sweep if not margin > 0.0]
    worst_case, worst_margin = min(sweep, key=lambda item: item[1])

    spatial = SpatialShift(rho=7, lambda_=-13)
    back = apply_spatial_shift(apply_spatial_shift(g, spatial), SpatialShift(rho=-7, lambda_=13))
    spatial_inverse = np.max(np.abs(back - g))

    mod = "shift-ops"
    calib = cfg.calibration
    angle = Angle.from_degrees(calib.alpha_deg)
    calibrated = []
    for size, recorded in sorted(calib.phase_invariance.items()):
        image = synthetic_image(size, cfg.synthetic.seed)
        corr = verify_phase_invariance(image, angle, angle, FrequencyShift(delta=calib.delta)).correlation
        calibrated.append(_result(mod, f"phase-invariance correlation N={size}", corr,
                                  calib.phase_invariance_floor(size), ">=", f"recorded {recorded:.4f}"))

    return calibrated + [
        _result(mod, "modulus preservation", modulus, th.modulus, "<="),
        _result(mod, "mod-1 equivalence", periodic, 0.0, "<=", "delta 0.2 vs 10.2, epsilon 0.3 vs -2.7"),
        _result(mod, "shift composition", worst_comp, th.composition, "<="),
        _result(mod, "phase-invariance dominance", len(violations), 0, "==",
                f"{len(sweep)} cases, smallest margin {worst_margin:.3e} at {worst_case}"),
        _result(mod, "spatial shift inverse", spatial_inverse, 0.0, "<=", "bit-exact"),
    ]


# -------- drpe-crypto --------

def check_drpe(cfg: AppConfig, rng: np.random.Generator) -> List[PropertyResult]:
    th, demo = cfg.thresholds, cfg.attack_demo
    size = cfg.verification.image_size
    alpha, beta = Angle.from_degrees(demo.alpha_deg), Angle.from_degrees(demo.beta_deg)
    key = generate_key(demo.key_seed, size, size, alpha, beta)
    again = generate_key(demo.key_seed, size, size, alpha, beta)
    deterministic = int(not (np.array_equal(key.mask, again.mask) and key.fingerprint == again.fingerprint))

    plain = rng.uniform(0.0, 1.0, (size, size))
    cipher = encrypt(plain, key)
    energy = abs(np.linalg.norm(cipher.data) - np.linalg.norm(plain)) / np.linalg.norm(plain)

    worst_attack = 0.0
    for seed in (demo.key_seed, demo.key_seed + 1000):
        k = generate_key(seed, size, size, alpha, beta)
        clean = recover_invariant(encrypt(plain, k), k)
        for d, e in ((demo.delta, demo.epsilon), (0.37, 0.0), (10.2, 0.61)):
            attacked = recover_invariant(encrypt_attacked(plain, k, FrequencyShift(delta=d, epsilon=e)), k)
            worst_attack = max(worst_attack, relative_l2(clean, attacked))

    seed_corr = max(wrong_seed_correlations(plain, key, demo.wrong_seeds))
    wrong = Angle.from_degrees(demo.wrong_angle_deg)
    alpha_corr = wrong_angle_correlation(plain, key, wrong, beta)
    beta_corr = wrong_angle_correlation(plain, key, alpha, wrong)

    mod = "drpe-crypto"
    limit = th.wrong_key_max_correlation
    return [
        _result(mod, "key determinism", deterministic, 0, "=="),
        _result(mod, "energy conservation", energy, th.energy, "<"),
        _result(mod, "attack invariance", worst_attack, th.attack_invariance, "<"),
        _result(mod, "sensitivity to seed", seed_corr, limit, "<",
                f"max over {len(demo.wrong_seeds)} wrong seeds, real part"),
        _result(mod, "sensitivity to alpha", alpha_corr, limit, "<", f"alpha {demo.wrong_angle_deg:g} deg, modulus"),
        _result(mod, "sensitivity to beta", beta_corr, limit, "<", f"beta {demo.wrong_angle_deg:g} deg, modulus"),
    ]


# -------- image-io --------

_MALFORMED: List[Tuple[Callable[[bytes], object], bytes]] = [
    (load_pgm, b"P3\n2 2\n255\n0 0 0 0"),
    (load_pgm, b"P5\n2 2\n255\n\x00\x00\x00"),
    (load_pgm, b"P5\n2 2\n255\n\x00\x00\x00\x00\x00"),
    (load_pgm, b"P5\n0 2\n255\n"),
    (load_pgm, b"P5\n2 2\n0\n\x00\x00\x00\x00"),
    (load_pgm, b"P2\n2 2\n15\n1 2 3 16\n"),
    (load_pgm, b"P2\n2 2\n15\n1 2 3\n"),
    (load_pgm, b"P22 2\n15\n1 2 3 4\n"),
    (load_complex, b"FRFT2D\x00\x01" + b"\x01\x00\x00\x00" * 2 + b"\x00" * 16),
    (load_complex, b"FRFT2D\x00\x00" + b"\x02\x00\x00\x00" * 2 + b"\x00" * 16),
    (load_complex, b"FRFT2D"),
    (load_cipher, b"FRFT2D\x00\x00" + b"\x01\x00\x00\x00" * 2 + b"\x00" * 16),
    (load_key, b"DRPEKEY1" + b"\x00" * 8),
]


def check_imageio(cfg: AppConfig, rng: np.random.Generator) -> List[PropertyResult]:
    accepted = 0
    for loader, data in _MALFORMED:
        try:
            loader(data)
        except ParseError:
            continue
        accepted += 1
        logger.warning("%s accepted malformed input %r", loader.__name__, data[:16])

    gray = GrayImage(rng.uniform(0.0, 1.0, (17, 23)))
    back = load_pgm(save_pgm(gray)).pixels
    half_quanta = round(float(np.max(np.abs(back - gray.pixels))) * 255, 9)

    z = _random_complex(rng, (9, 14))
    exact = int(not np.array_equal(load_complex(save_complex(z)), z))

    mod = "image-io"
    return [
        _result(mod, "parsers reject malformed input", accepted, 0, "==", f"{len(_MALFORMED)} malformed inputs"),
        _result(mod, "pgm round trip within half quantum", half_quanta, cfg.thresholds.pgm_quantum, "<=",
                "maxval 255, in quanta"),
        _result(mod, "complex round trip bit-exact", exact, 0, "=="),
    ]


def run_suite(cfg: AppConfig = None, inject_fault: float = 0.0) -> VerificationReport:
    """Run every invariant check. `inject_fault` perturbs operator entry [0, 0] in the frft-core checks."""
    cfg = cfg or get_config()
    rng = np.random.default_rng(cfg.verification.seed)
    if inject_fault:
        logger.warning("verification running with injected operator fault %g", inject_fault)
    results: List[PropertyResult] = []
    results += check_frft(cfg, rng, _Operators(inject_fault))
    results += check_polar(cfg, rng)
    results += check_shifts(cfg, rng)
    results += check_drpe(cfg, rng)
    results += check_imageio(cfg, rng)
    report = VerificationReport(results=results)
    logger.info("verification: %d properties, %d failed", len(results), len(report.failures()))
    return report
