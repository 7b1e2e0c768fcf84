"""Random phase encoding in the 2D-FRFT domain.

cipher = FRFT_{alpha,beta}( I * exp(i r) ), with r a uniform phase mask on
[0, 2 pi). Only the key parameters are ever stored; the mask is regenerated.

Mask generator: the Philox4x64 counter-based generator (numpy.random.Philox)
keyed with the first 16 bytes (little endian) of
sha256("drpe:{seed}:{rows}x{cols}"), counter starting at 0. Cell k (row-major)
takes the k-th raw 64-bit output w and maps it to 2 pi * (w >> 11) * 2**-53.
"""
from __future__ import annotations
import hashlib
import logging
import math
import struct
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ...errors import InvalidDimensionError, KeyMismatchError
from ...types import QualityMetrics
from ..frft.core import Angle, ComplexImage, as_angle, ensure_complex_image, frft2d, ifrft2d
from ..frft.polar import magnitude
from ..frft.shifts import FrequencyShift, SpatialShift, apply_frequency_shift, apply_spatial_shift
from ..metrics import correlation, psnr, relative_l2

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
MAX_SEED = 2 ** 64


# -------- keys --------

def _philox_key(seed: int, rows: int, cols: int) -> int:
    h = hashlib.sha256(f"drpe:{seed}:{rows}x{cols}".encode()).digest()
    return int.from_bytes(h[:16], "little")


def phase_mask(seed: int, rows: int, cols: int) -> NDArray[np.float64]:
    bits = np.random.Philox(key=_philox_key(seed, rows, cols)).random_raw(rows * cols)
    unit = (bits >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
    mask = (TWO_PI * unit).reshape(rows, cols)
    mask[mask >= TWO_PI] = 0.0
    return mask


@dataclass(frozen=True)
class DrpeKey:
    seed: int
    rows: int
    cols: int
    alpha: Angle
    beta: Angle
    mask: NDArray[np.float64] = field(repr=False, compare=False)

    @property
    def fingerprint(self) -> bytes:
        return key_fingerprint(self.seed, self.rows, self.cols, self.alpha, self.beta)

    @property
    def shape(self):
        return (self.rows, self.cols)


def key_fingerprint(seed: int, rows: int, cols: int, alpha: Angle, beta: Angle) -> bytes:
    packed = struct.pack("<QIIdd", seed, rows, cols, alpha.radians, beta.radians)
    return hashlib.sha256(packed).digest()


def generate_key(seed: int, rows: int, cols: int, alpha: "Angle | float", beta: "Angle | float") -> DrpeKey:
    if not 0 <= int(seed) < MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    if rows < 2 or cols < 2:
        raise InvalidDimensionError(f"key dimensions must be >= 2, got {rows}x{cols}")
    mask = phase_mask(int(seed), rows, cols)
    mask.flags.writeable = False
    return DrpeKey(seed=int(seed), rows=rows, cols=cols, alpha=as_angle(alpha), beta=as_angle(beta), mask=mask)


# -------- cipher --------

@dataclass(frozen=True)
class CipherImage:
    data: ComplexImage = field(repr=False)
    key_fingerprint: bytes

    @property
    def shape(self):
        return self.data.shape


def _check_shape(shape, key: DrpeKey) -> None:
    if tuple(shape) != key.shape:
        raise KeyMismatchError(f"data is {tuple(shape)} but key is for {key.rows}x{key.cols}")


def encrypt(image: ArrayLike, key: DrpeKey) -> CipherImage:
    data = ensure_complex_image(image)
    _check_shape(data.shape, key)
    cipher = frft2d(data * np.exp(1j * key.mask), key.alpha, key.beta)
    return CipherImage(data=cipher, key_fingerprint=key.fingerprint)


def _unmask(data: ComplexImage, key: DrpeKey) -> ComplexImage:
    return ifrft2d(data, key.alpha, key.beta) * np.exp(-1j * key.mask)


def decrypt(cipher: CipherImage, key: DrpeKey) -> ComplexImage:
    _check_shape(cipher.shape, key)
    if cipher.key_fingerprint != key.fingerprint:
        logger.warning("decrypting with a key whose fingerprint differs from the cipher's")
    return _unmask(cipher.data, key)


def encrypt_attacked(image: ArrayLike, key: DrpeKey, shift: FrequencyShift,
                     spatial: Optional[SpatialShift] = None) -> CipherImage:
    """Encrypt after a frequency-shift attack on the plaintext path.

    `spatial` optionally translates the plaintext first; recovery is invariant
    to the frequency shift only, so the translation survives decryption.
    """
    data = ensure_complex_image(image)
    if spatial is not None:
        data = apply_spatial_shift(data, spatial)
    return encrypt(apply_frequency_shift(data, shift), key)


def recover_invariant(cipher: CipherImage, key: DrpeKey) -> NDArray[np.float64]:
    return magnitude(decrypt(cipher, key))


def recover_naive(cipher: CipherImage, key: DrpeKey) -> NDArray[np.float64]:
    return np.clip(decrypt(cipher, key).real, 0.0, None)


# -------- evaluation --------

def quality_metrics(reference: ArrayLike, candidate: ArrayLike) -> QualityMetrics:
    return QualityMetrics(
        correlation=correlation(reference, candidate),
        relative_l2=relative_l2(reference, candidate),
        psnr=psnr(reference, candidate),
    )


def wrong_seed_correlations(image: ArrayLike, key: DrpeKey, seeds: Iterable[int]) -> List[float]:
    """Correlation of Re(decrypt) with the plaintext for each wrong seed.

    The modulus of a wrong-seed decryption equals |I| exactly under a single
    spatial mask, so sensitivity to the seed shows up in the real part only.
    """
    plain = np.asarray(image, dtype=np.float64)
    cipher = encrypt(plain, key)
    out = []
    for s in seeds:
        if s == key.seed:
            continue
        wrong = generate_key(s, key.rows, key.cols, key.alpha, key.beta)
        out.append(correlation(plain, _unmask(cipher.data, wrong).real))
    return out


def wrong_angle_correlation(image: ArrayLike, key: DrpeKey, alpha: "Angle | float",
                            beta: "Angle | float") -> float:
    plain = np.asarray(image, dtype=np.float64)
    wrong = generate_key(key.seed, key.rows, key.cols, alpha, beta)
    return correlation(plain, magnitude(_unmask(encrypt(plain, key).data, wrong)))
