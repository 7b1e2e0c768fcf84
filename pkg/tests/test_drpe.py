import logging
import math

import numpy as np
import pytest

from backend.fastapi.app.errors import InvalidDimensionError, KeyMismatchError, ParseError, UndefinedCorrelationError
from backend.fastapi.app.services.crypto.drpe import (CipherImage, decrypt, encrypt, encrypt_attacked, generate_key,
                                                      key_fingerprint, phase_mask, quality_metrics,
                                                      recover_invariant, recover_naive, wrong_angle_correlation,
                                                      wrong_seed_correlations)
from backend.fastapi.app.services.crypto.keyfile import LAYOUT, load_key, save_key
from backend.fastapi.app.services.experiments import run_attack_demo
from backend.fastapi.app.services.frft.core import Angle
from backend.fastapi.app.services.frft.shifts import FrequencyShift, SpatialShift
from backend.fastapi.app.services.metrics import correlation, relative_l2

A9 = Angle.from_degrees(9.0)
A36 = Angle.from_degrees(36.0)


@pytest.fixture(scope="module")
def key64():
    return generate_key(9, 64, 64, A9, A9)


def test_mask_is_deterministic_and_in_range():
    a = phase_mask(42, 16, 24)
    b = phase_mask(42, 16, 24)
    assert np.array_equal(a, b)
    assert a.shape == (16, 24)
    assert a.min() >= 0.0 and a.max() < 2 * math.pi


def test_distinct_seeds_give_unrelated_masks():
    for s in range(10):
        a, b = phase_mask(s, 64, 64), phase_mask(s + 100, 64, 64)
        assert np.mean(a != b) > 0.99


def test_mask_depends_on_shape():
    assert not np.array_equal(phase_mask(5, 8, 8)[:4, :4], phase_mask(5, 4, 4))


def test_mask_histogram_is_flat():
    counts, _ = np.histogram(phase_mask(2024, 256, 256), bins=8, range=(0.0, 2 * math.pi))
    expected = 256 * 256 / 8
    assert np.all(np.abs(counts - expected) < 0.05 * expected)


def test_generate_key_validation():
    with pytest.raises(InvalidDimensionError):
        generate_key(1, 1, 8, A9, A9)
    with pytest.raises(ValueError):
        generate_key(-1, 8, 8, A9, A9)
    with pytest.raises(ValueError):
        generate_key(2 ** 64, 8, 8, A9, A9)


def test_key_is_immutable_and_fingerprinted(key64):
    with pytest.raises(ValueError):
        key64.mask[0, 0] = 0.0
    assert key64.fingerprint == key_fingerprint(9, 64, 64, A9, A9)
    assert key64.fingerprint != generate_key(10, 64, 64, A9, A9).fingerprint
    assert len(key64.fingerprint) == 32


def test_zero_image_encrypts_to_zero(key64):
    assert not np.any(encrypt(np.zeros((64, 64)), key64).data)


def test_round_trip_and_energy(key64, image64):
    cipher = encrypt(image64, key64)
    assert abs(np.linalg.norm(cipher.data) - np.linalg.norm(image64)) < 1e-9 * np.linalg.norm(image64)
    assert relative_l2(image64, decrypt(cipher, key64)) < 1e-10
    assert cipher.key_fingerprint == key64.fingerprint


def test_shape_mismatch_is_a_key_error(key64):
    with pytest.raises(KeyMismatchError):
        encrypt(np.ones((32, 64)), key64)
    with pytest.raises(KeyMismatchError):
        decrypt(CipherImage(data=np.ones((64, 32), dtype=complex), key_fingerprint=b"\0" * 32), key64)


def test_zero_attack_is_bit_exact(key64, image64):
    assert np.array_equal(encrypt_attacked(image64, key64, FrequencyShift()).data, encrypt(image64, key64).data)


def test_attack_is_periodic_in_delta(key64, image64):
    a = encrypt_attacked(image64, key64, FrequencyShift(delta=0.2)).data
    b = encrypt_attacked(image64, key64, FrequencyShift(delta=1.2)).data
    assert np.array_equal(a, b)


@pytest.mark.parametrize("delta,epsilon", [(0.2, 0.0), (0.5, 0.0), (0.37, 0.61), (10.2, 0.0)])
def test_invariant_recovery_ignores_frequency_shift(key64, image64, delta, epsilon):
    clean = recover_invariant(encrypt(image64, key64), key64)
    attacked = recover_invariant(encrypt_attacked(image64, key64, FrequencyShift(delta=delta, epsilon=epsilon)), key64)
    assert relative_l2(clean, attacked) < 1e-10
    assert relative_l2(image64, clean) < 1e-10


def test_naive_recovery_fails_under_attack(key64, image64):
    assert relative_l2(image64, recover_naive(encrypt(image64, key64), key64)) < 1e-10
    attacked = encrypt_attacked(image64, key64, FrequencyShift(delta=0.2))
    naive = correlation(image64, recover_naive(attacked, key64))
    invariant = correlation(image64, recover_invariant(attacked, key64))
    assert naive < invariant


def test_half_cycle_attack_zeroes_odd_rows(key64, image64):
    naive = recover_naive(encrypt_attacked(image64, key64, FrequencyShift(delta=0.5)), key64)
    assert np.max(naive[1::2]) < 1e-10
    assert np.max(np.abs(naive[0::2] - image64[0::2])) < 1e-10


def test_spatial_translation_survives_recovery(key64, image64):
    spatial = SpatialShift(rho=5, lambda_=-3)
    attacked = encrypt_attacked(image64, key64, FrequencyShift(delta=0.2), spatial)
    recovered = recover_invariant(attacked, key64)
    assert relative_l2(np.roll(image64, (5, -3), axis=(0, 1)), recovered) < 1e-10


def test_wrong_seed_scrambles_real_part(key64, image64):
    corrs = wrong_seed_correlations(image64, key64, [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11])
    assert len(corrs) == 10
    assert max(corrs) < 0.5


def test_fingerprint_mismatch_is_logged_as_warning(key64, image64, caplog):
    wrong = generate_key(1, 64, 64, A9, A9)
    cipher = encrypt(image64, key64)
    with caplog.at_level(logging.WARNING, logger="backend.fastapi.app.services.crypto.drpe"):
        decrypt(cipher, key64)
        wrong_seed_correlations(image64, key64, [1, 2])
        assert not [r for r in caplog.records if "fingerprint" in r.getMessage()]
        decrypt(cipher, wrong)
    flagged = [r for r in caplog.records if "fingerprint" in r.getMessage()]
    assert [r.levelno for r in flagged] == [logging.WARNING]


def test_wrong_seed_keeps_modulus_under_single_mask(key64, image64):
    wrong = generate_key(1, 64, 64, A9, A9)
    assert relative_l2(image64, recover_invariant(encrypt(image64, key64), wrong)) < 1e-10


def test_wrong_angles_scramble_modulus(key64, image64):
    assert wrong_angle_correlation(image64, key64, A36, A36) < 0.5


def test_single_wrong_angle_scrambles_modulus(key64, rng):
    plain = rng.uniform(0.0, 1.0, (64, 64))
    assert wrong_angle_correlation(plain, key64, A36, A9) < 0.5
    assert wrong_angle_correlation(plain, key64, A9, A36) < 0.5


def test_quality_metrics_examples(rng):
    ref = rng.uniform(0.0, 1.0, (16, 16))
    same = quality_metrics(ref, ref)
    assert same.correlation == 1.0 and same.relative_l2 == 0.0 and same.psnr == math.inf

    centred = ref - ref.mean()
    assert quality_metrics(centred, -centred).correlation == -1.0

    noise = rng.standard_normal(ref.shape)
    noise -= noise.mean()
    noise -= (noise.ravel() @ centred.ravel()) / (centred.ravel() @ centred.ravel()) * centred
    noise *= np.linalg.norm(centred) / np.linalg.norm(noise)
    assert quality_metrics(centred, centred + noise).correlation == pytest.approx(1 / math.sqrt(2), abs=1e-9)


def test_quality_metrics_constant_reference():
    with pytest.raises(UndefinedCorrelationError):
        quality_metrics(np.ones((4, 4)), np.arange(16.0).reshape(4, 4))


def test_key_file_round_trip(key64):
    data = save_key(key64)
    assert len(data) == LAYOUT.size and data[:8] == b"DRPEKEY1"
    back = load_key(data)
    assert back.fingerprint == key64.fingerprint
    assert np.array_equal(back.mask, key64.mask)


def test_key_file_rejects_oversized_dimensions():
    data = LAYOUT.pack(b"DRPEKEY1", 9, 200000, 200000, 0.1, 0.1)
    with pytest.raises(ParseError) as err:
        load_key(data)
    assert err.value.offset == 16


def test_key_file_rejects_garbage(key64):
    data = save_key(key64)
    with pytest.raises(ParseError) as err:
        load_key(b"DRPEKEY2" + data[8:])
    assert err.value.offset == 0
    with pytest.raises(ParseError):
        load_key(data[:-1])
    with pytest.raises(ParseError):
        load_key(data + b"\0")


def test_attack_demo_panels_and_metrics(key64, image64):
    result = run_attack_demo(image64, key64, FrequencyShift(delta=0.2))
    assert [label for label, _ in result.tiles] == [
        "plaintext", "|cipher|", "clean recovery", "|attacked cipher|",
        "naive recovery (attacked)", "invariant recovery (attacked)",
    ]
    m = result.metrics
    assert m.stage("clean_recovery").relative_l2 < 1e-10
    assert m.stage("naive_recovery_attacked").correlation < m.stage("invariant_recovery_attacked").correlation
    assert m.stage("invariant_attacked_vs_clean").relative_l2 < 1e-10
    assert m.key_fingerprint == key64.fingerprint.hex()
    assert result.panel.pixels.shape == (2 * 65 - 1, 3 * 65 - 1)
