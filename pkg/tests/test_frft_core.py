import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from backend.fastapi.app.errors import DimensionMismatchError, InvalidDataError, InvalidDimensionError
from backend.fastapi.app.services.frft.core import (BACKEND, Angle, AngleClass, build_plan, frft1d, frft2d,
                                                    hermite_basis, ifrft2d)
from tests.conftest import naive_dft, random_complex

sizes = st.integers(min_value=2, max_value=48)
radians = st.floats(min_value=-4 * math.pi, max_value=4 * math.pi, allow_nan=False)


def test_angle_classes():
    assert Angle(0.0).kind is AngleClass.IDENTITY
    assert Angle(2 * math.pi).kind is AngleClass.IDENTITY
    assert Angle(-4 * math.pi).kind is AngleClass.IDENTITY
    assert Angle(math.pi).kind is AngleClass.REVERSAL
    assert Angle(-3 * math.pi).kind is AngleClass.REVERSAL
    assert Angle(1e-13).kind is AngleClass.IDENTITY
    assert Angle(1e-6).kind is AngleClass.GENERIC
    assert Angle.from_degrees(36.0).is_generic
    assert Angle.from_degrees(36.0).degrees == pytest.approx(36.0)


def test_angle_rejects_nan():
    with pytest.raises(InvalidDataError):
        Angle(float("nan"))


def test_identity_plan_is_exact():
    plan = build_plan(4, Angle(0.0))
    assert np.array_equal(plan.operator, np.eye(4))
    assert plan.provenance == BACKEND


def test_parity_plan_maps_n_to_minus_n():
    op = build_plan(4, Angle(math.pi)).operator
    expected = np.zeros((4, 4))
    for n in range(4):
        expected[(-n) % 4, n] = 1.0
    assert np.array_equal(op, expected)


@pytest.mark.parametrize("size", [2, 3, 8, 16, 64])
def test_quarter_turn_is_unitary_dft(size):
    op = build_plan(size, Angle(math.pi / 2)).operator
    assert np.max(np.abs(op - naive_dft(size))) < 1e-9


def test_plans_are_cached_and_read_only():
    a = build_plan(16, Angle.from_degrees(36.0))
    b = build_plan(16, Angle.from_degrees(36.0))
    assert a is b
    with pytest.raises(ValueError):
        a.operator[0, 0] = 0


def test_plan_size_must_be_at_least_two():
    with pytest.raises(InvalidDimensionError):
        build_plan(1, Angle(0.3))


def test_hermite_orders_skip_n_minus_one_for_even_sizes():
    _, orders = hermite_basis(8)
    assert 7 not in orders
    assert list(orders) == [0, 1, 2, 3, 4, 5, 6, 8]
    _, orders = hermite_basis(7)
    assert list(orders) == list(range(7))


@settings(max_examples=40, deadline=None)
@given(size=sizes, alpha=radians)
def test_operator_is_unitary(size, alpha):
    u = build_plan(size, Angle(alpha)).operator
    assert np.max(np.abs(u @ u.conj().T - np.eye(size))) < 1e-9


@settings(max_examples=40, deadline=None)
@given(size=sizes, alpha=radians)
def test_negated_angle_gives_conjugate_transpose(size, alpha):
    u = build_plan(size, Angle(alpha)).operator
    v = build_plan(size, Angle(-alpha)).operator
    assert np.max(np.abs(v - u.conj().T)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(a1=radians, a2=radians, seed=st.integers(0, 2 ** 32 - 1))
def test_index_additivity(a1, a2, seed):
    x = random_complex(np.random.default_rng(seed), 32)
    composed = frft1d(frft1d(x, build_plan(32, Angle(a1))), build_plan(32, Angle(a2)))
    direct = frft1d(x, build_plan(32, Angle(a1) + Angle(a2)))
    assert np.linalg.norm(composed - direct) / np.linalg.norm(direct) < 1e-8


def test_frft1d_identity_and_impulse():
    impulse = np.zeros(8)
    impulse[0] = 1.0
    assert np.array_equal(frft1d(impulse, build_plan(8, Angle(0.0))), impulse)
    out = frft1d(impulse, build_plan(8, Angle(math.pi / 2)))
    assert np.max(np.abs(out - naive_dft(8)[:, 0])) < 1e-9
    assert np.allclose(np.abs(out), 1 / math.sqrt(8), atol=1e-12)


def test_frft1d_length_mismatch():
    with pytest.raises(DimensionMismatchError):
        frft1d(np.ones(5), build_plan(4, Angle(0.3)))


def test_frft1d_inverse_pair(rng):
    x = random_complex(rng, 24)
    back = frft1d(frft1d(x, build_plan(24, Angle(0.7))), build_plan(24, Angle(-0.7)))
    assert np.linalg.norm(back - x) / np.linalg.norm(x) < 1e-10


def test_frft2d_zero_angles_is_identity(rng):
    g = random_complex(rng, (6, 9))
    assert np.array_equal(frft2d(g, 0.0, 0.0), g)
    assert np.array_equal(ifrft2d(g, 0.0, 0.0), g)


def test_frft2d_constant_image_concentrates_in_dc():
    n = 16
    out = frft2d(np.ones((n, n)), math.pi / 2, math.pi / 2)
    expected = np.zeros((n, n))
    expected[0, 0] = n
    assert np.max(np.abs(out - expected)) < 1e-9


def test_frft2d_is_separable_in_axis_order(rng):
    g = random_complex(rng, (10, 14))
    alpha, beta = Angle(0.4), Angle(1.9)
    by_hand = (build_plan(14, beta).operator @ (build_plan(10, alpha).operator @ g).T).T
    assert np.array_equal(frft2d(g, alpha, beta), by_hand)


def test_frft2d_quarter_turn_matches_2d_dft(rng):
    g = random_complex(rng, (8, 12))
    expected = naive_dft(8) @ g @ naive_dft(12).T
    assert np.max(np.abs(frft2d(g, math.pi / 2, math.pi / 2) - expected)) < 1e-9
    spectrum = np.fft.fft2(g, norm="ortho")
    assert np.max(np.abs(ifrft2d(spectrum, math.pi / 2, math.pi / 2) - g)) < 1e-9


@pytest.mark.parametrize("degrees", [9.0, 36.0, 90.0, 137.0])
def test_frft2d_round_trip_and_parseval(rng, degrees):
    g = random_complex(rng, (64, 64))
    a = Angle.from_degrees(degrees)
    out = frft2d(g, a, a)
    assert abs(np.linalg.norm(out) - np.linalg.norm(g)) < 1e-9 * np.linalg.norm(g)
    back = ifrft2d(out, a, a)
    assert np.linalg.norm(back - g) / np.linalg.norm(g) < 1e-10


def test_frft2d_reversal_flips_both_axes(rng):
    g = random_complex(rng, (5, 7))
    out = frft2d(g, math.pi, math.pi)
    assert np.array_equal(out, g[(-np.arange(5)) % 5][:, (-np.arange(7)) % 7])


@pytest.mark.parametrize("bad,error", [
    (np.ones(8), InvalidDimensionError),
    (np.ones((0, 4)), InvalidDimensionError),
    (np.array([[1.0, np.nan], [0.0, 1.0]]), InvalidDataError),
    (np.array([[1.0, np.inf], [0.0, 1.0]]), InvalidDataError),
    (np.array([["a", "b"], ["c", "d"]]), InvalidDataError),
])
def test_frft2d_rejects_malformed_images(bad, error):
    with pytest.raises(error):
        frft2d(bad, 0.3, 0.3)
