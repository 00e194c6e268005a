import numpy as np
import pytest
from hypothesis import given, strategies as st

from prldpc.numerics import (
    EPS,
    FIELD_CAP,
    TANH_CAP,
    capped_tanh,
    clip_field,
    leave_one_out_products,
    safe_atanh,
)


def test_cap_constants_are_consistent():
    assert TANH_CAP == 1.0 - EPS
    assert FIELD_CAP == pytest.approx(np.arctanh(1.0 - EPS))
    # the cap round-trips: tanh(FIELD_CAP) stays strictly below 1
    assert np.tanh(FIELD_CAP) < 1.0


def test_safe_atanh_matches_atanh_inside_the_cap():
    # np.arctanh(0.4) = 0.42364893019360184
    assert safe_atanh(0.4) == pytest.approx(0.42364893019360184, abs=0)
    assert np.isfinite(safe_atanh(1.0))
    assert np.isfinite(safe_atanh(-1.0))
    assert safe_atanh(1.0) == -safe_atanh(-1.0)


def test_clip_field_is_idempotent_and_odd():
    big = np.array([-1e9, -1.0, 0.0, 2.5, 1e9])
    once = clip_field(big)
    assert np.array_equal(clip_field(once), once)
    assert np.array_equal(clip_field(-big), -once)
    assert np.abs(once).max() == FIELD_CAP


def test_capped_tanh_saturates_smoothly():
    assert capped_tanh(1e6) == np.tanh(FIELD_CAP)
    assert capped_tanh(-1e6) == -np.tanh(FIELD_CAP)
    # untouched in the linear region
    assert capped_tanh(0.3) == np.tanh(0.3)


def test_leave_one_out_matches_brute_force():
    rng = np.random.default_rng(5)
    vals = rng.uniform(-1, 1, size=(4, 6))
    out = leave_one_out_products(vals)
    for r in range(4):
        for k in range(6):
            expect = np.prod(np.delete(vals[r], k))
            assert out[r, k] == pytest.approx(expect, rel=1e-12)


def test_leave_one_out_single_column_is_empty_product():
    vals = np.array([[0.3], [-0.9]])
    assert np.array_equal(leave_one_out_products(vals), np.ones((2, 1)))


def test_leave_one_out_propagates_exact_zeros():
    # division-based implementations break here; cumprods must not
    vals = np.array([[0.5, 0.0, 2.0, 4.0]])
    out = leave_one_out_products(vals)
    assert out[0, 1] == 4.0  # the only slot excluding the zero
    assert np.array_equal(out[0, [0, 2, 3]], np.zeros(3))


@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=2, max_size=8))
def test_leave_one_out_rowwise_property(row):
    vals = np.array([row])
    out = leave_one_out_products(vals)
    for k in range(len(row)):
        expect = np.prod(np.delete(vals[0], k))
        assert out[0, k] == pytest.approx(expect, rel=1e-9, abs=1e-12)
