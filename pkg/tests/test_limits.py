"""Tail-window classification of ratio sequences."""

import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pretangent import LimitEstimate, estimate_limit


def test_settled_tail_converges():
    est = estimate_limit([3.0, 2.0, 1.5] + [1.0] * 8)
    assert est.converged
    assert est.value == pytest.approx(1.0)
    assert est.spread == 0.0


def test_exact_constant_tail_keeps_the_fraction():
    est = estimate_limit([F(5, 2)] * 10)
    assert est.converged
    assert est.exact_value == F(5, 2)
    assert est.value == 2.5


def test_mixed_float_tail_has_no_exact_value():
    est = estimate_limit([2.5] * 10)
    assert est.converged
    assert est.exact_value is None


def test_short_input_is_insufficient():
    est = estimate_limit([1.0, 1.0, 1.0], window=6)
    assert est.status == "insufficient"
    with pytest.raises(ValueError):
        est.require_value()


def test_window_validation():
    with pytest.raises(ValueError):
        estimate_limit([1.0] * 10, window=1)


def test_huge_tail_diverges():
    est = estimate_limit([1e12, 2e12, 4e12, 8e12, 1e13, 2e13])
    assert est.status == "diverged"


def test_monotone_growth_diverges():
    # doubling every term never settles inside any fixed window
    est = estimate_limit([2.0**k for k in range(12)])
    assert est.status == "diverged"
    assert "growth" in est.detail


def test_nan_tail_is_insufficient():
    est = estimate_limit([1.0] * 6 + [math.nan] * 6)
    assert est.status == "insufficient"


def test_parity_oscillation_is_detected():
    values = [1.0 if k % 2 == 0 else 2.0 for k in range(16)]
    est = estimate_limit(values)
    assert est.status == "oscillating"
    assert sorted(est.sublimits) == [pytest.approx(1.0), pytest.approx(2.0)]


def test_small_parity_gap_still_converges():
    # a gap inside the tolerance is settling noise, not oscillation
    values = [1.0 if k % 2 == 0 else 1.0 + 5e-7 for k in range(16)]
    est = estimate_limit(values, tol_abs=1e-6)
    assert est.converged


def test_unstructured_spread_is_insufficient():
    values = [0.0, 5.0, 1.0, 4.0, 2.0, 3.0, 2.5, 0.5, 4.5, 1.5, 3.5, 0.1]
    est = estimate_limit(values)
    assert est.status == "insufficient"
    assert "spread" in est.detail


def test_require_value_passes_through():
    assert estimate_limit([F(1, 3)] * 8).require_value() == pytest.approx(1 / 3)


@given(
    st.floats(min_value=0.0, max_value=100.0, allow_nan=False),
    st.integers(min_value=6, max_value=40),
)
@settings(max_examples=80, deadline=None)
def test_eventually_constant_sequences_converge(limit, length):
    values = [limit + 2.0 ** (-k) for k in range(length)] + [limit] * 8
    est = estimate_limit(values)
    assert est.converged
    assert est.value == pytest.approx(limit, abs=1e-6)


def test_estimate_is_a_pure_window_readout():
    # verdicts depend only on the tail window and the doubled parity window
    head_a = [9.0, 7.0, 5.0]
    head_b = [0.1, 0.2, 0.3]
    tail = [1.0 if k % 2 else 2.0 for k in range(12)]
    est_a = estimate_limit(head_a + tail)
    est_b = estimate_limit(head_b + tail)
    assert est_a.status == est_b.status == "oscillating"
    assert isinstance(est_a, LimitEstimate)
