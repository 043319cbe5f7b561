"""Exact base-3 arithmetic: membership, nearest members, truncation nets."""

from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pretangent import (
    NonTerminatingExpansionError,
    TernaryError,
    TernaryNumber,
    TruncationBudgetError,
    cantor_max_leq,
    cantor_min_geq,
    ce_truncation,
    is_cantor,
    is_extended_cantor,
    scale3,
    ternary_from_value,
    ternary_value,
)

# Finite reference net: every sum of distinct digits 2 * 3**-j, j = 1..8,
# plus the endpoint 1 (an infinite-expansion member).  All are members, so
# the exact nearest-member queries can never do worse than this net.
_NET_DEPTH = 8
_NET = sorted(
    {
        sum(plus, F(0))
        for size in range(_NET_DEPTH + 1)
        for plus in combinations([2 * F(3) ** -j for j in range(1, _NET_DEPTH + 1)], size)
    }
    | {F(1)}
)


def test_membership_known_members():
    for q in (F(0), F(1), F(1, 3), F(2, 3), F(1, 4), F(3, 4), F(1, 10), F(2, 9)):
        assert is_cantor(q).is_member, q


def test_membership_known_non_members():
    # each of these hits a forced middle digit at the stated position
    for q, position in ((F(1, 2), 1), (F(2, 5), 1), (F(5, 9), 1), (F(5, 27), 2)):
        verdict = is_cantor(q)
        assert verdict.answer == "out"
        assert verdict.witness == position


def test_membership_rejects_out_of_range():
    with pytest.raises(TernaryError):
        is_cantor(F(3, 2))
    with pytest.raises(TernaryError):
        is_cantor(F(-1, 2))


def test_extension_scales_membership():
    assert is_extended_cantor(F(8, 3)).is_member  # 8/3 = 3 * (8/9)
    assert is_extended_cantor(F(6)).is_member
    assert is_extended_cantor(F(0)).is_member
    assert is_extended_cantor(F(3, 2)).answer == "out"
    with pytest.raises(TernaryError):
        is_extended_cantor(F(-1))


def test_nearest_member_fixed_cases():
    assert cantor_min_geq(F(1, 2)) == F(2, 3)
    assert cantor_max_leq(F(1, 2)) == F(1, 3)
    assert cantor_min_geq(F(1, 5)) == F(2, 9)
    assert cantor_max_leq(F(1, 5)) == F(1, 9)
    # members are their own nearest member on both sides
    assert cantor_min_geq(F(1, 4)) == F(1, 4)
    assert cantor_max_leq(F(1, 4)) == F(1, 4)
    assert cantor_min_geq(F(0)) == F(0)
    assert cantor_max_leq(F(2)) == F(1)
    assert cantor_min_geq(F(3, 2)) is None
    assert cantor_max_leq(F(-1, 7)) is None


def test_nearest_member_beats_finite_net():
    # The exact query must return a member at least as close as any member of
    # the depth-8 reference net, and the result must itself be a member.
    for k in range(1, 200):
        q = F(k, 199)
        lo = cantor_max_leq(q)
        hi = cantor_min_geq(q)
        assert lo <= q <= hi
        assert is_cantor(lo).is_member
        assert is_cantor(hi).is_member
        assert lo >= max(m for m in _NET if m <= q)
        assert hi <= min(m for m in _NET if m >= q)


def test_nearest_member_gap_is_empty():
    # nothing of the middle-thirds set lies strictly inside (1/3, 2/3)
    for k in range(1, 30):
        q = F(1, 3) + F(k, 31) * F(1, 3)
        if q in (F(1, 3), F(2, 3)):
            continue
        assert cantor_max_leq(q) == F(1, 3)
        assert cantor_min_geq(q) == F(2, 3)


def test_truncation_net_depth_four():
    net = ce_truncation(F(1), 4, 0)
    assert len(net) == 16
    assert net[0] == F(0)
    assert net[1] == F(2, 81)
    assert net[-1] == F(80, 81)
    assert all(is_extended_cantor(v).is_member for v in net)
    assert net == sorted(net)


def test_truncation_net_above_one():
    assert ce_truncation(F(3), 1, 0) == [F(0), F(2, 3), F(2), F(8, 3)]


def test_truncation_net_marked_end_is_negated():
    base = ce_truncation(F(1), 4, 0)
    flipped = ce_truncation(F(1), 4, 1)
    assert flipped == sorted(-v for v in base)
    assert flipped[0] == F(-80, 81)
    assert flipped[-1] == F(0)


def test_truncation_budget_error_names_feasible_depth():
    with pytest.raises(TruncationBudgetError) as excinfo:
        ce_truncation(F(1), 30)
    assert excinfo.value.max_depth == 21


def test_truncation_input_validation():
    with pytest.raises(TernaryError):
        ce_truncation(F(-1), 4)
    with pytest.raises(TernaryError):
        ce_truncation(F(1), -1)
    with pytest.raises(TernaryError):
        ce_truncation(F(1), 4, marked=2)


def test_expansion_round_trip_fixed():
    t = ternary_from_value(F(8, 9))
    assert t.digits == (2, 2)
    assert t.top_exponent == -1
    assert ternary_value(t) == F(8, 9)
    with pytest.raises(NonTerminatingExpansionError):
        ternary_from_value(F(1, 4))  # infinite expansion 0.020202...


@given(
    st.lists(st.sampled_from([0, 2]), min_size=0, max_size=24).map(tuple),
    st.integers(min_value=-12, max_value=12),
)
@settings(max_examples=120, deadline=None)
def test_expansion_round_trip_random(digits, top):
    while digits and digits[0] == 0:
        digits = digits[1:]
    while digits and digits[-1] == 0:
        digits = digits[:-1]
    # canonical zero carries no exponent of its own
    t = TernaryNumber(top_exponent=top, digits=digits) if digits else TernaryNumber()
    assert ternary_from_value(ternary_value(t)) == t


@given(
    st.fractions(min_value=0, max_value=1, max_denominator=3**6),
    st.integers(min_value=0, max_value=5),
)
@settings(max_examples=120, deadline=None)
def test_extension_closed_under_scaling(q, n):
    # q in C^e iff 3**n * q in C^e, by definition of the extension
    base = is_extended_cantor(q)
    scaled = is_extended_cantor(q * F(3) ** n)
    assert base.answer == scaled.answer


def test_scale3_shifts_the_window():
    t = ternary_from_value(F(2, 3))
    assert ternary_value(scale3(t, 2)) == F(6)
    assert ternary_value(scale3(t, -1)) == F(2, 9)
    zero = TernaryNumber()
    assert scale3(zero, 5).is_zero
