"""Exact base-3 arithmetic for the middle-thirds set and its scaled extension.

The middle-thirds set C consists of the reals in [0, 1] that admit a ternary
expansion using only the digits 0 and 2.  Its extension C^e adds every value
3**j * x with x in C and j >= 0, i.e. all nonnegative reals whose ternary
expansion (finitely many digits above the point) uses only 0 and 2.

Everything in this module runs on `fractions.Fraction`, so membership
questions, nearest-member queries, and truncation nets are decided exactly.
Rationals are the only inputs we ever need: every probe grid and every
normalizing sequence in this package is rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

RationalLike = Union[int, Fraction, str]

ONE_THIRD = Fraction(1, 3)
TWO_THIRDS = Fraction(2, 3)

#: Digit positions examined by default before a membership query gives up.
DEFAULT_MEMBERSHIP_DEPTH = 48

#: Hard cap on the digit walks used by the nearest-member queries.  The walk
#: resolves as soon as it sees a middle-third digit or revisits a remainder,
#: so this cap is effectively unreachable for the rationals we feed in.
_WALK_CAP = 4096

#: Depth at which internal membership decisions run.  Members produced by the
#: nearest-member walks can need far more digits than the user-facing default
#: (e.g. 25 * 3**-49 resolves only after its terminal 1-digit is rewritten as
#: an infinite tail of 2s), so space oracles decide at the walk cap.
DECISION_DEPTH = _WALK_CAP


class TernaryError(ValueError):
    """Raised on malformed digit data or out-of-domain membership queries."""


class NonTerminatingExpansionError(TernaryError):
    """The value has no finite expansion over the digits {0, 2}."""


class TruncationBudgetError(TernaryError):
    """Truncation request would enumerate more values than the budget allows."""

    def __init__(self, message: str, max_depth: int):
        super().__init__(message)
        self.max_depth = max_depth


def _as_fraction(q: RationalLike | float) -> Fraction:
    # Fraction(str(float)) keeps the decimal literal a user typed; a raw float
    # would smuggle in its binary round-off.
    if isinstance(q, float):
        return Fraction(str(q))
    return Fraction(q)


@dataclass(frozen=True)
class TernaryNumber:
    """A nonnegative rational with finitely many ternary digits, all 0 or 2.

    ``digits`` lists coefficients from the leading exponent downward:
    ``value = sum(digits[i] * 3**(top_exponent - i))``.  The representation is
    canonical: leading and trailing zero digits are not allowed, and zero
    itself is the empty digit tuple, so equal values compare equal.
    """

    top_exponent: int = 0
    digits: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        for d in self.digits:
            if d not in (0, 2):
                raise TernaryError(f"digits must be 0 or 2, got {d!r}")
        if self.digits and (self.digits[0] == 0 or self.digits[-1] == 0):
            raise TernaryError("leading/trailing digits must be nonzero (canonical form)")

    @property
    def is_zero(self) -> bool:
        return not self.digits

    def value(self) -> Fraction:
        total = Fraction(0)
        for i, d in enumerate(self.digits):
            if d:
                total += d * Fraction(3) ** (self.top_exponent - i)
        return total


def ternary_value(t: TernaryNumber) -> Fraction:
    """Exact rational value of a finite {0, 2}-digit ternary number."""
    return t.value()


def ternary_from_value(q: RationalLike | float, max_digits: int = 256) -> TernaryNumber:
    """Re-expand a rational into canonical {0, 2} ternary digits.

    Raises NonTerminatingExpansionError when the value has no finite such
    expansion (either because a digit 1 is forced or because the expansion is
    infinite, e.g. 1/4 = 0.020202...).
    """
    q = _as_fraction(q)
    if q < 0:
        raise TernaryError("ternary digits are defined for nonnegative values")
    if q == 0:
        return TernaryNumber()
    top = 0
    while Fraction(3) ** (top + 1) <= q:
        top += 1
    while Fraction(3) ** top > q:
        top -= 1
    digits: list[int] = []
    rem = q
    j = top
    while rem > 0:
        if top - j + 1 > max_digits:
            raise NonTerminatingExpansionError(
                f"{q} has no {max_digits}-digit expansion over {{0, 2}}"
            )
        p = Fraction(3) ** j
        if rem >= 2 * p:
            digits.append(2)
            rem -= 2 * p
        else:
            digits.append(0)
        j -= 1
    while digits and digits[0] == 0:
        digits.pop(0)  # happens when the greedy walk cannot place a leading 2
        top -= 1
    if not digits:
        raise NonTerminatingExpansionError(f"{q} is not a finite {{0, 2}} expansion")
    candidate = TernaryNumber(top_exponent=top, digits=tuple(digits))
    if candidate.value() != q:
        raise NonTerminatingExpansionError(f"{q} is not a finite {{0, 2}} expansion")
    return candidate


def scale3(t: TernaryNumber, n: int) -> TernaryNumber:
    """Multiply by 3**n: a pure shift of the digit window."""
    if t.is_zero:
        return t
    return TernaryNumber(top_exponent=t.top_exponent + n, digits=t.digits)


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of a membership query.

    answer is one of "in", "out", "undecided-at-depth".  For "out", witness is
    the 1-based digit position at which every admissible expansion is forced
    to use the digit 1.
    """

    answer: str
    depth: int
    witness: Optional[int] = None

    @property
    def is_member(self) -> bool:
        return self.answer == "in"


def is_cantor(q: RationalLike | float, depth: int = DEFAULT_MEMBERSHIP_DEPTH) -> MembershipVerdict:
    """Decide membership of a rational in the middle-thirds set on [0, 1].

    Walks the digit map x -> 3x (digit 0) / 3x - 2 (digit 2).  At each step at
    most one digit choice is admissible, so the walk is deterministic; a
    remainder strictly inside (1/3, 2/3) forces the digit 1 and settles the
    question negatively.  Rational remainders repeat, so cycle detection
    settles almost every query long before `depth` digits.
    """
    q = _as_fraction(q)
    if not (0 <= q <= 1):
        raise TernaryError(f"membership query outside [0, 1]: {q}")
    x = q
    seen: set[Fraction] = set()
    for position in range(1, depth + 1):
        if x == 0:
            return MembershipVerdict("in", depth=position - 1)
        if x in seen:
            return MembershipVerdict("in", depth=position - 1)
        seen.add(x)
        if x <= ONE_THIRD:
            x = 3 * x
        elif x >= TWO_THIRDS:
            x = 3 * x - 2
        else:
            return MembershipVerdict("out", depth=position, witness=position)
    return MembershipVerdict("undecided-at-depth", depth=depth)


def is_extended_cantor(
    q: RationalLike | float, depth: int = DEFAULT_MEMBERSHIP_DEPTH
) -> MembershipVerdict:
    """Decide membership in the scaled extension C^e = union of 3**j * C.

    A single scaling suffices: q belongs to C^e iff 3**-i * q lies in C for
    the smallest i >= 0 that brings the value into [0, 1].
    """
    q = _as_fraction(q)
    if q < 0:
        raise TernaryError(f"extension membership is defined for q >= 0, got {q}")
    x = q
    while x > 1:
        x /= 3
    return is_cantor(x, depth=depth)


def cantor_min_geq(bound: RationalLike | float) -> Optional[Fraction]:
    """Smallest member of the middle-thirds set that is >= bound.

    Returns None when no member qualifies (bound > 1).  The digit walk keeps
    an exact prefix; it terminates at the first forced-1 digit, at a zero
    remainder, or at a revisited remainder (which certifies the remainder
    itself is a member).
    """
    x = _as_fraction(bound)
    if x > 1:
        return None
    prefix = Fraction(0)
    scale = Fraction(1)
    seen: set[Fraction] = set()
    for _ in range(_WALK_CAP):
        if x <= 0:
            return prefix
        if ONE_THIRD < x <= TWO_THIRDS:
            return prefix + scale * TWO_THIRDS
        if x in seen:
            return prefix + scale * x
        seen.add(x)
        if x <= ONE_THIRD:
            scale /= 3
            x = 3 * x
        else:
            prefix += scale * TWO_THIRDS
            scale /= 3
            x = 3 * x - 2
    return prefix + scale * x


def cantor_max_leq(bound: RationalLike | float) -> Optional[Fraction]:
    """Largest member of the middle-thirds set that is <= bound.

    Returns None when no member qualifies (bound < 0).
    """
    x = _as_fraction(bound)
    if x < 0:
        return None
    prefix = Fraction(0)
    scale = Fraction(1)
    seen: set[Fraction] = set()
    for _ in range(_WALK_CAP):
        if x >= 1:
            return prefix + scale
        if ONE_THIRD <= x < TWO_THIRDS:
            return prefix + scale * ONE_THIRD
        if x == 0 or x in seen:
            return prefix + scale * x
        seen.add(x)
        if x < ONE_THIRD:
            scale /= 3
            x = 3 * x
        else:
            prefix += scale * TWO_THIRDS
            scale /= 3
            x = 3 * x - 2
    return prefix + scale * x


def ce_truncation(
    bound: RationalLike | float,
    depth: int,
    marked: int = 0,
    budget: int = 1 << 22,
) -> list[Fraction]:
    """All extension members within the bound, at digit resolution 3**-depth.

    For marked = 0 this is every finite sum of digits 2 * 3**j with
    -depth <= j and value <= bound, sorted ascending.  For marked = 1 the net
    is reflected through the marked endpoint: the translated set {t - 1} of
    the base set extends to the negated net, so the result is the negation of
    the marked = 0 net, again sorted ascending.

    Raises TruncationBudgetError when 2**(number of digit positions) exceeds
    the budget; the error names the largest feasible depth.
    """
    bound = _as_fraction(bound)
    if bound < 0:
        raise TernaryError(f"bound must be >= 0, got {bound}")
    if depth < 0:
        raise TernaryError(f"depth must be >= 0, got {depth}")
    if marked not in (0, 1):
        raise TernaryError(f"marked endpoint must be 0 or 1, got {marked}")
    values = [Fraction(0)]
    if bound > 0:
        top = 0
        while Fraction(3) ** (top + 1) <= bound:
            top += 1
        while top >= 0 and Fraction(3) ** top > bound:
            top -= 1
        positions = top + depth + 1
        if positions > 0 and 2**positions > budget:
            feasible = max(0, budget.bit_length() - 1 - (top + 1))
            raise TruncationBudgetError(
                f"2**{positions} values exceed the budget {budget}; "
                f"reduce depth to at most {feasible}",
                max_depth=feasible,
            )
        for j in range(top, -depth - 1, -1):
            step = 2 * Fraction(3) ** j
            extended = []
            for v in values:
                extended.append(v)
                w = v + step
                if w <= bound:
                    extended.append(w)
            values = extended
    values = sorted(set(values))
    if marked == 1:
        values = sorted(-v for v in values)
    return values
