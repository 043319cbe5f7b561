"""Classification of scalar sequences arising as rescaled-distance ratios.

Everything downstream reduces to the same question: does a sequence of
nonnegative ratios settle, blow up, or keep jumping between sublimits?  The
estimator answers from a fixed tail window so that verdicts are reproducible
and do not depend on how many warm-up terms a caller happened to produce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

Scalar = Union[float, Fraction]

DEFAULT_WINDOW = 6
DEFAULT_TOL_ABS = 1e-6
DEFAULT_TOL_REL = 1e-3
DIVERGE_ABOVE = 1e9
# monotone growth by this factor across the window is treated as divergence
GROWTH_FACTOR = 4.0

CONVERGED = "converged"
DIVERGED = "diverged"
OSCILLATING = "oscillating"
INSUFFICIENT = "insufficient"


@dataclass(frozen=True)
class LimitEstimate:
    """Outcome of tail-window analysis of a scalar sequence."""

    status: str
    value: Optional[float] = None
    exact_value: Optional[Fraction] = None
    spread: float = math.inf
    window: tuple[float, ...] = ()
    sublimits: tuple[float, ...] = ()
    detail: str = ""

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def require_value(self) -> float:
        if not self.converged or self.value is None:
            raise ValueError(f"sequence did not converge: {self.status} ({self.detail})")
        return self.value


def _as_float(x: Scalar) -> float:
    return float(x)


def estimate_limit(
    values: Sequence[Scalar],
    *,
    window: int = DEFAULT_WINDOW,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
    diverge_above: float = DIVERGE_ABOVE,
    osc_gap: Optional[float] = None,
) -> LimitEstimate:
    """Classify the tail of a sequence.

    Order of tests: insufficient data, then non-finite or huge values
    (diverged), then settled tail (converged), then sustained monotone growth
    (diverged), then a two-sublimit parity split (oscillating); anything else
    is reported as insufficient evidence rather than forced into a bucket.
    """
    if window < 2:
        raise ValueError(f"window must be >= 2, got {window}")
    if osc_gap is None:
        osc_gap = 10.0 * tol_abs
    n = len(values)
    if n < window:
        return LimitEstimate(
            status=INSUFFICIENT, detail=f"need at least {window} terms, got {n}"
        )

    tail = list(values[n - window :])
    tail_f = [_as_float(v) for v in tail]
    if any(math.isnan(v) for v in tail_f):
        return LimitEstimate(status=INSUFFICIENT, window=tuple(tail_f), detail="NaN in tail")
    if any(math.isinf(v) for v in tail_f) or min(tail_f) > diverge_above:
        return LimitEstimate(status=DIVERGED, window=tuple(tail_f), detail="tail exceeds bound")

    lo, hi = min(tail_f), max(tail_f)
    spread = hi - lo
    mean = sum(tail_f) / window
    tol = max(tol_abs, tol_rel * abs(mean))
    if spread <= tol:
        exact = None
        if all(isinstance(v, Fraction) for v in tail) and len(set(tail)) == 1:
            exact = tail[0]
        return LimitEstimate(
            status=CONVERGED,
            value=float(exact) if exact is not None else mean,
            exact_value=exact,
            spread=spread,
            window=tuple(tail_f),
        )

    increasing = all(tail_f[i] < tail_f[i + 1] for i in range(window - 1))
    if increasing and tail_f[0] > 0 and tail_f[-1] >= GROWTH_FACTOR * tail_f[0]:
        return LimitEstimate(
            status=DIVERGED,
            spread=spread,
            window=tuple(tail_f),
            detail="sustained monotone growth",
        )

    # parity sublimits over a doubled window, indexed by global position
    start = max(0, n - 2 * window)
    evens = [_as_float(values[i]) for i in range(start, n) if i % 2 == 0]
    odds = [_as_float(values[i]) for i in range(start, n) if i % 2 == 1]
    if len(evens) >= 2 and len(odds) >= 2:
        even_mean = sum(evens) / len(evens)
        odd_mean = sum(odds) / len(odds)
        gap = abs(even_mean - odd_mean)
        even_spread = max(evens) - min(evens)
        odd_spread = max(odds) - min(odds)
        settled = max(even_spread, odd_spread) <= max(tol, 0.5 * gap)
        if gap > osc_gap and settled:
            return LimitEstimate(
                status=OSCILLATING,
                spread=spread,
                window=tuple(tail_f),
                sublimits=(even_mean, odd_mean),
                detail=f"parity sublimits differ by {gap:.3g}",
            )

    return LimitEstimate(
        status=INSUFFICIENT,
        spread=spread,
        window=tuple(tail_f),
        detail=f"tail spread {spread:.3g} exceeds tolerance {tol:.3g}",
    )
