"""Sphere and annulus functionals controlling uniqueness of rescaling limits.

Three limit functionals decide whether all rescaling limits at the marked
point agree: the annulus thinness profile g(k) = limsup_{r -> 0}
diam(A_a(r, k)) / r as k -> 1, the sphere-pair ratio Delta/delta over
nontangential radius pairs, and the normalized gap kappa = Delta / |q - t|
along radius sequences with a fixed ratio limit c0.  Each estimator returns a
report with a plottable profile table and a pass / fail / inconclusive
verdict; verdicts are decided from fixed tail windows so reruns agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import SpaceOracle
from .limits import DEFAULT_WINDOW, LimitEstimate, estimate_limit

# radius grids: geometric decay toward 0; exact spaces afford a deeper tail
# because their annuli are enumerated, not sampled
R_DECAY = Fraction(7, 10)
R_START = Fraction(1, 2)
R_COUNT_EXACT = 81
R_COUNT_SAMPLED = 41

K_GRID = (2.0, 1.5, 1.2, 1.1, 1.05, 1.02, 1.01)
EPS_DEFAULT = 0.25
TOL_ABS_EXACT = 1e-6
TOL_ABS_SAMPLED = 1e-3

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

# c0 targets for the normalized sphere-gap limit; 0 and inf carry a forced
# limit kappa0 = 1, which we still back with numeric evidence
C0_TARGETS = ("2", "1/2", "0", "inf")


class FunctionalError(Exception):
    """Base class for functional-evaluation failures."""


class InsufficientGridError(FunctionalError):
    """The radius grid is too short to support a verdict."""


class NotInRadiusSetError(FunctionalError):
    """A requested sphere is empty: the radius is not a distance to any point."""


class CannotEvaluateError(FunctionalError):
    """No admissible input pairs exist for a functional."""


class ReportMismatchError(FunctionalError):
    """Condition reports being combined do not describe the same space."""


def default_r_grid(exact: bool) -> tuple:
    count = R_COUNT_EXACT if exact else R_COUNT_SAMPLED
    if exact:
        return tuple(R_START * R_DECAY**j for j in range(count))
    return tuple(float(R_START) * float(R_DECAY) ** j for j in range(count))


def default_tol_abs(space: SpaceOracle) -> float:
    return TOL_ABS_EXACT if space.exact else TOL_ABS_SAMPLED


@dataclass(frozen=True)
class ConditionReport:
    """Verdict and profile table for one uniqueness condition."""

    condition: str  # "i" | "ii" | "iii"
    verdict: str  # "pass" | "fail" | "inconclusive"
    space_label: str
    summary: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    metrics: dict


@dataclass(frozen=True)
class SpherePair:
    """Extremal cross distances between two spheres about the marked point."""

    r_first: float
    r_second: float
    inf_distance: float
    sup_distance: float

    @property
    def ratio(self) -> float:
        return self.sup_distance / self.inf_distance


def annulus_diameter(space: SpaceOracle, r, k, budget: int = 256) -> float:
    """diam of A_a(r, k) = {x : r/k <= d(x, a) <= r k}; 0 when empty."""
    diam, _ = space.annulus_extremes(r, k, budget=budget)
    return diam


def sphere_gap(space: SpaceOracle, r_first, r_second, budget: int = 256) -> SpherePair:
    """inf and sup of d(x, y) over x in S(r_first), y in S(r_second)."""
    first = space.sphere(r_first, budget=budget, strict=False)
    second = space.sphere(r_second, budget=budget, strict=False)
    if first.empty:
        raise NotInRadiusSetError(f"radius {r_first} has an empty sphere in {space.label}")
    if second.empty:
        raise NotInRadiusSetError(f"radius {r_second} has an empty sphere in {space.label}")
    inf_d, sup_d = math.inf, 0.0
    for p in first:
        for q in second:
            d = space.distance(p, q)
            inf_d = min(inf_d, d)
            sup_d = max(sup_d, d)
    return SpherePair(
        r_first=float(r_first),
        r_second=float(r_second),
        inf_distance=inf_d,
        sup_distance=sup_d,
    )


# ---------------------------------------------------------------------------
# condition (i): annulus thinness
# ---------------------------------------------------------------------------


def condition_i(
    space: SpaceOracle,
    *,
    r_grid: Optional[Sequence] = None,
    k_grid: Sequence[float] = K_GRID,
    window: int = DEFAULT_WINDOW,
    budget: int = 256,
    tol_abs: Optional[float] = None,
) -> ConditionReport:
    """Estimate lim_{k->1} limsup_{r->0} diam(A_a(r, k)) / r.

    For each k the limsup is approximated by the maximum of diam/r over the
    smallest `window` grid radii.  The k -> 1 limit is then extrapolated by a
    least-squares fit of g(k) on the basis {k, k - 1/k}: the second basis
    function is the exact profile of an interval, the first carries any
    plateau, and the fitted plateau coefficient is the k -> 1 limit.  Any
    subset of the line satisfies diam(A) <= r(k - 1/k), so profiles dominated
    by that bound are clipped to an extrapolated value of exactly 0.
    """
    if r_grid is None:
        r_grid = default_r_grid(space.exact)
    if len(r_grid) < 8:
        raise InsufficientGridError(
            f"condition (i) needs at least 8 radii, got {len(r_grid)}"
        )
    if tol_abs is None:
        tol_abs = default_tol_abs(space)
    k_grid = tuple(float(k) for k in k_grid)
    if any(k <= 1 for k in k_grid):
        raise ValueError("condition (i) requires every k > 1")
    if len(k_grid) < 3:
        raise ValueError("condition (i) needs at least 3 values of k")

    window = min(window, len(r_grid))
    tail = list(r_grid)[len(r_grid) - window :]
    g_of_k: list[float] = []
    for k in k_grid:
        k_val = Fraction(str(k)) if space.exact else k
        ratios = [
            annulus_diameter(space, r, k_val, budget=budget) / float(r) for r in tail
        ]
        g_of_k.append(max(ratios))

    pass_threshold = 3.0 * tol_abs
    interval_bound = [k - 1.0 / k for k in k_grid]
    dominated = all(
        g <= bound * 1.05 + pass_threshold for g, bound in zip(g_of_k, interval_bound)
    )
    if dominated:
        extrapolated = 0.0
    else:
        order = np.argsort(k_grid)[:3]  # the three k closest to 1
        ks = np.array([k_grid[i] for i in order])
        gs = np.array([g_of_k[i] for i in order])
        basis = np.column_stack([ks, ks - 1.0 / ks])
        coef, *_ = np.linalg.lstsq(basis, gs, rcond=None)
        extrapolated = max(0.0, float(coef[0]))

    g_at_kmin = g_of_k[int(np.argmin(k_grid))]
    if extrapolated <= pass_threshold:
        verdict = PASS
    elif extrapolated >= 0.05 and extrapolated >= 0.5 * g_at_kmin:
        verdict = FAIL
    else:
        verdict = INCONCLUSIVE

    rows = tuple((k, g) for k, g in zip(k_grid, g_of_k))
    summary = (
        f"annulus ratio g(k) extrapolates to {extrapolated:.6g} as k -> 1 "
        f"(pass threshold {pass_threshold:.3g})"
    )
    return ConditionReport(
        condition="i",
        verdict=verdict,
        space_label=space.label,
        summary=summary,
        columns=("k", "g_of_k"),
        rows=rows,
        metrics={
            "extrapolated": extrapolated,
            "pass_threshold": pass_threshold,
            "dominated_by_interval_bound": dominated,
            "g_at_k_min": g_at_kmin,
        },
    )


# ---------------------------------------------------------------------------
# condition (ii): sphere-pair ratio over nontangential pairs
# ---------------------------------------------------------------------------


def condition_ii(
    space: SpaceOracle,
    *,
    r_grid: Optional[Sequence] = None,
    eps: float = EPS_DEFAULT,
    window: int = DEFAULT_WINDOW,
    budget: int = 64,
    tol_abs: Optional[float] = None,
) -> ConditionReport:
    """Estimate lim Delta(S(g), S(t)) / delta(S(g), S(t)) over |g/t - 1| >= eps.

    Pairs are built from the space's own radius set: t near each grid radius
    and g near twice that, dropped when they collide, repeat, or fall inside
    the tangential cone |g/t - 1| < eps.
    """
    if not (0 < eps < 1):
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if r_grid is None:
        r_grid = default_r_grid(space.exact)
    if tol_abs is None:
        tol_abs = default_tol_abs(space)

    rows: list[tuple[float, float, float]] = []
    ratios: list[float] = []
    last_t = math.inf
    for r in r_grid:
        t = space.nearest_radius(r)
        g = space.nearest_radius(2 * r)
        if t is None or g is None:
            continue
        t_f, g_f = float(t), float(g)
        if t_f <= 0 or g_f <= 0 or g_f == t_f or t_f >= last_t:
            continue
        if abs(g_f / t_f - 1.0) < eps:
            continue
        pair = sphere_gap(space, g, t, budget=budget)
        rows.append((g_f, t_f, pair.ratio))
        ratios.append(pair.ratio)
        last_t = t_f
    if not rows:
        raise CannotEvaluateError(
            f"no admissible sphere pairs for {space.label} with eps={eps}"
        )

    est = estimate_limit(ratios, window=min(window, max(3, len(ratios))), tol_abs=tol_abs)
    if est.converged and abs(est.value - 1.0) <= 10.0 * tol_abs:
        verdict = PASS
    elif est.converged and est.value >= 1.05:
        verdict = FAIL
    elif est.status in ("oscillating", "diverged"):
        verdict = FAIL
    else:
        verdict = INCONCLUSIVE

    value_text = f"{est.value:.9g}" if est.converged else est.status
    summary = f"sup/inf sphere-pair ratio tends to {value_text} over {len(rows)} pairs"
    return ConditionReport(
        condition="ii",
        verdict=verdict,
        space_label=space.label,
        summary=summary,
        columns=("g", "t", "ratio"),
        rows=tuple(rows),
        metrics={
            "limit": est.value,
            "status": est.status,
            "pairs": len(rows),
            "eps": eps,
            "pass_threshold": 10.0 * tol_abs,
        },
    )


# ---------------------------------------------------------------------------
# condition (iii): normalized sphere gap along fixed-ratio sequences
# ---------------------------------------------------------------------------


def _c0_pair(space: SpaceOracle, target: str, rho):
    """Radius pair (q, t) near ratio c0 for one grid scale rho."""
    if target == "2":
        return space.nearest_radius(2 * rho), space.nearest_radius(rho)
    if target == "1/2":
        return space.nearest_radius(rho), space.nearest_radius(2 * rho)
    if target == "0":
        return space.nearest_radius(rho * rho), space.nearest_radius(rho)
    if target == "inf":
        return space.nearest_radius(rho), space.nearest_radius(rho * rho)
    raise ValueError(f"unknown c0 target {target!r}")


def condition_iii(
    space: SpaceOracle,
    *,
    r_grid: Optional[Sequence] = None,
    eps: float = EPS_DEFAULT,
    targets: Sequence[str] = C0_TARGETS,
    window: int = DEFAULT_WINDOW,
    budget: int = 64,
    tol_abs: Optional[float] = None,
) -> ConditionReport:
    """Check that kappa = Delta(S(q), S(t)) / |q - t| has a finite limit.

    One radius-pair sequence is built per ratio target c0; for c0 in {0, inf}
    the limit is forced to 1, and the numeric profile is recorded as
    corroborating evidence rather than as the ground for the verdict.
    """
    if r_grid is None:
        r_grid = default_r_grid(space.exact)
    if tol_abs is None:
        tol_abs = default_tol_abs(space)

    rows: list[tuple[int, float, float, float]] = []
    kappa0: dict[str, Optional[float]] = {}
    status: dict[str, str] = {}
    counter = 0
    for target in targets:
        kappas: list[float] = []
        last_t = math.inf
        for rho in r_grid:
            q, t = _c0_pair(space, target, rho)
            if q is None or t is None:
                continue
            q_f, t_f = float(q), float(t)
            if q_f <= 0 or t_f <= 0 or q_f == t_f or t_f >= last_t:
                continue
            if abs(q_f / t_f - 1.0) < eps:
                continue
            pair = sphere_gap(space, q, t, budget=budget)
            counter += 1
            kappa = pair.sup_distance / abs(q_f - t_f)
            rows.append((counter, q_f, t_f, kappa))
            kappas.append(kappa)
            last_t = t_f
        forced = target in ("0", "inf")
        if len(kappas) < 3:
            status[target] = "forced" if forced else "no-pairs"
            kappa0[target] = 1.0 if forced else None
            continue
        est = estimate_limit(kappas, window=min(window, len(kappas)), tol_abs=tol_abs)
        if forced:
            status[target] = "forced"
            kappa0[target] = 1.0
        elif est.converged:
            status[target] = "converged"
            kappa0[target] = est.value
        else:
            status[target] = est.status
            kappa0[target] = None

    if not rows:
        raise CannotEvaluateError(f"no admissible radius-pair sequences for {space.label}")

    finite_targets = [t for t in targets if status.get(t) in ("converged", "forced")]
    broken = [t for t in targets if status.get(t) in ("oscillating", "diverged")]
    if broken:
        verdict = FAIL
    elif len(finite_targets) == len(targets):
        verdict = PASS
    else:
        # targets with no admissible pairs do not witness a failure
        empty = [t for t in targets if status.get(t) == "no-pairs"]
        verdict = PASS if len(finite_targets) + len(empty) == len(targets) else INCONCLUSIVE

    described = ", ".join(
        f"c0={t}: kappa0={kappa0[t]:.6g}" for t in targets if kappa0.get(t) is not None
    )
    summary = f"normalized sphere gaps: {described or 'no finite limits'}"
    return ConditionReport(
        condition="iii",
        verdict=verdict,
        space_label=space.label,
        summary=summary,
        columns=("n", "q_n", "t_n", "kappa_n"),
        rows=tuple(rows),
        metrics={"kappa0": kappa0, "status": status, "eps": eps},
    )


# ---------------------------------------------------------------------------
# combined verdict and tangent equivalence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniquenessVerdict:
    """Combined verdict of the three uniqueness conditions."""

    verdict: str  # "unique" | "non-unique" | "inconclusive"
    space_label: str
    failing: tuple[str, ...]
    reports: tuple[ConditionReport, ...]


def uniqueness_verdict(reports: Sequence[ConditionReport]) -> UniquenessVerdict:
    """All three conditions pass: unique; any fails: non-unique; else open."""
    labels = {r.space_label for r in reports}
    if len(labels) != 1:
        raise ReportMismatchError(f"reports describe different spaces: {sorted(labels)}")
    conditions = sorted(r.condition for r in reports)
    if conditions != ["i", "ii", "iii"]:
        raise ReportMismatchError(
            f"need exactly conditions i, ii, iii; got {conditions}"
        )
    failing = tuple(r.condition for r in reports if r.verdict == FAIL)
    if failing:
        verdict = "non-unique"
    elif all(r.verdict == PASS for r in reports):
        verdict = "unique"
    else:
        verdict = "inconclusive"
    return UniquenessVerdict(
        verdict=verdict,
        space_label=labels.pop(),
        failing=failing,
        reports=tuple(reports),
    )


@dataclass(frozen=True)
class EquivalenceReport:
    """Two-sided sphere deviation profile between embedded spaces."""

    verdict: str
    first_label: str
    second_label: str
    summary: str
    columns: tuple[str, ...]
    rows: tuple[tuple[float, float], ...]
    metrics: dict


def tangent_equivalence_epsilon(
    first: SpaceOracle,
    second: SpaceOracle,
    *,
    t_grid: Optional[Sequence[float]] = None,
    budget: int = 64,
) -> EquivalenceReport:
    """Profile eps(t)/t where eps(t) is the two-sided sphere deviation.

    eps(t) is the larger of: how far points of the first space's sphere of
    radius t sit from the second space (in the shared ambient space), and the
    converse.  The spaces are tangent-equivalent at their common marked point
    exactly when eps(t)/t -> 0.
    """
    a1 = first.embed(first.marked_point)
    a2 = second.embed(second.marked_point)
    if a1.shape != a2.shape or float(np.linalg.norm(a1 - a2)) > 1e-12:
        raise ValueError(
            "marked points must coincide in the ambient space: "
            f"{a1.tolist()} vs {a2.tolist()}"
        )
    if t_grid is None:
        t_grid = tuple(10.0 ** (-j) for j in range(1, 11))

    rows: list[tuple[float, float]] = []
    for t in t_grid:
        deviations = [0.0]
        for host, other in ((first, second), (second, first)):
            sphere = host.sphere(t, strict=False, budget=budget)
            worst = 0.0
            for p in sphere:
                worst = max(worst, other.min_ambient_distance(host.embed(p)))
            deviations.append(worst)
        rows.append((float(t), max(deviations) / float(t)))

    tail = [v for _, v in rows[-3:]]
    if max(tail) <= 0.01:
        verdict = PASS
    elif min(tail) >= 0.05:
        verdict = FAIL
    else:
        verdict = INCONCLUSIVE
    summary = (
        f"sphere deviation eps(t)/t reaches {rows[-1][1]:.3g} at t={rows[-1][0]:.1e}"
    )
    return EquivalenceReport(
        verdict=verdict,
        first_label=first.label,
        second_label=second.label,
        summary=summary,
        columns=("t", "eps_over_t"),
        rows=tuple(rows),
        metrics={"final_ratio": rows[-1][1], "grid": [float(t) for t in t_grid]},
    )
