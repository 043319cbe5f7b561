"""Annulus and sphere-pair functionals, combined verdicts, sphere deviation."""

import math
from fractions import Fraction as F

import pytest

from pretangent import (
    CannotEvaluateError,
    InsufficientGridError,
    NotInRadiusSetError,
    ReportMismatchError,
    annulus_diameter,
    condition_i,
    condition_ii,
    condition_iii,
    curve_tangent_ray,
    default_r_grid,
    planar_ray_pair,
    sphere_gap,
    tangent_equivalence_epsilon,
    uniqueness_verdict,
)

SQRT2 = math.sqrt(2.0)
SQRT5 = math.sqrt(5.0)


# ---------------------------------------------------------------------------
# primitive functionals
# ---------------------------------------------------------------------------


def test_sphere_gap_on_the_half_line(half_line):
    pair = sphere_gap(half_line, F(2), F(1))
    assert pair.inf_distance == pytest.approx(1.0)
    assert pair.sup_distance == pytest.approx(1.0)
    assert pair.ratio == pytest.approx(1.0)


def test_sphere_gap_on_singleton_spheres(cantor0):
    pair = sphere_gap(cantor0, F(1, 3), F(1, 9))
    assert pair.inf_distance == pytest.approx(float(F(2, 9)))
    assert pair.sup_distance == pytest.approx(float(F(2, 9)))


def test_sphere_gap_across_perpendicular_rays(perp_rays):
    pair = sphere_gap(perp_rays, F(2), F(1))
    assert pair.inf_distance == pytest.approx(1.0)
    assert pair.sup_distance == pytest.approx(SQRT5, abs=1e-12)
    assert pair.ratio == pytest.approx(SQRT5, abs=1e-12)


def test_sphere_gap_requires_admissible_radii(cantor0):
    with pytest.raises(NotInRadiusSetError):
        sphere_gap(cantor0, F(1, 2), F(1, 3))


def test_annulus_diameter_examples(half_line, cantor0):
    assert annulus_diameter(half_line, F(1), F(2)) == pytest.approx(1.5)
    # bounds [2/9, 1/2] snap inward to the members 2/9 and 1/3
    assert annulus_diameter(cantor0, F(1, 3), F(3, 2)) == pytest.approx(float(F(1, 9)))


def test_default_grids():
    assert len(default_r_grid(True)) == 81
    assert len(default_r_grid(False)) == 41
    assert default_r_grid(True)[0] == F(1, 2)
    assert default_r_grid(True)[1] == F(1, 2) * F(7, 10)


# ---------------------------------------------------------------------------
# condition (i): annulus thinness profile
# ---------------------------------------------------------------------------


def test_condition_i_half_line_profile(half_line):
    report = condition_i(half_line)
    assert report.verdict == "pass"
    assert report.columns == ("k", "g_of_k")
    # annuli of the half-line are the intervals [r/k, rk]: g(k) = k - 1/k
    for k, g in report.rows:
        assert g == pytest.approx(k - 1.0 / k, abs=1e-9)
    assert report.rows[0] == (2.0, pytest.approx(1.5, abs=1e-12))
    assert report.metrics["extrapolated"] <= 1e-6
    assert report.metrics["dominated_by_interval_bound"]


def test_condition_i_planar_plateau(perp_rays):
    report = condition_i(perp_rays)
    assert report.verdict == "fail"
    # the cross-ray corner keeps every annulus about sqrt(2) r wide
    assert report.metrics["extrapolated"] == pytest.approx(SQRT2, abs=1e-6)
    for k, g in report.rows:
        assert g >= SQRT2 - 1e-9


def test_condition_i_cantor_is_dominated(cantor0):
    report = condition_i(cantor0)
    assert report.verdict == "pass"
    assert report.metrics["extrapolated"] == 0.0


def test_condition_i_validation(half_line):
    with pytest.raises(InsufficientGridError):
        condition_i(half_line, r_grid=[F(1, 2), F(1, 4)])
    with pytest.raises(ValueError):
        condition_i(half_line, k_grid=(2.0, 1.0, 0.5))
    with pytest.raises(ValueError):
        condition_i(half_line, k_grid=(2.0, 1.5))


# ---------------------------------------------------------------------------
# condition (ii): sphere-pair ratio
# ---------------------------------------------------------------------------


def test_condition_ii_half_line_is_flat(half_line):
    report = condition_ii(half_line)
    assert report.verdict == "pass"
    assert report.columns == ("g", "t", "ratio")
    assert report.metrics["limit"] == pytest.approx(1.0, abs=1e-9)
    for _, _, ratio in report.rows:
        assert ratio == pytest.approx(1.0, abs=1e-9)
    assert report.rows[0][:2] == (1.0, 0.5)


def test_condition_ii_planar_reaches_root_five(perp_rays):
    report = condition_ii(perp_rays)
    assert report.verdict == "fail"
    assert report.metrics["limit"] == pytest.approx(SQRT5, abs=1e-6)


def test_condition_ii_validation(half_line):
    with pytest.raises(ValueError):
        condition_ii(half_line, eps=0.0)
    with pytest.raises(CannotEvaluateError):
        condition_ii(half_line, r_grid=[])


# ---------------------------------------------------------------------------
# condition (iii): normalized sphere gap
# ---------------------------------------------------------------------------


def test_condition_iii_half_line(half_line):
    report = condition_iii(half_line)
    assert report.verdict == "pass"
    assert report.columns == ("n", "q_n", "t_n", "kappa_n")
    assert report.rows[0] == (1, 1.0, 0.5, pytest.approx(1.0, abs=1e-12))
    assert report.metrics["kappa0"] == {
        "2": pytest.approx(1.0, abs=1e-9),
        "1/2": pytest.approx(1.0, abs=1e-9),
        "0": 1.0,
        "inf": 1.0,
    }
    # ratio targets 0 and inf carry a forced limit; the finite ones converge
    assert report.metrics["status"]["2"] == "converged"
    assert report.metrics["status"]["1/2"] == "converged"
    assert report.metrics["status"]["0"] == "forced"
    assert report.metrics["status"]["inf"] == "forced"


def test_condition_iii_planar_is_finite(perp_rays):
    # both rays meet every sphere, so the gap normalizes to sqrt(5) at c0 = 2
    report = condition_iii(perp_rays)
    assert report.verdict == "pass"
    assert report.metrics["kappa0"]["2"] == pytest.approx(SQRT5, abs=1e-6)


# ---------------------------------------------------------------------------
# combined verdict
# ---------------------------------------------------------------------------


def _three_reports(space):
    return [condition_i(space), condition_ii(space), condition_iii(space)]


def test_uniqueness_verdict_half_line(half_line):
    verdict = uniqueness_verdict(_three_reports(half_line))
    assert verdict.verdict == "unique"
    assert verdict.failing == ()


def test_uniqueness_verdict_planar(perp_rays):
    verdict = uniqueness_verdict(_three_reports(perp_rays))
    assert verdict.verdict == "non-unique"
    assert verdict.failing == ("i", "ii")


def test_uniqueness_verdict_rejects_mixed_reports(half_line, perp_rays):
    reports = _three_reports(half_line)
    with pytest.raises(ReportMismatchError):
        uniqueness_verdict(reports[:2] + [condition_iii(perp_rays)])
    with pytest.raises(ReportMismatchError):
        uniqueness_verdict([reports[0], reports[0], reports[1]])


# ---------------------------------------------------------------------------
# tangent equivalence via sphere deviation
# ---------------------------------------------------------------------------


def _parabola_deviation_over_t(t: float) -> float:
    # independent evaluation for F(s) = (s, s**2) against the x-axis ray:
    # the sphere point at radius t solves s * sqrt(1 + s**2) = t, and its
    # distance to the ray is s**2; the reverse deviation is the distance from
    # the ray tip (t, 0) to the curve, minimized by ternary search (the
    # squared objective (s - t)**2 + s**4 is strictly convex)
    lo, hi = 0.0, t
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * math.sqrt(1.0 + mid * mid) < t:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    forward = s * s
    obj = lambda u: (u - t) ** 2 + u**4
    a, b = 0.0, 2.0 * t
    for _ in range(300):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if obj(m1) < obj(m2):
            b = m2
        else:
            a = m1
    reverse = math.sqrt(obj(0.5 * (a + b)))
    assert reverse < forward
    return forward / t


def test_equivalence_parabola_vs_tangent_ray(parabola):
    ray = curve_tangent_ray(parabola)
    report = tangent_equivalence_epsilon(parabola, ray)
    assert report.verdict == "pass"
    assert report.columns == ("t", "eps_over_t")
    profile = dict(report.rows)
    for t in (1e-1, 1e-2, 1e-3):
        assert profile[t] == pytest.approx(_parabola_deviation_over_t(t), abs=1e-9)
        assert profile[t] <= 1.1 * t
    assert report.metrics["final_ratio"] <= 1e-3


def test_equivalence_perpendicular_rays_fails(perp_rays):
    first, second = planar_ray_pair(perp_rays)
    report = tangent_equivalence_epsilon(first, second)
    assert report.verdict == "fail"
    # every sphere point of one ray sits at distance exactly t from the other
    assert report.metrics["final_ratio"] == pytest.approx(1.0, abs=1e-9)


def test_equivalence_requires_shared_marked_point(parabola):
    from pretangent import Ray

    shifted = Ray(origin=[1.0, 0.0], direction=[1.0, 0.0])
    with pytest.raises(ValueError, match="marked points"):
        tangent_equivalence_epsilon(parabola, shifted)
