"""Space oracle contract: metrics, spheres, probes, randomized audits."""

import math
from fractions import Fraction as F

import pytest

from pretangent import (
    FiniteSubsetSpace,
    InvalidPointError,
    MetricSpaceError,
    Point,
    SamplingContractError,
    metric_audit,
    radius_probe,
    sphere_sample,
)

AUDIT_TRIPLES = 4000


def test_audit_exact_spaces(half_line, cantor0, lacunary, perp_rays):
    for space in (half_line, cantor0, lacunary, perp_rays):
        report = metric_audit(space, triples=AUDIT_TRIPLES)
        assert report.ok, space.label
        assert report.max_symmetry_violation == 0.0
        assert report.max_triangle_violation == 0.0


def test_audit_sampled_space(parabola):
    report = metric_audit(parabola, triples=2000)
    assert report.ok


def test_audit_needs_three_points():
    lonely = FiniteSubsetSpace([0])
    with pytest.raises(MetricSpaceError):
        metric_audit(lonely, triples=10)


def test_half_line_sphere_is_singleton(half_line):
    sample = sphere_sample(half_line, F(1, 3))
    assert sample.exact
    assert len(sample) == 1
    assert sample.points[0].payload == F(1, 3)
    assert sample.radius == pytest.approx(1 / 3)


def test_sphere_rejects_bad_requests(half_line):
    with pytest.raises(ValueError):
        half_line.sphere(F(0))
    with pytest.raises(ValueError):
        half_line.sphere(F(-1, 2))
    with pytest.raises(ValueError):
        half_line.sphere(F(1, 2), budget=0)


def test_exact_space_refuses_band(half_line):
    with pytest.raises(SamplingContractError):
        half_line.sphere(F(1, 2), band=0.1)
    # non-strict mode coerces the band away instead
    sample = half_line.sphere(F(1, 2), band=0.1, strict=False)
    assert sample.band == 0.0
    assert len(sample) == 1


def test_deep_scale_radii_do_not_underflow(half_line, cantor0):
    # 3**-2080 underflows float to 0.0; exact spheres must still resolve it
    r = F(1, 3**2080)
    assert float(r) == 0.0
    for space in (half_line, cantor0):
        sample = space.sphere(r)
        assert len(sample) == 1
        assert space.distance_exact(sample.points[0], space.marked_point) == r


def test_point_tags_are_enforced(half_line, cantor0):
    foreign = cantor0.point(F(1, 3))
    with pytest.raises(InvalidPointError):
        half_line.distance(foreign, half_line.marked_point)
    with pytest.raises(InvalidPointError):
        half_line.check_point(Point("half-line-ish", F(1, 3)))


def test_cross_ray_distance(perp_rays):
    p = perp_rays.point_on_ray(0, F(1, 5))
    q = perp_rays.point_on_ray(1, F(1, 10))
    # the stored cosine is the exact value of the float cos(theta), so the
    # squared distance follows the law of cosines with that exact cosine
    expected_sq = F(1, 25) + F(1, 100) - 2 * F(1, 5) * F(1, 10) * perp_rays.cos_theta
    assert perp_rays.distance_sq_exact(p, q) == expected_sq
    assert perp_rays.distance(p, q) == pytest.approx(math.sqrt(0.05), abs=1e-15)
    # cross-ray distances only have exact squares, not exact values
    assert perp_rays.distance_exact(p, q) is None
    assert perp_rays.distance_exact(p, perp_rays.marked_point) == F(1, 5)


def test_radius_probe_reads_the_radius_set(cantor0, half_line):
    probe = radius_probe(cantor0, [F(1, 3), F(1, 2), F(1, 9)])
    assert probe.nonempty == (pytest.approx(1 / 3), pytest.approx(1 / 9))
    probe = radius_probe(half_line, [F(1, 4), F(1, 2), F(2)])
    assert probe.nonempty == probe.grid


def test_annulus_extremes_half_line(half_line):
    diameter, pair = half_line.annulus_extremes(F(1), F(2))
    assert diameter == pytest.approx(1.5)
    lo, hi = pair
    assert lo.payload == F(1, 2)
    assert hi.payload == F(2)


def test_annulus_extremes_cantor_snaps_to_members(cantor0):
    # bounds [1/6, 2/3] snap inward to the members 2/9 and 2/3
    diameter, pair = cantor0.annulus_extremes(F(1, 3), F(2))
    assert pair[0].payload == F(2, 9)
    assert pair[1].payload == F(2, 3)
    assert diameter == pytest.approx(float(F(2, 3) - F(2, 9)))


def test_empty_annulus_has_zero_diameter(cantor0):
    # (1/3, 2/3) is a removed middle third: shrink the window inside it
    diameter, pair = cantor0.annulus_extremes(F(1, 2), F(10, 9))
    assert diameter == 0.0
    assert pair is None


def test_finite_subset_requires_zero():
    from pretangent import SpaceValidationError

    with pytest.raises(SpaceValidationError):
        FiniteSubsetSpace([F(1, 2), F(1)])


def test_finite_subset_spheres_and_annuli():
    space = FiniteSubsetSpace([0, F(1, 4), F(1, 2), F(3, 4)])
    assert len(space.sphere(F(1, 4))) == 1
    assert space.sphere(F(1, 3), strict=False).empty
    diameter, pair = space.annulus_extremes(F(1, 2), F(2))
    assert (pair[0].payload, pair[1].payload) == (F(1, 4), F(3, 4))
    assert diameter == pytest.approx(0.5)
    assert space.nearest_radius(F(1, 3)) == F(1, 4)
    assert space.any_radius_leq(F(2, 3)) == F(1, 2)


def test_embeddings(half_line, perp_rays):
    x = half_line.embed(half_line.point(F(3, 2)))
    assert x.tolist() == [1.5]
    y = perp_rays.embed(perp_rays.point_on_ray(1, F(1)))
    assert y[0] == pytest.approx(0.0, abs=1e-15)
    assert y[1] == pytest.approx(1.0)
