"""Space constructions: scale families, curves, tangent rays, validation."""

import math
from fractions import Fraction as F

import numpy as np
import pytest

from pretangent import (
    CurveFamily,
    DegenerateRayError,
    LacunaryParams,
    PlanarRays,
    PolynomialCurve,
    Ray,
    RegionBetweenGraphs,
    RotationBody,
    SpaceSpec,
    SpaceValidationError,
    build_space,
    curve_tangent_ray,
    planar_ray_pair,
    sqrt_fraction,
)

# ---------------------------------------------------------------------------
# lacunary scale family
# ---------------------------------------------------------------------------


def test_lacunary_scale_ratios():
    params = LacunaryParams()
    params.validate()
    for n in range(1, 12):
        assert params.radius(n) == F(1, 3 ** (n * (n + 1) // 2))
        assert params.radius(n) / params.radius(n + 1) == 3 ** (n + 1)
    with pytest.raises(SpaceValidationError):
        params.radius(0)


def test_lacunary_atoms(lacunary):
    assert lacunary.coordinate(lacunary.atom("r", 3)) == F(1, 3**6)
    assert lacunary.coordinate(lacunary.atom("d", 2)) == F(2, 3**10)
    assert lacunary.coordinate(lacunary.marked_point) == 0
    # the doubled atom 2 r_{2n} sits strictly between r_{2n-1} and r_{2n}
    for n in (1, 2, 3):
        doubled = lacunary.coordinate(lacunary.atom("d", n))
        assert lacunary.scale.radius(2 * n) < doubled < lacunary.scale.radius(2 * n - 1)


def test_lacunary_sphere_hits_atoms_only(lacunary):
    assert len(lacunary.sphere(F(1, 3))) == 1
    assert len(lacunary.sphere(F(2, 3**10))) == 1
    assert lacunary.sphere(F(1, 2), strict=False).empty
    assert lacunary.nearest_radius(F(1, 2)) == F(1, 3)
    assert lacunary.any_radius_leq(F(1, 4)) == F(1, 27)


# ---------------------------------------------------------------------------
# curves and tangent rays
# ---------------------------------------------------------------------------


def test_parabola_sphere_solves_the_radius_equation(parabola):
    sample = parabola.sphere(0.5)
    assert len(sample) == 1
    t = sample.points[0].payload
    rho = math.hypot(t, t * t)
    assert rho == pytest.approx(0.5, abs=1e-12)


def test_parabola_exact_squared_distance(parabola):
    p = parabola.sphere(0.25).points[0]
    # squared distances come from exact polynomial evaluation at the float
    # parameters, so they agree with the float metric to full precision
    dsq = parabola.distance_sq_exact(p, parabola.marked_point)
    assert sqrt_fraction(dsq) == pytest.approx(0.25, abs=1e-12)


def test_curve_radii_stop_at_rho_max(parabola):
    assert parabola.rho_max == pytest.approx(math.sqrt(2.0))
    assert parabola.nearest_radius(2.0) is None
    assert parabola.nearest_radius(0.3) == 0.3
    assert parabola.any_radius_leq(5.0) == pytest.approx(math.sqrt(2.0))


def test_tangent_ray_of_a_parabola(parabola):
    ray = curve_tangent_ray(parabola)
    assert ray.direction.tolist() == [1.0, 0.0]
    assert ray.origin.tolist() == [0.0, 0.0]


def test_tangent_ray_in_three_coordinates():
    # F(t) = (t, t**3, t**2) has derivative (1, 0, 0) at t = 0
    curve = PolynomialCurve(coefficients=[[0, 1], [0, 0, 0, 1], [0, 0, 1]])
    ray = curve_tangent_ray(curve)
    assert ray.direction.tolist() == [1.0, 0.0, 0.0]


def test_tangent_ray_needs_a_nonzero_derivative():
    flat = PolynomialCurve(coefficients=[[0, 0, 1], [0, 0, 0, 1]])
    with pytest.raises(DegenerateRayError):
        curve_tangent_ray(flat)


def test_ray_normalizes_direction():
    ray = Ray(origin=[0, 0], direction=[3, 4])
    assert np.allclose(ray.direction, [0.6, 0.8])
    tip = ray.sphere(F(5)).points[0]
    assert ray.embed(tip).tolist() == [3.0, 4.0]
    with pytest.raises(DegenerateRayError):
        Ray(origin=[0, 0], direction=[0, 0])


def test_planar_ray_pair_matches_the_opening_angle():
    space = PlanarRays(theta=math.pi / 3)
    first, second = planar_ray_pair(space)
    assert first.label == "ray-0"
    assert second.label == "ray-1"
    assert np.allclose(first.direction, [1.0, 0.0])
    assert np.allclose(second.direction, [math.cos(math.pi / 3), math.sin(math.pi / 3)])


def test_curve_family_shares_value_and_slope():
    family = CurveFamily(branches=[[0, 1, 1], [0, 1, -1]])
    sample = family.sphere(0.25)
    assert not sample.empty
    branches = {p.payload[0] for p in sample}
    assert branches == {0, 1}
    with pytest.raises(SpaceValidationError):
        CurveFamily(branches=[[0, 1, 1]])
    with pytest.raises(SpaceValidationError):
        CurveFamily(branches=[[0, 1, 1], [0, 2, 1]])
    with pytest.raises(SpaceValidationError):
        CurveFamily(branches=[[0, 1, 1], [1, 1, 1]])


def test_region_sphere_points_are_members():
    region = RegionBetweenGraphs(f1=[0, 0, 1], f2=[0, 0, -1])
    sample = region.sphere(0.3)
    assert len(sample) >= 8
    for p in sample:
        x, y = p.payload
        assert region.member(x, y, slack=1e-9)
        assert math.hypot(x, y) == pytest.approx(0.3, abs=1e-9)
    with pytest.raises(SpaceValidationError):
        RegionBetweenGraphs(f1=[0, 0, 1], f2=[1, 0, -1])


def test_rotation_body_sphere_points_are_members():
    body = RotationBody(alpha=0.5)
    sample = body.sphere(0.4)
    assert len(sample) >= 8
    for p in sample:
        x, y, z = p.payload
        assert body.member(x, y, z, slack=1e-9)
        assert math.sqrt(x * x + y * y + z * z) == pytest.approx(0.4, abs=1e-9)
    assert body.sphere(1.5, strict=False).empty
    with pytest.raises(SpaceValidationError):
        RotationBody(alpha=0.0)


# ---------------------------------------------------------------------------
# declarative construction
# ---------------------------------------------------------------------------


def test_build_space_round_trip():
    space = build_space({"kind": "half-line"})
    assert space.kind == "half-line"
    space = build_space(SpaceSpec(kind="cantor", params={"marked": 1}))
    assert space.marked_end == 1
    space = build_space({"kind": "planar-rays", "theta": math.pi})
    assert space.theta == math.pi


def test_build_space_rejects_bad_specs():
    with pytest.raises(SpaceValidationError, match="unknown kind"):
        build_space({"kind": "moebius"})
    with pytest.raises(SpaceValidationError, match="unknown parameter"):
        build_space({"kind": "half-line", "slope": 2})
    with pytest.raises(SpaceValidationError, match="theta"):
        build_space({"kind": "planar-rays"})
    with pytest.raises(SpaceValidationError, match="marked"):
        build_space({"kind": "cantor", "marked": 2})
    with pytest.raises(SpaceValidationError, match="theta"):
        PlanarRays(theta=0.0)
    with pytest.raises(SpaceValidationError, match="degree"):
        PolynomialCurve(coefficients=[[0] * 12])
    with pytest.raises(SpaceValidationError, match="missing"):
        SpaceSpec.from_dict({"theta": 1.0})
