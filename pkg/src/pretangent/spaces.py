"""Concrete pointed metric spaces.

The corpus splits into exact spaces, whose spheres and annuli are enumerated
in rational arithmetic (half-line, middle-thirds set, lacunary atom set,
crossing rays), and sampled spaces, whose spheres are found numerically
(polynomial curves, curve families, the region between two graphs, and a
rotation body).  All of them share the oracle contract from `core`.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .core import (
    InvalidPointError,
    Point,
    Radius,
    SpaceOracle,
)
from .ternary import (
    DECISION_DEPTH,
    cantor_max_leq,
    cantor_min_geq,
    is_cantor,
)

RationalLike = Union[int, float, str, Fraction]


class SpaceValidationError(ValueError):
    """A space specification fails validation; the message names the field."""


class DegenerateRayError(SpaceValidationError):
    """A tangent ray was requested where the curve has zero derivative."""


def _fraction(x: RationalLike, field: str) -> Fraction:
    try:
        if isinstance(x, float):
            return Fraction(str(x))
        return Fraction(x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise SpaceValidationError(f"{field}: not a rational value: {x!r}") from exc


def sqrt_fraction(f: Fraction) -> float:
    """Float square root of a nonnegative rational, tolerant of huge exponents."""
    if f == 0:
        return 0.0
    num, den = f.numerator, f.denominator
    shift = num.bit_length() - den.bit_length()
    # Center the value near 1 before converting, so intermediate floats
    # neither overflow nor flush to zero; fold the shift back in afterwards.
    half = shift // 2
    centered = f / (Fraction(4) ** half)
    return math.sqrt(float(centered)) * math.ldexp(1.0, half)


# ---------------------------------------------------------------------------
# line-like spaces: subsets of the real line under |x - y|
# ---------------------------------------------------------------------------


class LineLikeSpace(SpaceOracle):
    """A subset of the real line with the absolute-difference metric.

    Subclasses provide rational coordinates for points; distances are exact.
    """

    exact = True

    def coordinate(self, p: Point) -> Fraction:
        self.check_point(p)
        return self._coordinate(p)

    def _coordinate(self, p: Point) -> Fraction:
        return p.payload

    @property
    def marked_coordinate(self) -> Fraction:
        return self._coordinate(self.marked_point)

    def _distance(self, p: Point, q: Point) -> float:
        return float(abs(self._coordinate(p) - self._coordinate(q)))

    def distance_exact(self, p: Point, q: Point) -> Optional[Fraction]:
        self.check_point(p)
        self.check_point(q)
        return abs(self._coordinate(p) - self._coordinate(q))

    def embed(self, p: Point) -> np.ndarray:
        return np.array([float(self.coordinate(p))])


class HalfLine(LineLikeSpace):
    """The half-line [0, oo) marked at 0."""

    kind = "half-line"

    def __init__(self, label: Optional[str] = None):
        super().__init__(label=label)
        self._marked = Point(self.kind, Fraction(0))

    @property
    def marked_point(self) -> Point:
        return self._marked

    def point(self, x: RationalLike) -> Point:
        x = _fraction(x, "coordinate")
        if x < 0:
            raise InvalidPointError(f"half-line has no point at {x}")
        return Point(self.kind, x)

    def _sphere_points(self, r: Fraction, band: float, budget: int) -> list[Point]:
        return [Point(self.kind, r)]

    def nearest_radius(self, target: Radius) -> Fraction:
        return _fraction(target, "radius")

    def any_radius_leq(self, r: Radius) -> Fraction:
        return _fraction(r, "radius")

    def annulus_extremes(self, r, k, budget: int = 256):
        r = _fraction(r, "radius")
        k = _fraction(k, "annulus ratio")
        lo, hi = r / k, r * k
        return float(hi - lo), (Point(self.kind, lo), Point(self.kind, hi))

    def min_ambient_distance(self, xyz: np.ndarray) -> float:
        x = float(xyz[0])
        return max(0.0, -x)


class FiniteSubsetSpace(LineLikeSpace):
    """A finite subset of [0, oo) containing 0, marked at 0.

    Useful as a subspace probe: any uniqueness or stability statement that
    holds on the half-line must survive restriction to such subsets.
    """

    kind = "finite-subset"

    def __init__(self, points: Sequence[RationalLike], label: Optional[str] = None):
        super().__init__(label=label)
        coords = sorted({_fraction(x, "points") for x in points})
        if not coords or coords[0] != 0:
            raise SpaceValidationError("points: must contain 0")
        if any(c < 0 for c in coords):
            raise SpaceValidationError("points: must be nonnegative")
        self.coords = tuple(coords)
        self._marked = Point(self.kind, Fraction(0))

    @property
    def marked_point(self) -> Point:
        return self._marked

    def params(self) -> dict:
        return {"points": [str(c) for c in self.coords]}

    def _sphere_points(self, r: Fraction, band: float, budget: int) -> list[Point]:
        return [Point(self.kind, r)] if r in self.coords else []

    def nearest_radius(self, target: Radius) -> Optional[Fraction]:
        target = _fraction(target, "radius")
        radii = self.coords[1:]
        if not radii:
            return None
        return min(radii, key=lambda c: (abs(c - target), c))

    def any_radius_leq(self, r: Radius) -> Optional[Fraction]:
        r = _fraction(r, "radius")
        below = [c for c in self.coords[1:] if c <= r]
        return below[-1] if below else None

    def annulus_extremes(self, r, k, budget: int = 256):
        r = _fraction(r, "radius")
        k = _fraction(k, "annulus ratio")
        inside = [c for c in self.coords if r / k <= c <= r * k]
        if not inside:
            return 0.0, None
        lo, hi = inside[0], inside[-1]
        return float(hi - lo), (Point(self.kind, lo), Point(self.kind, hi))


class CantorSpace(LineLikeSpace):
    """The middle-thirds set on [0, 1], marked at either endpoint.

    Point payloads are the rational positions themselves; the marked endpoint
    is 0 or 1.  Spheres about the marked point are singletons or empty, and
    annuli are located exactly through nearest-member digit walks.
    """

    kind = "cantor"

    def __init__(self, marked: int = 0, membership_depth: int = 48, label: Optional[str] = None):
        super().__init__(label=label)
        if marked not in (0, 1):
            raise SpaceValidationError(f"marked: must be 0 or 1, got {marked!r}")
        self.marked_end = marked
        self.membership_depth = int(membership_depth)
        self._marked = Point(self.kind, Fraction(marked))

    @property
    def marked_point(self) -> Point:
        return self._marked

    def params(self) -> dict:
        return {"marked": self.marked_end, "membership_depth": self.membership_depth}

    def point(self, x: RationalLike) -> Point:
        x = _fraction(x, "coordinate")
        # constructing a point needs a definitive answer, so decide at the
        # full walk depth; membership_depth only bounds user-facing queries
        depth = max(self.membership_depth, DECISION_DEPTH)
        if not is_cantor(x, depth=depth).is_member:
            raise InvalidPointError(f"{x} is not a member of the middle-thirds set")
        return Point(self.kind, x)

    def _position(self, r: Fraction) -> Fraction:
        # the unique candidate position at distance r from the marked endpoint
        return r if self.marked_end == 0 else 1 - r

    def _sphere_points(self, r: Fraction, band: float, budget: int) -> list[Point]:
        pos = self._position(r)
        if not (0 <= pos <= 1):
            return []
        # decide at the full walk depth: radii coming from the nearest-member
        # walks are genuine members whose decision can need many digits
        depth = max(self.membership_depth, DECISION_DEPTH)
        if is_cantor(pos, depth=depth).is_member:
            return [Point(self.kind, pos)]
        return []

    def nearest_radius(self, target: Radius) -> Optional[Fraction]:
        target = _fraction(target, "radius")
        # the radius set is {|x - a| : x in C}; by the 1 - C = C symmetry it
        # equals C itself for either marked endpoint
        lo = cantor_max_leq(min(target, Fraction(1)))
        hi = cantor_min_geq(max(target, Fraction(0)))
        options = [c for c in (lo, hi) if c is not None]
        if not options:
            return None
        return min(options, key=lambda c: (abs(c - target), c))

    def any_radius_leq(self, r: Radius) -> Optional[Fraction]:
        r = _fraction(r, "radius")
        return cantor_max_leq(min(r, Fraction(1)))

    def annulus_extremes(self, r, k, budget: int = 256):
        r = _fraction(r, "radius")
        k = _fraction(k, "annulus ratio")
        if self.marked_end == 0:
            lo_b, hi_b = r / k, min(r * k, Fraction(1))
        else:
            lo_b, hi_b = max(1 - r * k, Fraction(0)), 1 - r / k
        if lo_b > hi_b:
            return 0.0, None
        lo = cantor_min_geq(lo_b)
        hi = cantor_max_leq(hi_b)
        if lo is None or hi is None or lo > hi:
            return 0.0, None
        return float(hi - lo), (Point(self.kind, lo), Point(self.kind, hi))

    def min_ambient_distance(self, xyz: np.ndarray) -> float:
        x = Fraction(str(float(xyz[0])))
        options = []
        lo = cantor_max_leq(min(x, Fraction(1)))
        hi = cantor_min_geq(max(x, Fraction(0)))
        if lo is not None:
            options.append(abs(x - lo))
        if hi is not None:
            options.append(abs(hi - x))
        return float(min(options))


@functools.lru_cache(maxsize=4096)
def _lacunary_radius(n: int) -> Fraction:
    return Fraction(1, 3 ** (n * (n + 1) // 2))


@dataclass(frozen=True)
class LacunaryParams:
    """The scale family r_n = 3**(-n(n+1)/2) and its doubled even subfamily.

    Consecutive scales satisfy r_n / r_{n+1} = 3**(n+1), so the family is
    lacunary: gaps between atoms grow without bound on the logarithmic scale.
    """

    max_check: int = 40

    def radius(self, n: int) -> Fraction:
        if n < 1:
            raise SpaceValidationError(f"scale index must be >= 1, got {n}")
        return _lacunary_radius(n)

    def validate(self) -> None:
        for n in range(1, self.max_check + 1):
            r_n, r_next = self.radius(n), self.radius(n + 1)
            if not r_n > 2 * r_next:
                raise SpaceValidationError(f"scale family not lacunary at n={n}")
            if r_n / r_next != 3 ** (n + 1):
                raise SpaceValidationError(f"scale ratio wrong at n={n}")


class LacunarySpace(LineLikeSpace):
    """The countable set {r_n} U {2 r_{2n}} U {0}, marked at 0.

    Payloads are index pairs ("r", n), ("d", n) (the doubled atom 2 r_{2n}),
    or ("z", 0) for the marked point, so coordinates of arbitrarily deep atoms
    stay exactly representable.
    """

    kind = "lacunary"

    def __init__(self, params: Optional[LacunaryParams] = None, label: Optional[str] = None):
        super().__init__(label=label)
        self.scale = params or LacunaryParams()
        self._marked = Point(self.kind, ("z", 0))

    @property
    def marked_point(self) -> Point:
        return self._marked

    def params(self) -> dict:
        return {"scale_rule": "r_n = 3**(-n(n+1)/2)"}

    def _coordinate(self, p: Point) -> Fraction:
        tag, n = p.payload
        if tag == "z":
            return Fraction(0)
        if tag == "r":
            return self.scale.radius(n)
        if tag == "d":
            return 2 * self.scale.radius(2 * n)
        raise InvalidPointError(f"unknown lacunary payload {p.payload!r}")

    def atom(self, tag: str, n: int) -> Point:
        p = Point(self.kind, (tag, n))
        self._coordinate(p)  # validates
        return p

    def _atoms_descending(self, floor: Fraction):
        """Yield (value, point) for every atom >= floor, in descending order.

        Atom order is r_1 > 2 r_2 > r_2 > r_3 > 2 r_4 > r_4 > ... since
        2 r_n < r_{n-1} for every n.
        """
        if floor <= 0:
            raise ValueError("atom enumeration needs a positive floor")
        n = 1
        while True:
            r_n = self.scale.radius(n)
            if n % 2 == 0 and 2 * r_n >= floor:
                yield 2 * r_n, Point(self.kind, ("d", n // 2))
            if r_n < floor:
                return
            yield r_n, Point(self.kind, ("r", n))
            n += 1

    def _sphere_points(self, r: Fraction, band: float, budget: int) -> list[Point]:
        for value, point in self._atoms_descending(r):
            if value == r:
                return [point]
            if value < r:
                break
        return []

    def nearest_radius(self, target: Radius) -> Optional[Fraction]:
        target = _fraction(target, "radius")
        if target <= 0:
            target = Fraction(1, 10**9)
        floor = target / 8
        candidates = [value for value, _ in self._atoms_descending(floor)]
        # atoms below the floor can still win across a lacunary gap; the
        # largest few suffice, everything deeper is strictly farther away
        n = 1
        while self.scale.radius(n) >= floor:
            n += 1
        if n % 2 == 0:
            candidates.append(2 * self.scale.radius(n))
        candidates.append(self.scale.radius(n))
        if (n + 1) % 2 == 0:
            candidates.append(2 * self.scale.radius(n + 1))
        return min(candidates, key=lambda c: (abs(c - target), c))

    def any_radius_leq(self, r: Radius) -> Optional[Fraction]:
        r = _fraction(r, "radius")
        if r <= 0:
            return None
        n = 1
        while self.scale.radius(n) > r:
            n += 1
        return self.scale.radius(n)

    def annulus_extremes(self, r, k, budget: int = 256):
        r = _fraction(r, "radius")
        k = _fraction(k, "annulus ratio")
        lo_b, hi_b = r / k, r * k
        inside = [
            (value, point)
            for value, point in self._atoms_descending(lo_b)
            if lo_b <= value <= hi_b
        ]
        if not inside:
            return 0.0, None
        values = sorted(inside, key=lambda vp: vp[0])
        lo, hi = values[0], values[-1]
        return float(hi[0] - lo[0]), (lo[1], hi[1])


# ---------------------------------------------------------------------------
# planar rays
# ---------------------------------------------------------------------------


class PlanarRays(SpaceOracle):
    """Two rays from a common origin in the plane, marked at the origin.

    Payloads are (ray index, rational radius).  Same-ray distances are exact
    rationals; cross-ray distances have exact rational squares (the cosine of
    the opening angle enters as an exact binary fraction), so rescaled limits
    can be formed without underflow.
    """

    kind = "planar-rays"
    exact = True

    def __init__(self, theta: float, label: Optional[str] = None):
        super().__init__(label=label)
        theta = float(theta)
        if not (0 < theta <= math.pi):
            raise SpaceValidationError(f"theta: must lie in (0, pi], got {theta}")
        self.theta = theta
        self.cos_theta = Fraction(math.cos(theta))
        self._marked = Point(self.kind, (0, Fraction(0)))

    @property
    def marked_point(self) -> Point:
        return self._marked

    def params(self) -> dict:
        return {"theta": self.theta}

    def point_on_ray(self, ray: int, radius: RationalLike) -> Point:
        if ray not in (0, 1):
            raise InvalidPointError(f"ray index must be 0 or 1, got {ray}")
        radius = _fraction(radius, "radius")
        if radius < 0:
            raise InvalidPointError("ray radius must be >= 0")
        return Point(self.kind, (ray, radius))

    def _cross_sq(self, r1: Fraction, r2: Fraction) -> Fraction:
        return r1 * r1 + r2 * r2 - 2 * r1 * r2 * self.cos_theta

    def distance_sq_exact(self, p: Point, q: Point) -> Fraction:
        self.check_point(p)
        self.check_point(q)
        (ray_p, r_p), (ray_q, r_q) = p.payload, q.payload
        if ray_p == ray_q:
            d = abs(r_p - r_q)
            return d * d
        if r_p == 0 or r_q == 0:
            d = max(r_p, r_q)
            return d * d
        return self._cross_sq(r_p, r_q)

    def distance_exact(self, p: Point, q: Point) -> Optional[Fraction]:
        self.check_point(p)
        self.check_point(q)
        (ray_p, r_p), (ray_q, r_q) = p.payload, q.payload
        if ray_p == ray_q:
            return abs(r_p - r_q)
        if r_p == 0 or r_q == 0:
            return max(r_p, r_q)
        return None

    def _distance(self, p: Point, q: Point) -> float:
        exact = self.distance_exact(p, q)
        if exact is not None:
            return float(exact)
        return sqrt_fraction(self.distance_sq_exact(p, q))

    def _sphere_points(self, r: Fraction, band: float, budget: int) -> list[Point]:
        return [Point(self.kind, (0, r)), Point(self.kind, (1, r))]

    def nearest_radius(self, target: Radius) -> Fraction:
        return _fraction(target, "radius")

    def any_radius_leq(self, r: Radius) -> Fraction:
        return _fraction(r, "radius")

    def annulus_extremes(self, r, k, budget: int = 256):
        r = _fraction(r, "radius")
        k = _fraction(k, "annulus ratio")
        lo, hi = r / k, r * k
        same = (hi - lo) * (hi - lo)
        candidates = [
            (same, (Point(self.kind, (0, lo)), Point(self.kind, (0, hi)))),
            (self._cross_sq(hi, hi), (Point(self.kind, (0, hi)), Point(self.kind, (1, hi)))),
            (self._cross_sq(lo, hi), (Point(self.kind, (0, lo)), Point(self.kind, (1, hi)))),
            (self._cross_sq(lo, lo), (Point(self.kind, (0, lo)), Point(self.kind, (1, lo)))),
        ]
        # cross-ray squared distance is convex in each radius, so the maximum
        # over the annulus rectangle is attained at one of these corners
        best_sq, pair = max(candidates, key=lambda c: c[0])
        return sqrt_fraction(best_sq), pair

    def embed(self, p: Point) -> np.ndarray:
        self.check_point(p)
        ray, radius = p.payload
        r = float(radius)
        if ray == 0:
            return np.array([r, 0.0])
        return np.array([r * math.cos(self.theta), r * math.sin(self.theta)])

    def min_ambient_distance(self, xyz: np.ndarray) -> float:
        return min(
            _distance_to_ray(xyz, np.zeros(2), np.array([1.0, 0.0])),
            _distance_to_ray(
                xyz, np.zeros(2), np.array([math.cos(self.theta), math.sin(self.theta)])
            ),
        )


def _distance_to_ray(x: np.ndarray, origin: np.ndarray, direction: np.ndarray) -> float:
    v = np.asarray(x, dtype=float) - origin
    s = max(0.0, float(np.dot(v, direction)))
    return float(np.linalg.norm(v - s * direction))


class Ray(LineLikeSpace):
    """A single ray from an origin in Euclidean space, marked at the origin.

    Intrinsically this is the half-line; the embedding records where the ray
    sits in the ambient space, which is what tangent-equivalence comparisons
    need.
    """

    kind = "ray"

    def __init__(self, origin: Sequence[float], direction: Sequence[float], label=None):
        super().__init__(label=label)
        self.origin = np.asarray(origin, dtype=float)
        direction = np.asarray(direction, dtype=float)
        norm = float(np.linalg.norm(direction))
        if norm == 0.0:
            raise DegenerateRayError("direction: must be a nonzero vector")
        self.direction = direction / norm
        self._marked = Point(self.kind, Fraction(0))

    @property
    def marked_point(self) -> Point:
        return self._marked

    def params(self) -> dict:
        return {"origin": self.origin.tolist(), "direction": self.direction.tolist()}

    def _sphere_points(self, r: Fraction, band: float, budget: int) -> list[Point]:
        return [Point(self.kind, r)]

    def nearest_radius(self, target: Radius) -> Fraction:
        return _fraction(target, "radius")

    def any_radius_leq(self, r: Radius) -> Fraction:
        return _fraction(r, "radius")

    def annulus_extremes(self, r, k, budget: int = 256):
        r = _fraction(r, "radius")
        k = _fraction(k, "annulus ratio")
        lo, hi = r / k, r * k
        return float(hi - lo), (Point(self.kind, lo), Point(self.kind, hi))

    def embed(self, p: Point) -> np.ndarray:
        self.check_point(p)
        return self.origin + float(p.payload) * self.direction

    def min_ambient_distance(self, xyz: np.ndarray) -> float:
        return _distance_to_ray(xyz, self.origin, self.direction)


# ---------------------------------------------------------------------------
# polynomial curves and derived sampled spaces
# ---------------------------------------------------------------------------

MAX_CURVE_DEGREE = 8


def _coeff_row(row: Sequence[RationalLike], field: str) -> tuple[Fraction, ...]:
    coeffs = tuple(_fraction(c, field) for c in row)
    if len(coeffs) - 1 > MAX_CURVE_DEGREE:
        raise SpaceValidationError(
            f"{field}: degree {len(coeffs) - 1} exceeds the supported maximum {MAX_CURVE_DEGREE}"
        )
    if not coeffs:
        raise SpaceValidationError(f"{field}: empty coefficient row")
    return coeffs


def _poly_eval_exact(coeffs: tuple[Fraction, ...], t: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def _poly_eval_float(coeffs: tuple[Fraction, ...], t: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(t, dtype=float)
    for c in reversed(coeffs):
        acc = acc * t + float(c)
    return acc


def _bisect_root(fun, lo: float, hi: float, iterations: int = 90) -> float:
    f_lo = fun(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        f_mid = fun(mid)
        if f_mid == 0.0:
            return mid
        if (f_lo < 0) == (f_mid < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo <= 1e-17 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


class PolynomialCurve(SpaceOracle):
    """A polynomial arc F: [0, 1] -> E^n with the ambient Euclidean metric.

    Marked at F(0).  Sphere points are parameters t with |F(t) - F(0)| = r,
    found by sign-change scanning plus bisection; the solver leaves residuals
    far below any sampling band we use.
    """

    kind = "curve"
    exact = False

    def __init__(
        self,
        coefficients: Sequence[Sequence[RationalLike]],
        band: float = 1e-4,
        label: Optional[str] = None,
    ):
        super().__init__(label=label, band=band)
        if not coefficients:
            raise SpaceValidationError("coefficients: at least one coordinate required")
        self.coefficients = tuple(
            _coeff_row(row, f"coefficients[{i}]") for i, row in enumerate(coefficients)
        )
        self.origin = np.array([float(row[0]) for row in self.coefficients])
        self._marked = Point(self.kind, 0.0)
        self._grid = np.concatenate(([0.0], np.geomspace(1e-13, 1.0, 1536)))
        self._grid_rho = self._rho(self._grid)
        self.rho_max = float(self._grid_rho.max())

    @property
    def marked_point(self) -> Point:
        return self._marked

    def params(self) -> dict:
        return {"coefficients": [[str(c) for c in row] for row in self.coefficients]}

    def derivative_at_start(self) -> np.ndarray:
        return np.array(
            [float(row[1]) if len(row) > 1 else 0.0 for row in self.coefficients]
        )

    def at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.stack([_poly_eval_float(row, t) for row in self.coefficients], axis=-1)

    def _rho(self, t) -> np.ndarray:
        delta = self.at(t) - self.origin
        return np.sqrt(np.sum(delta * delta, axis=-1))

    def _distance(self, p: Point, q: Point) -> float:
        delta = self.at(p.payload) - self.at(q.payload)
        return float(np.linalg.norm(delta))

    def distance_sq_exact(self, p: Point, q: Point) -> Fraction:
        self.check_point(p)
        self.check_point(q)
        t_p, t_q = Fraction(p.payload), Fraction(q.payload)
        total = Fraction(0)
        for row in self.coefficients:
            diff = _poly_eval_exact(row, t_p) - _poly_eval_exact(row, t_q)
            total += diff * diff
        return total

    def _sphere_points(self, r: float, band: float, budget: int) -> list[Point]:
        vals = self._grid_rho - r
        roots: list[float] = []
        for i in range(len(self._grid) - 1):
            a, b = vals[i], vals[i + 1]
            if a == 0.0:
                roots.append(float(self._grid[i]))
            elif (a < 0) != (b < 0):
                roots.append(
                    _bisect_root(
                        lambda t: float(self._rho(np.array([t]))[0]) - r,
                        float(self._grid[i]),
                        float(self._grid[i + 1]),
                    )
                )
            if len(roots) >= budget:
                break
        if vals[-1] == 0.0 and len(roots) < budget:
            roots.append(float(self._grid[-1]))
        return [Point(self.kind, t) for t in roots]

    def nearest_radius(self, target: Radius) -> Optional[float]:
        target = float(target)
        return target if 0 < target <= self.rho_max else None

    def any_radius_leq(self, r: Radius) -> Optional[float]:
        r = float(r)
        return min(r, self.rho_max) if r > 0 else None

    def embed(self, p: Point) -> np.ndarray:
        self.check_point(p)
        return self.at(p.payload)

    def min_ambient_distance(self, xyz: np.ndarray) -> float:
        xyz = np.asarray(xyz, dtype=float)
        delta = self.at(self._grid) - xyz
        dist = np.sqrt(np.sum(delta * delta, axis=-1))
        i = int(np.argmin(dist))
        lo = float(self._grid[max(0, i - 1)])
        hi = float(self._grid[min(len(self._grid) - 1, i + 1)])
        # golden-section polish of the 1-d distance profile on the bracket
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c = b - phi * (b - a)
        d = a + phi * (b - a)
        f = lambda t: float(np.linalg.norm(self.at(t) - xyz))
        fc, fd = f(c), f(d)
        for _ in range(80):
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - phi * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + phi * (b - a)
                fd = f(d)
        return min(fc, fd, float(dist[i]))


def curve_tangent_ray(curve: PolynomialCurve) -> Ray:
    """The one-sided tangent ray of a curve at its marked start point."""
    direction = curve.derivative_at_start()
    if float(np.linalg.norm(direction)) == 0.0:
        raise DegenerateRayError(
            "coefficients: curve has zero derivative at t = 0, no tangent ray exists"
        )
    return Ray(origin=curve.origin, direction=direction, label=f"{curve.label}-tangent-ray")


class CurveFamily(SpaceOracle):
    """A finite union of polynomial graphs sharing value and slope at x = 0.

    Points are (branch index, parameter) pairs; the metric is the ambient
    planar metric on (x, f_branch(x)).
    """

    kind = "curve-family"
    exact = False

    def __init__(
        self,
        branches: Sequence[Sequence[RationalLike]],
        band: float = 1e-4,
        label: Optional[str] = None,
    ):
        super().__init__(label=label, band=band)
        if len(branches) < 2:
            raise SpaceValidationError("branches: at least two graphs required")
        self.branches = tuple(
            _coeff_row(row, f"branches[{i}]") for i, row in enumerate(branches)
        )
        values = {row[0] for row in self.branches}
        if len(values) != 1:
            raise SpaceValidationError("branches: graphs must share the value at x = 0")
        slopes = {row[1] if len(row) > 1 else Fraction(0) for row in self.branches}
        if len(slopes) != 1:
            raise SpaceValidationError("branches: graphs must share the slope at x = 0")
        self.common_value = float(self.branches[0][0])
        self._curves = tuple(
            PolynomialCurve(
                [[0, 1], list(row)], band=band, label=f"{self.label}-branch{i}"
            )
            for i, row in enumerate(self.branches)
        )
        self._marked = Point(self.kind, (0, 0.0))
        self.rho_max = max(c.rho_max for c in self._curves)

    @property
    def marked_point(self) -> Point:
        return self._marked

    def params(self) -> dict:
        return {"branches": [[str(c) for c in row] for row in self.branches]}

    def _embed_payload(self, payload) -> np.ndarray:
        branch, t = payload
        return self._curves[branch].at(t)

    def _distance(self, p: Point, q: Point) -> float:
        return float(np.linalg.norm(self._embed_payload(p.payload) - self._embed_payload(q.payload)))

    def distance_sq_exact(self, p: Point, q: Point) -> Fraction:
        self.check_point(p)
        self.check_point(q)
        (bp, tp), (bq, tq) = p.payload, q.payload
        total = Fraction(0)
        tp_f, tq_f = Fraction(tp), Fraction(tq)
        for row_p, row_q in zip(
            self._curves[bp].coefficients, self._curves[bq].coefficients
        ):
            diff = _poly_eval_exact(row_p, tp_f) - _poly_eval_exact(row_q, tq_f)
            total += diff * diff
        return total

    def _sphere_points(self, r: float, band: float, budget: int) -> list[Point]:
        per = max(1, budget // len(self._curves))
        points: list[Point] = []
        for i, curve in enumerate(self._curves):
            for cp in curve._sphere_points(r, band, per):
                points.append(Point(self.kind, (i, cp.payload)))
        return points[:budget]

    def nearest_radius(self, target: Radius) -> Optional[float]:
        target = float(target)
        return target if 0 < target <= self.rho_max else None

    def any_radius_leq(self, r: Radius) -> Optional[float]:
        r = float(r)
        return min(r, self.rho_max) if r > 0 else None

    def embed(self, p: Point) -> np.ndarray:
        self.check_point(p)
        return self._embed_payload(p.payload)

    def min_ambient_distance(self, xyz: np.ndarray) -> float:
        return min(c.min_ambient_distance(xyz) for c in self._curves)


class RegionBetweenGraphs(SpaceOracle):
    """The closed planar region between two graphs over [0, 1], marked at x = 0.

    The graphs must agree at x = 0; the region is all (x, y) with y between
    them.  Sphere sampling sweeps the convex-combination fibration of the two
    boundary graphs and solves each fiber curve for the requested radius, so
    every emitted point sits on the sphere up to solver residual and passes
    the membership predicate by construction.
    """

    kind = "region-between-graphs"
    exact = False

    def __init__(
        self,
        f1: Sequence[RationalLike],
        f2: Sequence[RationalLike],
        band: float = 1e-4,
        label: Optional[str] = None,
    ):
        super().__init__(label=label, band=band)
        self.f1 = _coeff_row(f1, "f1")
        self.f2 = _coeff_row(f2, "f2")
        if self.f1[0] != self.f2[0]:
            raise SpaceValidationError("f1, f2: graphs must agree at x = 0")
        self.common_value = float(self.f1[0])
        self._marked = Point(self.kind, (0.0, self.common_value))
        # every fiber curve reaches distance >= 1 at x = 1, so radii up to 1
        # are guaranteed to be crossed on every fiber
        self.rho_max = 1.0

    @property
    def marked_point(self) -> Point:
        return self._marked

    def params(self) -> dict:
        return {
            "f1": [str(c) for c in self.f1],
            "f2": [str(c) for c in self.f2],
        }

    def member(self, x: float, y: float, slack: float = 1e-12) -> bool:
        if not (-slack <= x <= 1 + slack):
            return False
        y1 = float(_poly_eval_float(self.f1, np.array([x]))[0])
        y2 = float(_poly_eval_float(self.f2, np.array([x]))[0])
        lo, hi = min(y1, y2), max(y1, y2)
        return lo - slack <= y <= hi + slack

    def _distance(self, p: Point, q: Point) -> float:
        (x1, y1), (x2, y2) = p.payload, q.payload
        return math.hypot(x1 - x2, y1 - y2)

    def _fiber_y(self, lam: float, x: np.ndarray) -> np.ndarray:
        return (1.0 - lam) * _poly_eval_float(self.f1, x) + lam * _poly_eval_float(
            self.f2, x
        )

    def _sphere_points(self, r: float, band: float, budget: int) -> list[Point]:
        n_lam = max(2, min(64, budget))
        points: list[Point] = []
        xs = np.linspace(0.0, 1.0, 512)
        for lam in np.linspace(0.0, 1.0, n_lam):
            ys = self._fiber_y(lam, xs)
            rho = np.hypot(xs, ys - self.common_value)
            vals = rho - r
            root = None
            for i in range(len(xs) - 1):
                if vals[i] == 0.0:
                    root = float(xs[i])
                    break
                if (vals[i] < 0) != (vals[i + 1] < 0):
                    fiber = lambda x: math.hypot(
                        x, float(self._fiber_y(lam, np.array([x]))[0]) - self.common_value
                    ) - r
                    root = _bisect_root(fiber, float(xs[i]), float(xs[i + 1]))
                    break
            if root is None:
                continue
            y = float(self._fiber_y(lam, np.array([root]))[0])
            if self.member(root, y, slack=1e-9):
                points.append(Point(self.kind, (root, y)))
            if len(points) >= budget:
                break
        return points

    def nearest_radius(self, target: Radius) -> Optional[float]:
        target = float(target)
        return target if 0 < target <= self.rho_max else None

    def any_radius_leq(self, r: Radius) -> Optional[float]:
        r = float(r)
        return min(r, self.rho_max) if r > 0 else None

    def embed(self, p: Point) -> np.ndarray:
        self.check_point(p)
        return np.array([p.payload[0], p.payload[1]])


class RotationBody(SpaceOracle):
    """The solid {(x, y, z) : 0 <= x <= 1, hypot(y, z) <= x**(1 + alpha)}.

    Marked at the origin.  Sphere sampling parameterizes the sphere slice by
    the transverse radius s in [0, s_max(r)] (s_max solves the boundary
    equation exactly enough by bisection) and sweeps deterministic angles, so
    every point has distance exactly r from the origin up to float round-off.
    """

    kind = "rotation-body"
    exact = False

    def __init__(self, alpha: float, band: float = 1e-4, label: Optional[str] = None):
        super().__init__(label=label, band=band)
        alpha = float(alpha)
        if not alpha > 0:
            raise SpaceValidationError(f"alpha: must be positive, got {alpha}")
        self.alpha = alpha
        self._marked = Point(self.kind, (0.0, 0.0, 0.0))

    @property
    def marked_point(self) -> Point:
        return self._marked

    def params(self) -> dict:
        return {"alpha": self.alpha}

    def member(self, x: float, y: float, z: float, slack: float = 1e-12) -> bool:
        if not (-slack <= x <= 1 + slack):
            return False
        return math.hypot(y, z) <= x ** (1.0 + self.alpha) + slack

    def _distance(self, p: Point, q: Point) -> float:
        return float(np.linalg.norm(np.subtract(p.payload, q.payload)))

    def _transverse_max(self, r: float) -> float:
        power = (1.0 + self.alpha) / 2.0
        fun = lambda s: s - (r * r - s * s) ** power
        lo, hi = 0.0, r * (1.0 - 1e-15)
        if fun(hi) <= 0:
            return hi
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if fun(mid) <= 0:
                lo = mid
            else:
                hi = mid
        return lo

    def _sphere_points(self, r: float, band: float, budget: int) -> list[Point]:
        if r > 1.0:
            return []
        s_max = self._transverse_max(r)
        n_s = max(2, min(16, budget))
        n_phi = max(1, budget // n_s)
        golden = math.pi * (3.0 - math.sqrt(5.0))
        points: list[Point] = []
        for i, s in enumerate(np.linspace(0.0, s_max, n_s)):
            x = math.sqrt(max(0.0, r * r - s * s))
            if s == 0.0:
                points.append(Point(self.kind, (x, 0.0, 0.0)))
                continue
            for j in range(n_phi):
                phi = golden * (i * n_phi + j)
                points.append(Point(self.kind, (x, s * math.cos(phi), s * math.sin(phi))))
                if len(points) >= budget:
                    return points
        return points[:budget]

    def nearest_radius(self, target: Radius) -> Optional[float]:
        target = float(target)
        return target if 0 < target <= 1.0 else None

    def any_radius_leq(self, r: Radius) -> Optional[float]:
        r = float(r)
        return min(r, 1.0) if r > 0 else None

    def embed(self, p: Point) -> np.ndarray:
        self.check_point(p)
        return np.array(p.payload, dtype=float)


# ---------------------------------------------------------------------------
# specification and construction
# ---------------------------------------------------------------------------

SPACE_KINDS = (
    "half-line",
    "cantor",
    "lacunary",
    "planar-rays",
    "curve",
    "curve-family",
    "region-between-graphs",
    "rotation-body",
)


@dataclass(frozen=True)
class SpaceSpec:
    """A declarative space description: a kind plus kind-specific parameters."""

    kind: str
    params: dict

    @staticmethod
    def from_dict(data: dict) -> "SpaceSpec":
        if not isinstance(data, dict):
            raise SpaceValidationError(f"space: expected an object, got {type(data).__name__}")
        if "kind" not in data:
            raise SpaceValidationError("space.kind: missing")
        params = {k: v for k, v in data.items() if k != "kind"}
        return SpaceSpec(kind=data["kind"], params=params)


def _expect_keys(params: dict, allowed: set[str], kind: str) -> None:
    unknown = set(params) - allowed
    if unknown:
        raise SpaceValidationError(
            f"space: unknown parameter(s) for kind {kind!r}: {sorted(unknown)}"
        )


def build_space(spec: Union[SpaceSpec, dict]) -> SpaceOracle:
    """Construct the oracle described by a space specification."""
    if isinstance(spec, dict):
        spec = SpaceSpec.from_dict(spec)
    kind, params = spec.kind, dict(spec.params)
    label = params.pop("label", None)
    if kind == "half-line":
        _expect_keys(params, set(), kind)
        return HalfLine(label=label)
    if kind == "cantor":
        _expect_keys(params, {"marked", "membership_depth"}, kind)
        return CantorSpace(
            marked=params.get("marked", 0),
            membership_depth=params.get("membership_depth", 48),
            label=label,
        )
    if kind == "lacunary":
        _expect_keys(params, set(), kind)
        space = LacunarySpace(label=label)
        space.scale.validate()
        return space
    if kind == "planar-rays":
        _expect_keys(params, {"theta"}, kind)
        if "theta" not in params:
            raise SpaceValidationError("space.theta: missing for kind 'planar-rays'")
        return PlanarRays(theta=params["theta"], label=label)
    if kind == "curve":
        _expect_keys(params, {"coefficients", "band"}, kind)
        if "coefficients" not in params:
            raise SpaceValidationError("space.coefficients: missing for kind 'curve'")
        return PolynomialCurve(
            coefficients=params["coefficients"],
            band=params.get("band", 1e-4),
            label=label,
        )
    if kind == "curve-family":
        _expect_keys(params, {"branches", "band"}, kind)
        if "branches" not in params:
            raise SpaceValidationError("space.branches: missing for kind 'curve-family'")
        return CurveFamily(
            branches=params["branches"], band=params.get("band", 1e-4), label=label
        )
    if kind == "region-between-graphs":
        _expect_keys(params, {"f1", "f2", "band"}, kind)
        for key in ("f1", "f2"):
            if key not in params:
                raise SpaceValidationError(f"space.{key}: missing for kind {kind!r}")
        return RegionBetweenGraphs(
            f1=params["f1"], f2=params["f2"], band=params.get("band", 1e-4), label=label
        )
    if kind == "rotation-body":
        _expect_keys(params, {"alpha", "band"}, kind)
        if "alpha" not in params:
            raise SpaceValidationError("space.alpha: missing for kind 'rotation-body'")
        return RotationBody(
            alpha=params["alpha"], band=params.get("band", 1e-4), label=label
        )
    raise SpaceValidationError(
        f"space.kind: unknown kind {kind!r}; expected one of {', '.join(SPACE_KINDS)}"
    )


def planar_ray_pair(space: PlanarRays) -> tuple[Ray, Ray]:
    """The two rays of a crossing-rays space as separate embedded oracles."""
    first = Ray(origin=np.zeros(2), direction=np.array([1.0, 0.0]), label="ray-0")
    second = Ray(
        origin=np.zeros(2),
        direction=np.array([math.cos(space.theta), math.sin(space.theta)]),
        label="ray-1",
    )
    return first, second
