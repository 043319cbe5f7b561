"""Pointed metric space oracles.

A space oracle bundles a marked point with distance evaluation and sphere
sampling around that point.  Exact spaces answer from closed-form rational
arithmetic (distances are rendered to float only at the API boundary, and the
exact values stay reachable through `distance_exact` / `distance_sq_exact` so
that rescaled limits never underflow).  Sampled spaces answer from numerical
search within a stated radius band.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

Radius = Union[int, float, Fraction]


class MetricSpaceError(Exception):
    """Base class for oracle contract violations."""


class InvalidPointError(MetricSpaceError):
    """A point was offered to a space of a different kind."""


class SamplingContractError(MetricSpaceError):
    """A sampling request contradicts the space's exactness contract."""


@dataclass(frozen=True)
class Point:
    """A point of some space: a kind tag plus a kind-specific payload.

    Payloads are exactly representable (rationals, index pairs, or float
    coordinate tuples); no round-off hides inside the payload itself.
    """

    tag: str
    payload: object

    def __repr__(self) -> str:  # keep reports compact
        return f"Point({self.tag}:{self.payload!r})"


@dataclass(frozen=True)
class SphereSample:
    """Points found on (or band-near) the sphere of a given radius."""

    radius: float
    band: float
    points: tuple[Point, ...]
    exact: bool

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def empty(self) -> bool:
        return not self.points


@dataclass(frozen=True)
class RadiusProbe:
    """Which radii of a probe grid carry at least one sphere point."""

    grid: tuple[float, ...]
    nonempty: tuple[float, ...]


class SpaceOracle(ABC):
    """Contract shared by every space in the corpus.

    Subclasses set `kind` and `exact`, provide `_distance` and
    `_sphere_points`, and override the exact/ambient hooks they can support.
    """

    kind: str = "abstract"
    exact: bool = False

    def __init__(self, label: Optional[str] = None, band: float = 0.0, seed: int = 0):
        self.label = label or self.kind
        self.band = 0.0 if self.exact else float(band)
        self.seed = int(seed)

    # -- identity ---------------------------------------------------------

    @property
    def exactness(self) -> str:
        return "exact" if self.exact else "sampled"

    @property
    @abstractmethod
    def marked_point(self) -> Point:
        """The marked point `a` of the pointed space."""

    def params(self) -> dict:
        """Kind-specific parameters, for report echoes."""
        return {}

    def check_point(self, p: Point) -> None:
        if not isinstance(p, Point) or p.tag != self.kind:
            raise InvalidPointError(
                f"point {p!r} does not belong to a {self.kind!r} space"
            )

    # -- metric -----------------------------------------------------------

    def distance(self, p: Point, q: Point) -> float:
        """Distance between two points, as a float."""
        self.check_point(p)
        self.check_point(q)
        return self._distance(p, q)

    @abstractmethod
    def _distance(self, p: Point, q: Point) -> float: ...

    def distance_exact(self, p: Point, q: Point) -> Optional[Fraction]:
        """Exact rational distance, where the metric admits one."""
        return None

    def distance_sq_exact(self, p: Point, q: Point) -> Optional[Fraction]:
        """Exact rational squared distance, where available."""
        d = self.distance_exact(p, q)
        return None if d is None else d * d

    # -- spheres ----------------------------------------------------------

    def sphere(
        self,
        r: Radius,
        band: Optional[float] = None,
        budget: int = 256,
        strict: bool = True,
    ) -> SphereSample:
        """Sample the sphere of radius r about the marked point.

        Exact spaces enumerate the sphere exactly and require band 0; sampled
        spaces return up to `budget` points whose distance from the marked
        point lies within `band * r` of r.  An empty sample means the sphere
        (intersected with the band) is empty.
        """
        if budget < 1:
            raise ValueError(f"sphere budget must be >= 1, got {budget}")
        # compare before any float conversion: exact radii near the deep end
        # of a scale family underflow float to 0.0 while still being positive
        if not r > 0:
            raise ValueError(f"sphere radius must be positive, got {r}")
        r_num = float(r)
        if band is None:
            band = self.band
        if self.exact and band > 0:
            if strict:
                raise SamplingContractError(
                    f"{self.label} is exact; sphere sampling requires band 0"
                )
            band = 0.0
        points = tuple(self._sphere_points(self._coerce_radius(r), float(band), budget))
        return SphereSample(radius=r_num, band=float(band), points=points, exact=self.exact)

    @abstractmethod
    def _sphere_points(self, r, band: float, budget: int) -> Sequence[Point]: ...

    def _coerce_radius(self, r: Radius):
        """Exact spaces work on Fractions; sampled spaces on floats."""
        if self.exact:
            return r if isinstance(r, Fraction) else Fraction(str(r))
        return float(r)

    def radius_probe(self, grid: Iterable[Radius], budget: int = 256) -> RadiusProbe:
        """Mark the grid radii whose sphere sample is nonempty."""
        grid = tuple(grid)
        nonempty = tuple(
            float(r) for r in grid if not self.sphere(r, budget=budget).empty
        )
        return RadiusProbe(grid=tuple(float(r) for r in grid), nonempty=nonempty)

    # -- radius set helpers -------------------------------------------------

    def nearest_radius(self, target: Radius) -> Optional[Radius]:
        """A radius closest to `target` whose sphere is nonempty.

        Exact spaces answer exactly (Fraction); sampled spaces answer with the
        target itself whenever it lies inside the reachable radius range.
        """
        raise NotImplementedError(f"{self.kind} does not expose nearest_radius")

    def any_radius_leq(self, r: Radius) -> Optional[Radius]:
        """Some nonempty radius <= r, if one exists (marked point limit test)."""
        raise NotImplementedError(f"{self.kind} does not expose any_radius_leq")

    def point_at_radius(self, r: Radius) -> Optional[Point]:
        """A canonical point at the given (nonempty) radius."""
        sample = self.sphere(r, strict=False)
        return sample.points[0] if sample.points else None

    # -- annuli -------------------------------------------------------------

    def annulus_points(self, r: Radius, k: Radius, budget: int = 256) -> list[Point]:
        """Points of the annulus r/k <= d(x, a) <= r*k (sampled spaces)."""
        k_f = float(k)
        if k_f < 1:
            raise ValueError(f"annulus requires k >= 1, got {k}")
        radii = np.geomspace(float(r) / k_f, float(r) * k_f, num=min(9, budget))
        per = max(1, budget // len(radii))
        points: list[Point] = []
        for rad in radii:
            points.extend(self.sphere(rad, budget=per, strict=False).points)
        return points[:budget]

    def annulus_extremes(
        self, r: Radius, k: Radius, budget: int = 256
    ) -> tuple[float, Optional[tuple[Point, Point]]]:
        """Diameter of the annulus and a pair realizing it.

        The empty annulus has diameter 0 and no realizing pair.  Exact spaces
        override this with closed forms; the default does a pairwise max over
        the sampled annulus.
        """
        points = self.annulus_points(r, k, budget=budget)
        if not points:
            return 0.0, None
        if len(points) == 1:
            return 0.0, (points[0], points[0])
        best = 0.0
        pair = (points[0], points[0])
        for i, p in enumerate(points):
            for q in points[i + 1 :]:
                d = self._distance(p, q)
                if d > best:
                    best = d
                    pair = (p, q)
        return best, pair

    # -- ambient embedding ---------------------------------------------------

    def embed(self, p: Point) -> np.ndarray:
        """Coordinates of a point in the ambient Euclidean space."""
        raise NotImplementedError(f"{self.kind} has no ambient embedding")

    def min_ambient_distance(self, xyz: np.ndarray) -> float:
        """Infimum of distances from an ambient point to this space."""
        raise NotImplementedError(f"{self.kind} has no ambient embedding")

    # -- audits ---------------------------------------------------------------

    def sample_pool(self, rng: np.random.Generator, count: int = 128) -> list[Point]:
        """A deterministic-ish pool of points for randomized audits."""
        points: list[Point] = [self.marked_point]
        attempts = 0
        while len(points) < count and attempts < count * 8:
            attempts += 1
            target = float(rng.uniform(0.01, 1.0))
            radius = self.nearest_radius(Fraction(str(round(target, 6))) if self.exact else target)
            if radius is None:
                continue
            sample = self.sphere(radius, budget=4, strict=False)
            points.extend(sample.points)
        return points[:count]


@dataclass(frozen=True)
class MetricAuditReport:
    """Result of a randomized symmetry / triangle-inequality audit."""

    triples: int
    max_symmetry_violation: float
    max_triangle_violation: float
    ok: bool


def distance(space: SpaceOracle, p: Point, q: Point) -> float:
    """Distance between two points of a space."""
    return space.distance(p, q)


def sphere_sample(
    space: SpaceOracle,
    r: Radius,
    band: Optional[float] = None,
    budget: int = 256,
    strict: bool = True,
) -> SphereSample:
    """Sample the sphere of radius r about the marked point of a space."""
    return space.sphere(r, band=band, budget=budget, strict=strict)


def radius_probe(space: SpaceOracle, grid: Iterable[Radius], budget: int = 256) -> RadiusProbe:
    """Probe which grid radii belong to the space's radius set."""
    return space.radius_probe(grid, budget=budget)


def metric_audit(
    space: SpaceOracle,
    triples: int = 10_000,
    seed: int = 0,
    pool: Optional[Sequence[Point]] = None,
) -> MetricAuditReport:
    """Check symmetry and the triangle inequality on random point triples.

    Exact rational metrics are checked exactly; float metrics are allowed a
    2-ulp slack on each comparison.
    """
    rng = np.random.default_rng((space.seed, seed, 0xA0D17))
    if pool is None:
        pool = space.sample_pool(rng, count=192)
    pool = list(pool)
    if len(pool) < 3:
        raise MetricSpaceError(f"audit pool too small for {space.label}")
    max_sym = 0.0
    max_tri = 0.0
    idx = rng.integers(0, len(pool), size=(triples, 3))
    for i, j, l in idx:
        p, q, s = pool[int(i)], pool[int(j)], pool[int(l)]
        e_pq = space.distance_exact(p, q)
        e_qp = space.distance_exact(q, p)
        e_ps = space.distance_exact(p, s)
        e_qs = space.distance_exact(q, s)
        # a triple is checked exactly only when every leg has an exact value
        # (cross-ray legs, for example, only expose exact squares)
        if None not in (e_pq, e_qp, e_ps, e_qs):
            sym = abs(float(e_pq - e_qp))
            tri = float(e_ps - (e_pq + e_qs))
        else:
            d_pq = space.distance(p, q)
            d_qp = space.distance(q, p)
            d_ps = space.distance(p, s)
            d_qs = space.distance(q, s)
            sym = abs(d_pq - d_qp)
            tri = d_ps - (d_pq + d_qs) - 2 * math.ulp(d_pq + d_qs)
        max_sym = max(max_sym, sym)
        max_tri = max(max_tri, tri)
    return MetricAuditReport(
        triples=triples,
        max_symmetry_violation=max_sym,
        max_triangle_violation=max(0.0, max_tri),
        ok=(max_sym == 0.0 and max_tri <= 0.0),
    )
