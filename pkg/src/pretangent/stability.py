"""Mutual stability of rescaled point sequences and finite rescaling limits.

A normalizing sequence r_n -> 0 turns point sequences into rescaled distance
ratios d(x_n, y_n) / r_n; two sequences are mutually stable when that ratio
converges.  This module estimates those limits, builds candidate sequence
libraries per space, clusters mutually stable candidates into a finite
approximation of the rescaling-limit space, constructs oscillating witnesses
when uniqueness fails, and compares value sets across subsequences to detect
limits that grow under passage to a subsequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .core import Point, SpaceOracle
from .functionals import ConditionReport
from .limits import DEFAULT_WINDOW, LimitEstimate, estimate_limit
from .spaces import CantorSpace, LineLikeSpace, PlanarRays, sqrt_fraction
from .ternary import ce_truncation

DEFAULT_DEPTH = 64
#: rescaled limits are read from tail windows; anything shorter than this
#: leaves the window with no run-in and the verdict would be noise
MIN_DEPTH = 32

TOL_QUOTIENT_EXACT = 1e-6
TOL_QUOTIENT_SAMPLED = 1e-2

DEFAULT_MESH = (
    Fraction(1, 8),
    Fraction(1, 4),
    Fraction(1, 2),
    Fraction(1),
    Fraction(2),
    Fraction(4),
    Fraction(8),
)

SELECTOR_NAMES = ("even", "odd", "squares", "random")


class StabilityError(Exception):
    """Base class for stability-analysis failures."""


class InsufficientDepthError(StabilityError):
    """Fewer sequence terms are available than the tail window requires."""


class NonSelfStableError(StabilityError):
    """Two candidates are each stable with the marked point but not mutually."""


class WitnessNotFoundError(StabilityError):
    """No oscillating witness could be realized from the annulus profile."""


class UnsupportedSpaceError(StabilityError):
    """The requested analysis is not meaningful for this space kind."""


class NoValueError(StabilityError):
    """A sequence has no well-defined rescaled coordinate value."""


def default_quotient_tol(space: SpaceOracle) -> float:
    return TOL_QUOTIENT_EXACT if space.exact else TOL_QUOTIENT_SAMPLED


# ---------------------------------------------------------------------------
# normalizing sequences and point sequences
# ---------------------------------------------------------------------------


class NormalizingSequence:
    """A strictly decreasing positive sequence r_n -> 0, given by a rule.

    Values are produced lazily from the rule so that sparse subsequences of
    very deep sequences never materialize the skipped terms.
    """

    def __init__(
        self,
        label: str,
        rule: Callable[[int], Union[Fraction, float]],
        depth: int = DEFAULT_DEPTH,
        exact: bool = True,
    ):
        if depth < 2:
            raise ValueError(f"normalizing sequence needs depth >= 2, got {depth}")
        self.label = label
        self.rule = rule
        self.depth = int(depth)
        self.exact = bool(exact)
        self._cache: dict[int, Union[Fraction, float]] = {}
        head = [self.value(n) for n in range(min(self.depth, 12))]
        if any(v <= 0 for v in head):
            raise ValueError(f"{label}: normalizing values must be positive")
        if any(head[i] <= head[i + 1] for i in range(len(head) - 1)):
            raise ValueError(f"{label}: normalizing values must strictly decrease")

    def value(self, n: int) -> Union[Fraction, float]:
        if not (0 <= n < self.depth):
            raise IndexError(f"{self.label}: index {n} outside depth {self.depth}")
        if n not in self._cache:
            self._cache[n] = self.rule(n)
        return self._cache[n]

    def values(self) -> list:
        return [self.value(n) for n in range(self.depth)]

    def with_depth(self, depth: int) -> "NormalizingSequence":
        return NormalizingSequence(self.label, self.rule, depth=depth, exact=self.exact)

    def subsequence(
        self, selector: Callable[[int], int], label: Optional[str] = None
    ) -> "NormalizingSequence":
        count = 0
        while count < self.depth and selector(count) < self.depth:
            count += 1
        if count < 2:
            raise InsufficientDepthError(
                f"{self.label}: selector leaves fewer than 2 of {self.depth} terms"
            )
        return NormalizingSequence(
            label or f"{self.label}-sub",
            lambda k: self.rule(selector(k)),
            depth=count,
            exact=self.exact,
        )

    # -- factories ---------------------------------------------------------

    @staticmethod
    def geometric(
        depth: int = DEFAULT_DEPTH,
        start: Fraction = Fraction(1, 2),
        ratio: Fraction = Fraction(7, 10),
        exact: bool = True,
    ) -> "NormalizingSequence":
        if not (0 < ratio < 1):
            raise ValueError(f"geometric ratio must lie in (0, 1), got {ratio}")
        if exact:
            rule = lambda n: start * ratio**n
        else:
            rule = lambda n: float(start) * float(ratio) ** n
        return NormalizingSequence("geometric", rule, depth=depth, exact=exact)

    @staticmethod
    def power_of_three(depth: int = DEFAULT_DEPTH) -> "NormalizingSequence":
        return NormalizingSequence(
            "power-of-three", lambda n: Fraction(1, 3 ** (n + 1)), depth=depth
        )

    @staticmethod
    def lacunary(depth: int = DEFAULT_DEPTH) -> "NormalizingSequence":
        from .spaces import _lacunary_radius

        return NormalizingSequence(
            "lacunary", lambda n: _lacunary_radius(n + 1), depth=depth
        )

    @staticmethod
    def lacunary_even(depth: int = DEFAULT_DEPTH) -> "NormalizingSequence":
        from .spaces import _lacunary_radius

        return NormalizingSequence(
            "lacunary-even", lambda n: _lacunary_radius(2 * (n + 1)), depth=depth
        )


def make_selector(name: str, seed: int = 0) -> Callable[[int], int]:
    """Index maps for passing to a subsequence; 'random' is seed-deterministic."""
    if name == "even":
        return lambda k: 2 * k
    if name == "odd":
        return lambda k: 2 * k + 1
    if name == "squares":
        return lambda k: (k + 1) ** 2 - 1
    if name == "random":
        rng = np.random.default_rng((int(seed), 0x5E1EC7))
        cache: list[int] = []

        def pick(k: int) -> int:
            while len(cache) <= k:
                step = int(rng.integers(1, 5))
                cache.append((cache[-1] + step) if cache else step - 1)
            return cache[k]

        return pick
    raise ValueError(f"unknown selector {name!r}; expected one of {SELECTOR_NAMES}")


class PointSequence:
    """A sequence of points of one space, given by a rule."""

    def __init__(
        self,
        label: str,
        rule: Callable[[int], Point],
        depth: Optional[int] = None,
    ):
        self.label = label
        self.rule = rule
        self.depth = depth  # None means unbounded
        self._cache: dict[int, Point] = {}

    def point(self, n: int) -> Point:
        if self.depth is not None and not (0 <= n < self.depth):
            raise IndexError(f"{self.label}: index {n} outside depth {self.depth}")
        if n not in self._cache:
            self._cache[n] = self.rule(n)
        return self._cache[n]

    def subsequence(
        self, selector: Callable[[int], int], label: Optional[str] = None
    ) -> "PointSequence":
        depth = None
        if self.depth is not None:
            count = 0
            while count < self.depth and selector(count) < self.depth:
                count += 1
            depth = count
        return PointSequence(
            label or f"{self.label}-sub", lambda k: self.rule(selector(k)), depth=depth
        )


def constant_sequence(point: Point, label: Optional[str] = None) -> PointSequence:
    return PointSequence(label or "const", lambda n: point, depth=None)


def points_from_list(label: str, points: Sequence[Point]) -> PointSequence:
    pts = list(points)
    return PointSequence(label, lambda n: pts[n], depth=len(pts))


def interleave_witness(
    first: PointSequence, second: PointSequence, label: Optional[str] = None
) -> PointSequence:
    """z_n = x_n for even n and y_n for odd n."""
    depths = [d for d in (first.depth, second.depth) if d is not None]
    depth = min(depths) if depths else None
    return PointSequence(
        label or f"interleave({first.label},{second.label})",
        lambda n: first.rule(n) if n % 2 == 0 else second.rule(n),
        depth=depth,
    )


# ---------------------------------------------------------------------------
# the rescaled distance limit
# ---------------------------------------------------------------------------


def _shared_depth(
    first: PointSequence,
    second: PointSequence,
    r: NormalizingSequence,
    depth: Optional[int],
) -> int:
    candidates = [r.depth]
    for seq in (first, second):
        if seq.depth is not None:
            candidates.append(seq.depth)
    if depth is not None:
        candidates.append(depth)
    n = min(candidates)
    if n < MIN_DEPTH:
        raise InsufficientDepthError(
            f"rescaled limit needs at least {MIN_DEPTH} terms, got {n}"
        )
    return n


def _rescaled_ratio(space: SpaceOracle, p: Point, q: Point, r_n, exact_mode: bool):
    if exact_mode:
        d = space.distance_exact(p, q)
        if d is not None:
            return d / r_n
        d_sq = space.distance_sq_exact(p, q)
        if d_sq is not None:
            # square root in float only after the exact division, so ratios
            # survive normalizing values far below the float underflow line
            return sqrt_fraction(d_sq / (r_n * r_n))
    return space.distance(p, q) / float(r_n)


def dtilde(
    space: SpaceOracle,
    first: PointSequence,
    second: PointSequence,
    r: NormalizingSequence,
    *,
    window: int = DEFAULT_WINDOW,
    tol: Optional[float] = None,
    depth: Optional[int] = None,
) -> LimitEstimate:
    """Estimate the mutual-stability limit lim d(x_n, y_n) / r_n.

    The estimate is `converged` exactly when the pair is mutually stable to
    the working tolerance; `oscillating` reports the two parity sublimits.
    """
    if tol is None:
        tol = default_quotient_tol(space)
    n = _shared_depth(first, second, r, depth)
    exact_mode = space.exact and r.exact
    ratios = [
        _rescaled_ratio(space, first.point(i), second.point(i), r.value(i), exact_mode)
        for i in range(n)
    ]
    return estimate_limit(
        ratios, window=window, tol_abs=tol, osc_gap=10.0 * tol
    )


def mutually_stable(
    space: SpaceOracle,
    first: PointSequence,
    second: PointSequence,
    r: NormalizingSequence,
    **kwargs,
) -> bool:
    return dtilde(space, first, second, r, **kwargs).converged


# ---------------------------------------------------------------------------
# candidate libraries
# ---------------------------------------------------------------------------


def _nearest_point(space: SpaceOracle, target) -> Optional[Point]:
    radius = space.nearest_radius(target)
    if radius is None:
        return None
    return space.point_at_radius(radius)


def _is_reciprocal_power_of_three(value) -> bool:
    if not isinstance(value, Fraction) or value.numerator != 1:
        return False
    den = value.denominator
    while den % 3 == 0:
        den //= 3
    return den == 1


def _cantor_library(
    space: CantorSpace, r: NormalizingSequence, depth: int
) -> list[PointSequence]:
    """Digit-net candidates u * r_n, translated to the marked endpoint.

    Requires power-of-three normalizing values so the positions are members
    by digit shifting.  The extra 'slow' candidate approaches the same class
    as u = 1 along a non-constant ratio, exercising the zero-distance merge.
    """
    sign = 1 if space.marked_end == 0 else -1
    base = Fraction(space.marked_end)

    def position(u: Fraction, n: int) -> Fraction:
        return base + sign * u * r.value(n)

    sequences: list[PointSequence] = []
    for u in ce_truncation(1, 4, marked=0):
        if u == 0:
            continue
        sequences.append(
            PointSequence(
                f"u={u}", lambda n, u=u: Point(space.kind, position(u, n)), depth=depth
            )
        )
    # the endpoint value 1 lies in the extension but not in any finite-depth
    # net; its fast and slow realizations land in the same class
    sequences.append(
        PointSequence(
            "u=1", lambda n: Point(space.kind, position(Fraction(1), n)), depth=depth
        )
    )
    sequences.append(
        PointSequence(
            "u=1-slow",
            lambda n: Point(space.kind, position(1 - r.value(n), n)),
            depth=depth,
        )
    )
    return sequences


def candidate_library(
    space: SpaceOracle,
    r: NormalizingSequence,
    *,
    mesh: Sequence[Fraction] = DEFAULT_MESH,
    depth: Optional[int] = None,
) -> list[PointSequence]:
    """Deterministic stable-candidate sequences x_n at scale ~ c * r_n.

    The generic rule snaps c * r_n to the space's radius set; spaces with a
    digit structure get their own net.  Candidates here are proposals: the
    clustering step drops any that fail to be stable with the marked point.
    """
    if depth is None:
        depth = min(r.depth, DEFAULT_DEPTH)
    if isinstance(space, CantorSpace) and all(
        _is_reciprocal_power_of_three(r.value(i)) for i in (0, 1, min(7, depth - 1))
    ):
        return _cantor_library(space, r, depth)
    if isinstance(space, PlanarRays):
        sequences = []
        for ray in (0, 1):
            for c in mesh:
                sequences.append(
                    PointSequence(
                        f"ray{ray}*c={c}",
                        lambda n, ray=ray, c=c: space.point_on_ray(ray, c * r.value(n)),
                        depth=depth,
                    )
                )
        return sequences

    sequences = []
    for c in mesh:
        label = f"c={c}"

        def rule(n: int, c=c) -> Point:
            target = c * r.value(n) if r.exact else float(c) * float(r.value(n))
            point = _nearest_point(space, target)
            if point is None:
                raise StabilityError(
                    f"{space.label}: no radius near {float(target):.3g} "
                    f"for candidate {c}"
                )
            return point

        sequences.append(PointSequence(label, rule, depth=depth))
    return sequences


# ---------------------------------------------------------------------------
# signed coordinate values for subsets of the line
# ---------------------------------------------------------------------------


def value_map(
    space: SpaceOracle,
    seq: PointSequence,
    r: NormalizingSequence,
    *,
    window: int = DEFAULT_WINDOW,
    tol: Optional[float] = None,
    depth: Optional[int] = None,
) -> Union[Fraction, float]:
    """The limit of (x_n - a) / r_n, signed, for subsets of the line.

    Returns an exact Fraction when the rescaled coordinates are eventually
    constant; raises NoValueError when the limit does not exist.
    """
    est = value_estimate(space, seq, r, window=window, tol=tol, depth=depth)
    if not est.converged:
        raise NoValueError(
            f"{seq.label}: rescaled coordinate does not settle ({est.status}; {est.detail})"
        )
    return est.exact_value if est.exact_value is not None else est.value


def value_estimate(
    space: SpaceOracle,
    seq: PointSequence,
    r: NormalizingSequence,
    *,
    window: int = DEFAULT_WINDOW,
    tol: Optional[float] = None,
    depth: Optional[int] = None,
) -> LimitEstimate:
    if not isinstance(space, LineLikeSpace):
        raise UnsupportedSpaceError(
            f"signed coordinate values need a subset of the line, not {space.kind}"
        )
    if tol is None:
        tol = default_quotient_tol(space)
    marked = space.marked_coordinate
    n = _shared_depth(seq, seq, r, depth)
    values = []
    for i in range(n):
        delta = space.coordinate(seq.point(i)) - marked
        values.append(delta / r.value(i) if r.exact else float(delta) / float(r.value(i)))
    return estimate_limit(values, window=window, tol_abs=tol, osc_gap=10.0 * tol)


# ---------------------------------------------------------------------------
# finite approximation of the rescaling-limit space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitClass:
    """One point of the finite limit-space approximation."""

    label: str  # representative candidate
    members: tuple[str, ...]
    radial_value: float
    radial_exact: Optional[Fraction]


@dataclass(frozen=True)
class DroppedCandidate:
    label: str
    status: str
    detail: str


@dataclass(frozen=True)
class MergeEvidence:
    first: str
    second: str
    distance: float


@dataclass(frozen=True)
class FinitePretangent:
    """Mutually stable candidate classes with their rescaled distances."""

    space_label: str
    r_label: str
    tol: float
    depth: int
    classes: tuple[LimitClass, ...]
    matrix: tuple[tuple[float, ...], ...]
    exact_matrix: tuple[tuple[Optional[str], ...], ...]
    dropped: tuple[DroppedCandidate, ...]
    merged: tuple[MergeEvidence, ...]

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(c.radial_value for c in self.classes)

    @property
    def size(self) -> int:
        return len(self.classes)


def pretangent_approximation(
    space: SpaceOracle,
    r: NormalizingSequence,
    candidates: Optional[Sequence[PointSequence]] = None,
    *,
    tol: Optional[float] = None,
    window: int = DEFAULT_WINDOW,
    depth: Optional[int] = None,
) -> FinitePretangent:
    """Cluster candidates into classes by vanishing rescaled distance.

    Candidates that are not stable with the marked point are dropped and
    recorded.  Surviving candidates must be pairwise mutually stable; a
    violating pair is itself a uniqueness counterexample and raises
    NonSelfStableError rather than being clustered around.
    """
    if tol is None:
        tol = default_quotient_tol(space)
    if candidates is None:
        candidates = candidate_library(space, r, depth=depth)
    line_like = isinstance(space, LineLikeSpace)
    a_seq = constant_sequence(space.marked_point, label="a")
    eff_depth = min(
        [r.depth]
        + [c.depth for c in candidates if c.depth is not None]
        + ([depth] if depth is not None else [])
    )

    # stability with the marked point, and the radial value of each survivor
    survivors: list[tuple[str, PointSequence, float, Optional[Fraction]]] = [
        ("a", a_seq, 0.0, Fraction(0))
    ]
    dropped: list[DroppedCandidate] = []
    for cand in candidates:
        if line_like:
            est = value_estimate(space, cand, r, window=window, tol=tol, depth=depth)
        else:
            est = dtilde(space, cand, a_seq, r, window=window, tol=tol, depth=depth)
        if est.converged:
            survivors.append((cand.label, cand, est.value, est.exact_value))
        else:
            dropped.append(DroppedCandidate(cand.label, est.status, est.detail))

    # pairwise rescaled distances
    m = len(survivors)
    dist: dict[tuple[int, int], LimitEstimate] = {}
    for i in range(m):
        for j in range(i + 1, m):
            est = dtilde(
                space, survivors[i][1], survivors[j][1], r,
                window=window, tol=tol, depth=depth,
            )
            if not est.converged:
                raise NonSelfStableError(
                    f"{survivors[i][0]} and {survivors[j][0]} are each stable with "
                    f"the marked point of {space.label} but not mutually stable "
                    f"({est.status}); no single limit space exists for {r.label}"
                )
            dist[(i, j)] = est

    # union-find merge of zero-distance pairs
    parent = list(range(m))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    merged: list[MergeEvidence] = []
    for (i, j), est in sorted(dist.items()):
        if est.value <= tol and find(i) != find(j):
            merged.append(MergeEvidence(survivors[i][0], survivors[j][0], est.value))
            parent[find(j)] = find(i)

    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)

    # one class per group, ordered by radial value
    reps = sorted(groups, key=lambda g: (survivors[g][2], survivors[g][0]))
    classes = []
    for g in reps:
        members = tuple(sorted(survivors[i][0] for i in groups[g]))
        classes.append(
            LimitClass(
                label=survivors[g][0],
                members=members,
                radial_value=survivors[g][2],
                radial_exact=survivors[g][3],
            )
        )

    matrix: list[tuple[float, ...]] = []
    exact_matrix: list[tuple[Optional[str], ...]] = []
    for gi in reps:
        row: list[float] = []
        exact_row: list[Optional[str]] = []
        for gj in reps:
            if gi == gj:
                row.append(0.0)
                exact_row.append("0")
                continue
            i, j = min(gi, gj), max(gi, gj)
            est = dist[(i, j)]
            row.append(est.value)
            exact_row.append(str(est.exact_value) if est.exact_value is not None else None)
        matrix.append(tuple(row))
        exact_matrix.append(tuple(exact_row))

    return FinitePretangent(
        space_label=space.label,
        r_label=r.label,
        tol=tol,
        depth=eff_depth,
        classes=tuple(classes),
        matrix=tuple(matrix),
        exact_matrix=tuple(exact_matrix),
        dropped=tuple(dropped),
        merged=tuple(merged),
    )


# ---------------------------------------------------------------------------
# oscillating witness for non-uniqueness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NonuniquenessWitness:
    """Sequences realizing two different limits along one normalizing sequence.

    x and z are each stable with the marked point, but d(x_n, z_n) / r_n has
    two parity sublimits separated by `gap`: no single limit space can hold
    both, so the limit space is not unique.
    """

    space_label: str
    r_label: str
    plateau: float
    gap: float
    sublimits: tuple[float, float]
    x: PointSequence
    z: PointSequence
    x_vs_z: LimitEstimate
    x_vs_a: LimitEstimate
    z_vs_a: LimitEstimate
    rows: tuple[tuple[int, float, float, float], ...]  # (n, r_n, k_n, ratio)


def nonuniqueness_witness(
    space: SpaceOracle,
    report_i: ConditionReport,
    r: Optional[NormalizingSequence] = None,
    *,
    depth: int = DEFAULT_DEPTH,
    window: int = DEFAULT_WINDOW,
    tol: Optional[float] = None,
    budget: int = 128,
) -> NonuniquenessWitness:
    """Realize a failing annulus profile as an oscillating sequence pair.

    At step n the annulus A(r_n, k_n) with k_n = 1 + 2**-n contributes a
    diameter-realizing pair (x_n, y_n); interleaving them gives z_n whose
    rescaled distance to x_n jumps between 0 and the plateau.
    """
    if report_i.condition != "i":
        raise ValueError("witness construction starts from an annulus profile report")
    if report_i.verdict != "fail":
        raise WitnessNotFoundError(
            f"annulus profile of {report_i.space_label} does not fail "
            f"(verdict {report_i.verdict}); there is no plateau to realize"
        )
    if tol is None:
        tol = default_quotient_tol(space)
    if r is None:
        r = NormalizingSequence.geometric(depth=depth, exact=space.exact)
    depth = min(depth, r.depth)
    plateau = float(report_i.metrics["extrapolated"])

    xs: list[Point] = []
    ys: list[Point] = []
    rows: list[tuple[int, float, float, float]] = []
    for n in range(depth):
        r_n = r.value(n)
        if space.exact:
            k_n = 1 + Fraction(1, 2 ** min(n, 512))
        else:
            k_n = 1.0 + 2.0 ** -min(n, 52)
        diam, pair = space.annulus_extremes(r_n, k_n, budget=budget)
        if pair is None:
            raise WitnessNotFoundError(
                f"empty annulus at step {n} (r={float(r_n):.3g}, k={float(k_n):.6g})"
            )
        xs.append(pair[0])
        ys.append(pair[1])
        rows.append((n, float(r_n), float(k_n), diam / float(r_n)))

    x_seq = points_from_list("x", xs)
    y_seq = points_from_list("y", ys)
    z_seq = interleave_witness(x_seq, y_seq, label="z")

    x_vs_a = dtilde(space, x_seq, constant_sequence(space.marked_point), r,
                    window=window, tol=tol, depth=depth)
    z_vs_a = dtilde(space, z_seq, constant_sequence(space.marked_point), r,
                    window=window, tol=tol, depth=depth)
    x_vs_z = dtilde(space, x_seq, z_seq, r, window=window, tol=tol, depth=depth)

    if not (x_vs_a.converged and z_vs_a.converged):
        raise WitnessNotFoundError(
            "annulus pair sequences are not stable with the marked point "
            f"(x: {x_vs_a.status}, z: {z_vs_a.status})"
        )
    if x_vs_z.status != "oscillating":
        raise WitnessNotFoundError(
            f"rescaled distance between x and z did not oscillate ({x_vs_z.status}): "
            "the plateau was not realized as two sublimits"
        )
    gap = abs(x_vs_z.sublimits[0] - x_vs_z.sublimits[1])
    if gap < max(0.25 * plateau, 10.0 * tol):
        raise WitnessNotFoundError(
            f"oscillation gap {gap:.3g} too small against plateau {plateau:.3g}"
        )
    return NonuniquenessWitness(
        space_label=space.label,
        r_label=r.label,
        plateau=plateau,
        gap=gap,
        sublimits=(x_vs_z.sublimits[0], x_vs_z.sublimits[1]),
        x=x_seq,
        z=z_seq,
        x_vs_z=x_vs_z,
        x_vs_a=x_vs_a,
        z_vs_a=z_vs_a,
        rows=tuple(rows),
    )


# ---------------------------------------------------------------------------
# growth under subsequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SelectorOutcome:
    selector: str
    r_label: str
    values: tuple[float, ...]
    extra: tuple[float, ...]
    error: str = ""

    @property
    def consistent(self) -> bool:
        return not self.extra and not self.error


@dataclass(frozen=True)
class TangencyReport:
    """Value-set comparison between a base sequence and its subsequences.

    A limit space that acquires new classes along a subsequence is not
    maximal: the original space cannot be tangent.  The verdict covers only
    the tested selectors; `caveat` states that explicitly.
    """

    space_label: str
    r_label: str
    verdict: str  # "tangent" | "not-tangent" | "inconclusive"
    base_values: tuple[float, ...]
    outcomes: tuple[SelectorOutcome, ...]
    summary: str
    caveat: str


def tangency_check(
    space: SpaceOracle,
    r: NormalizingSequence,
    *,
    selectors: Sequence[str] = SELECTOR_NAMES,
    tol: Optional[float] = None,
    window: int = DEFAULT_WINDOW,
    depth: Optional[int] = None,
    seed: int = 0,
    uniqueness: Optional[object] = None,
) -> TangencyReport:
    """Compare class value sets of r against those of its subsequences.

    Only subsets of the line are supported: there the signed rescaled
    coordinate classifies classes completely, so set inclusion of values
    decides whether subsequence classes all lift to base classes.  When a
    uniqueness verdict is supplied it must not be "non-unique": without a
    single well-defined limit space per normalizing sequence, comparing
    value sets across subsequences proves nothing.
    """
    if not isinstance(space, LineLikeSpace):
        raise UnsupportedSpaceError(
            "value sets classify classes only for subsets of the line; "
            f"{space.kind} needs a dedicated analysis"
        )
    if uniqueness is not None and getattr(uniqueness, "verdict", None) == "non-unique":
        raise UnsupportedSpaceError(
            f"{space.label} has non-unique limit spaces; a subsequence "
            "value-set comparison presupposes uniqueness"
        )
    if tol is None:
        tol = default_quotient_tol(space)
    base = pretangent_approximation(space, r, tol=tol, window=window, depth=depth)
    base_values = base.values

    outcomes: list[SelectorOutcome] = []
    for name in selectors:
        selector = make_selector(name, seed=seed)
        needed = selector(MIN_DEPTH - 1) + 1
        parent = r if r.depth >= needed else r.with_depth(needed)
        sub_r = parent.subsequence(selector, label=f"{r.label}[{name}]")
        try:
            sub = pretangent_approximation(
                space, sub_r, tol=tol, window=window, depth=depth
            )
        except StabilityError as exc:
            outcomes.append(
                SelectorOutcome(
                    selector=name, r_label=sub_r.label, values=(), extra=(),
                    error=str(exc),
                )
            )
            continue
        extra = tuple(
            v for v in sub.values
            if min(abs(v - w) for w in base_values) > 3.0 * tol
        )
        outcomes.append(
            SelectorOutcome(
                selector=name, r_label=sub_r.label, values=sub.values, extra=extra
            )
        )

    caveat = (
        f"verdict covers the {len(outcomes)} tested selectors "
        f"({', '.join(o.selector for o in outcomes)}); untested subsequences "
        "are not excluded"
    )
    grew = [o for o in outcomes if o.extra]
    errored = [o for o in outcomes if o.error]
    if grew:
        verdict = "not-tangent"
        summary = (
            f"subsequence {grew[0].selector} adds classes at values "
            f"{[round(v, 9) for v in grew[0].extra]}: the limit space grows, "
            "so it is not tangent"
        )
    elif errored:
        verdict = "inconclusive"
        summary = (
            f"selector {errored[0].selector} could not be evaluated: "
            f"{errored[0].error}"
        )
    else:
        verdict = "tangent"
        summary = (
            f"all {len(outcomes)} tested subsequences reproduce the base "
            f"value set ({len(base_values)} classes)"
        )
    return TangencyReport(
        space_label=space.label,
        r_label=r.label,
        verdict=verdict,
        base_values=base_values,
        outcomes=tuple(outcomes),
        summary=summary,
        caveat=caveat,
    )


# ---------------------------------------------------------------------------
# cross-checks and audits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairResidual:
    first: str
    second: str
    measured: float
    expected: float
    residual: float


@dataclass(frozen=True)
class KappaReport:
    """Class distances audited against kappa0 * |radial difference|.

    When the three uniqueness conditions hold, the distance between classes
    is determined by their radial values through the gap constant kappa0;
    equal radial values must collapse to one class (checked through the
    recorded merge evidence).
    """

    space_label: str
    r_label: str
    kappa0: float
    tol: float
    pairs: tuple[PairResidual, ...]
    max_residual: float
    collapsed: tuple[MergeEvidence, ...]
    collapse_ok: bool

    @property
    def ok(self) -> bool:
        return self.collapse_ok and self.max_residual <= self.tol


def kappa_cross_check(
    space: SpaceOracle,
    r: NormalizingSequence,
    pretangent: FinitePretangent,
    kappa0: float = 1.0,
    *,
    tol: float = 1e-9,
) -> KappaReport:
    """Audit a finite limit-space approximation against its radial values.

    For every class pair the measured matrix entry is compared with
    kappa0 * |v_i - v_j|; every merge recorded while building the
    approximation is re-checked as an equal-radial-value collapse (distance
    within the quotient tolerance).
    """
    if pretangent.space_label != space.label or pretangent.r_label != r.label:
        raise ValueError(
            f"approximation was built for {pretangent.space_label}/"
            f"{pretangent.r_label}, not {space.label}/{r.label}"
        )
    kappa0 = float(kappa0)
    classes = pretangent.classes
    pairs: list[PairResidual] = []
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            measured = pretangent.matrix[i][j]
            expected = kappa0 * abs(classes[i].radial_value - classes[j].radial_value)
            pairs.append(
                PairResidual(
                    first=classes[i].label,
                    second=classes[j].label,
                    measured=measured,
                    expected=expected,
                    residual=abs(measured - expected),
                )
            )
    max_residual = max((p.residual for p in pairs), default=0.0)
    collapse_ok = all(m.distance <= pretangent.tol for m in pretangent.merged)
    return KappaReport(
        space_label=space.label,
        r_label=r.label,
        kappa0=kappa0,
        tol=tol,
        pairs=tuple(pairs),
        max_residual=max_residual,
        collapsed=pretangent.merged,
        collapse_ok=collapse_ok,
    )


@dataclass(frozen=True)
class StabilityAudit:
    """Pairwise mutual-stability audit over a candidate library."""

    space_label: str
    r_label: str
    survivors: tuple[str, ...]
    dropped: tuple[DroppedCandidate, ...]
    pairs_checked: int
    violations: tuple[tuple[str, str, str], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def transitivity_audit(
    space: SpaceOracle,
    r: NormalizingSequence,
    candidates: Optional[Sequence[PointSequence]] = None,
    *,
    tol: Optional[float] = None,
    window: int = DEFAULT_WINDOW,
    depth: Optional[int] = None,
) -> StabilityAudit:
    """Check that stability with the marked point propagates pairwise.

    Spaces with a unique limit space must make any two candidates that are
    stable with the marked point also mutually stable; a violation here is a
    concrete non-uniqueness certificate.
    """
    if tol is None:
        tol = default_quotient_tol(space)
    if candidates is None:
        candidates = candidate_library(space, r, depth=depth)
    a_seq = constant_sequence(space.marked_point, label="a")
    survivors: list[tuple[str, PointSequence]] = []
    dropped: list[DroppedCandidate] = []
    for cand in candidates:
        est = dtilde(space, cand, a_seq, r, window=window, tol=tol, depth=depth)
        if est.converged:
            survivors.append((cand.label, cand))
        else:
            dropped.append(DroppedCandidate(cand.label, est.status, est.detail))

    violations: list[tuple[str, str, str]] = []
    pairs = 0
    for i in range(len(survivors)):
        for j in range(i + 1, len(survivors)):
            pairs += 1
            est = dtilde(
                space, survivors[i][1], survivors[j][1], r,
                window=window, tol=tol, depth=depth,
            )
            if not est.converged:
                violations.append((survivors[i][0], survivors[j][0], est.status))
    return StabilityAudit(
        space_label=space.label,
        r_label=r.label,
        survivors=tuple(label for label, _ in survivors),
        dropped=tuple(dropped),
        pairs_checked=pairs,
        violations=tuple(violations),
    )
