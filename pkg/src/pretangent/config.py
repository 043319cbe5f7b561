"""Analysis configuration: a validated, JSON-backed description of one run.

A config names the space, the tasks to run, and every numeric knob the
estimators take.  Parsing rejects unknown keys at every level so typos fail
loudly instead of silently running with defaults, and fills documented
defaults for everything omitted.  The parsed object echoes back to JSON in a
canonical form that re-parses to an equal config.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .functionals import EPS_DEFAULT, K_GRID, R_DECAY, R_START
from .spaces import SpaceSpec, SpaceValidationError, build_space
from .stability import DEFAULT_DEPTH, DEFAULT_MESH, MIN_DEPTH, SELECTOR_NAMES
from .limits import DEFAULT_WINDOW

TASK_NAMES = (
    "conditions",
    "witness",
    "pretangent",
    "tangency",
    "tangent-equivalence",
    "cantor-report",
)

NORMALIZING_KINDS = ("auto", "geometric", "power-of-three", "lacunary", "lacunary-even")

# equivalence partners that are derived from the analyzed space itself
DERIVED_PARTNERS = ("tangent-ray", "ray-pair")


class ConfigError(Exception):
    """A malformed or invalid configuration document."""


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _as_fraction(value, path: str) -> Fraction:
    if isinstance(value, bool):
        _fail(path, f"expected a number or 'p/q' string, got {value!r}")
    if isinstance(value, (int, float)):
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            _fail(path, f"not a valid rational: {value!r}")
    _fail(path, f"expected a number or 'p/q' string, got {type(value).__name__}")


def _as_int(value, path: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(path, f"must be >= {minimum}, got {value}")
    return value


def _as_float(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    return float(value)


def _expect_object(value, path: str) -> dict:
    if not isinstance(value, dict):
        _fail(path, f"expected an object, got {type(value).__name__}")
    return value


def _reject_unknown(data: dict, allowed: set[str], path: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        _fail(path, f"unknown key(s): {', '.join(unknown)}")


@dataclass(frozen=True)
class AnalysisConfig:
    """A fully validated analysis request with all defaults resolved.

    `tol_abs` and `quotient_tol` stay None when unset: their defaults depend
    on whether the built space is exact, so resolution happens at run time.
    `normalizing` and `selectors` may be "auto", resolved per space kind.
    """

    space: SpaceSpec
    tasks: tuple[str, ...]
    seed: int = 0
    depth: int = DEFAULT_DEPTH
    window: int = DEFAULT_WINDOW
    r_start: Fraction = R_START
    r_ratio: Fraction = R_DECAY
    r_count: Optional[int] = None
    k_grid: tuple[float, ...] = K_GRID
    eps: float = EPS_DEFAULT
    tol_abs: Optional[float] = None
    quotient_tol: Optional[float] = None
    normalizing: str = "auto"
    selectors: Union[str, tuple[str, ...]] = "auto"
    mesh: tuple[Fraction, ...] = DEFAULT_MESH
    equivalence_other: Optional[Union[str, SpaceSpec]] = None
    cantor_bound: Fraction = Fraction(1)
    cantor_depth: int = 4

    def to_json_dict(self) -> dict:
        """Canonical JSON form; parse_config on its dump reproduces self."""
        space = {"kind": self.space.kind, **self.space.params}
        data: dict = {
            "space": space,
            "tasks": list(self.tasks),
            "seed": self.seed,
            "depth": self.depth,
            "window": self.window,
            "grids": {
                "r_start": str(self.r_start),
                "r_ratio": str(self.r_ratio),
                "k_grid": list(self.k_grid),
                "eps": self.eps,
            },
            "normalizing": self.normalizing,
            "selectors": (
                self.selectors if isinstance(self.selectors, str) else list(self.selectors)
            ),
            "mesh": [str(c) for c in self.mesh],
        }
        if self.r_count is not None:
            data["grids"]["r_count"] = self.r_count
        tolerances = {}
        if self.tol_abs is not None:
            tolerances["tol_abs"] = self.tol_abs
        if self.quotient_tol is not None:
            tolerances["quotient_tol"] = self.quotient_tol
        if tolerances:
            data["tolerances"] = tolerances
        if self.equivalence_other is not None:
            other = self.equivalence_other
            if isinstance(other, SpaceSpec):
                other = {"kind": other.kind, **other.params}
            data["equivalence"] = {"other": other}
        data["cantor"] = {
            "bound": str(self.cantor_bound),
            "depth": self.cantor_depth,
        }
        return data


def _parse_tasks(value, path: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not value:
        _fail(path, "expected a nonempty list of task names")
    tasks: list[str] = []
    for i, task in enumerate(value):
        if task not in TASK_NAMES:
            _fail(f"{path}[{i}]", f"unknown task {task!r}; expected one of {TASK_NAMES}")
        if task not in tasks:
            tasks.append(task)
    return tuple(tasks)


def _parse_selectors(value, path: str) -> Union[str, tuple[str, ...]]:
    if value == "auto":
        return "auto"
    if not isinstance(value, list) or not value:
        _fail(path, 'expected "auto" or a nonempty list of selector names')
    for i, name in enumerate(value):
        if name not in SELECTOR_NAMES:
            _fail(f"{path}[{i}]", f"unknown selector {name!r}; expected one of {SELECTOR_NAMES}")
    return tuple(value)


def parse_config(text: str) -> AnalysisConfig:
    """Parse and validate a UTF-8 JSON configuration document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    data = _expect_object(data, "config")
    _reject_unknown(
        data,
        {
            "space", "tasks", "seed", "depth", "window", "grids",
            "tolerances", "normalizing", "selectors", "mesh",
            "equivalence", "cantor",
        },
        "config",
    )
    if "space" not in data:
        _fail("space", "missing")
    if "tasks" not in data:
        _fail("tasks", "missing")

    space_spec = SpaceSpec.from_dict(_expect_object(data["space"], "space"))
    try:
        build_space(space_spec)  # full parameter validation, result discarded
    except SpaceValidationError as exc:
        raise ConfigError(str(exc)) from exc

    tasks = _parse_tasks(data["tasks"], "tasks")

    kwargs: dict = {"space": space_spec, "tasks": tasks}
    if "seed" in data:
        kwargs["seed"] = _as_int(data["seed"], "seed", minimum=0)
    if "depth" in data:
        kwargs["depth"] = _as_int(data["depth"], "depth", minimum=MIN_DEPTH)
    if "window" in data:
        kwargs["window"] = _as_int(data["window"], "window", minimum=2)

    grids = _expect_object(data.get("grids", {}), "grids")
    _reject_unknown(grids, {"r_start", "r_ratio", "r_count", "k_grid", "eps"}, "grids")
    if "r_start" in grids:
        r_start = _as_fraction(grids["r_start"], "grids.r_start")
        if r_start <= 0:
            _fail("grids.r_start", f"must be positive, got {r_start}")
        kwargs["r_start"] = r_start
    if "r_ratio" in grids:
        r_ratio = _as_fraction(grids["r_ratio"], "grids.r_ratio")
        if not 0 < r_ratio < 1:
            _fail("grids.r_ratio", f"must lie in (0, 1), got {r_ratio}")
        kwargs["r_ratio"] = r_ratio
    if "r_count" in grids:
        kwargs["r_count"] = _as_int(grids["r_count"], "grids.r_count", minimum=8)
    if "k_grid" in grids:
        raw = grids["k_grid"]
        if not isinstance(raw, list) or len(raw) < 3:
            _fail("grids.k_grid", "expected a list of at least 3 ratios")
        ks = []
        for i, k in enumerate(raw):
            k = _as_float(k, f"grids.k_grid[{i}]")
            if not k > 1:
                _fail(f"grids.k_grid[{i}]", f"k >= 1 required, and k = 1 is degenerate (got {k})")
            ks.append(k)
        kwargs["k_grid"] = tuple(sorted(ks, reverse=True))
    if "eps" in grids:
        eps = _as_float(grids["eps"], "grids.eps")
        if not 0 < eps < 1:
            _fail("grids.eps", f"must lie in (0, 1), got {eps}")
        kwargs["eps"] = eps

    tolerances = _expect_object(data.get("tolerances", {}), "tolerances")
    _reject_unknown(tolerances, {"tol_abs", "quotient_tol"}, "tolerances")
    for key in ("tol_abs", "quotient_tol"):
        if key in tolerances:
            value = _as_float(tolerances[key], f"tolerances.{key}")
            if not value > 0:
                _fail(f"tolerances.{key}", f"must be positive, got {value}")
            kwargs[key] = value

    if "normalizing" in data:
        kind = data["normalizing"]
        if kind not in NORMALIZING_KINDS:
            _fail("normalizing", f"unknown kind {kind!r}; expected one of {NORMALIZING_KINDS}")
        kwargs["normalizing"] = kind

    if "selectors" in data:
        kwargs["selectors"] = _parse_selectors(data["selectors"], "selectors")

    if "mesh" in data:
        raw = data["mesh"]
        if not isinstance(raw, list) or not raw:
            _fail("mesh", "expected a nonempty list of positive rationals")
        mesh = []
        for i, c in enumerate(raw):
            c = _as_fraction(c, f"mesh[{i}]")
            if c <= 0:
                _fail(f"mesh[{i}]", f"must be positive, got {c}")
            mesh.append(c)
        kwargs["mesh"] = tuple(mesh)

    if "equivalence" in data:
        eq = _expect_object(data["equivalence"], "equivalence")
        _reject_unknown(eq, {"other"}, "equivalence")
        if "other" not in eq:
            _fail("equivalence.other", "missing")
        other = eq["other"]
        if isinstance(other, str):
            if other not in DERIVED_PARTNERS:
                _fail(
                    "equivalence.other",
                    f"unknown derived partner {other!r}; expected one of "
                    f"{DERIVED_PARTNERS} or a space object",
                )
            kwargs["equivalence_other"] = other
        else:
            other_spec = SpaceSpec.from_dict(_expect_object(other, "equivalence.other"))
            try:
                build_space(other_spec)
            except SpaceValidationError as exc:
                raise ConfigError(f"equivalence.other: {exc}") from exc
            kwargs["equivalence_other"] = other_spec

    cantor = _expect_object(data.get("cantor", {}), "cantor")
    _reject_unknown(cantor, {"bound", "depth"}, "cantor")
    if "bound" in cantor:
        bound = _as_fraction(cantor["bound"], "cantor.bound")
        if bound < 0:
            _fail("cantor.bound", f"must be >= 0, got {bound}")
        kwargs["cantor_bound"] = bound
    if "depth" in cantor:
        kwargs["cantor_depth"] = _as_int(cantor["depth"], "cantor.depth", minimum=0)

    if "tangent-equivalence" in tasks and kwargs.get("equivalence_other") is None:
        _fail("equivalence", 'task "tangent-equivalence" needs equivalence.other')
    if "cantor-report" in tasks and space_spec.kind != "cantor":
        _fail("tasks", 'task "cantor-report" needs space.kind == "cantor"')
    if kwargs.get("equivalence_other") == "tangent-ray" and space_spec.kind != "curve":
        _fail("equivalence.other", '"tangent-ray" needs space.kind == "curve"')
    if kwargs.get("equivalence_other") == "ray-pair" and space_spec.kind != "planar-rays":
        _fail("equivalence.other", '"ray-pair" needs space.kind == "planar-rays"')

    return AnalysisConfig(**kwargs)
