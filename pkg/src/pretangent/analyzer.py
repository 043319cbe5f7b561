"""End-to-end analysis: build the space, run tasks in dependency order,
assemble a JSON-ready report, and emit the report plus CSV profiles.

Task order is fixed: condition estimates come first, the uniqueness verdict
is derived from them, and witness construction, limit-space approximation,
and tangency checks consume those results.  A witness that cannot be
realized downgrades the verdict to inconclusive instead of failing the run;
genuine task failures are recorded in the report and reflected in the exit
code by the CLI.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from . import __version__
from .config import AnalysisConfig
from .core import MetricSpaceError, SpaceOracle
from .functionals import (
    ConditionReport,
    EquivalenceReport,
    FunctionalError,
    R_COUNT_EXACT,
    R_COUNT_SAMPLED,
    condition_i,
    condition_ii,
    condition_iii,
    default_tol_abs,
    tangent_equivalence_epsilon,
    uniqueness_verdict,
)
from .spaces import (
    CantorSpace,
    LineLikeSpace,
    PlanarRays,
    PolynomialCurve,
    build_space,
    curve_tangent_ray,
    planar_ray_pair,
)
from .stability import (
    FinitePretangent,
    NonuniquenessWitness,
    NormalizingSequence,
    SELECTOR_NAMES,
    StabilityError,
    TangencyReport,
    WitnessNotFoundError,
    candidate_library,
    default_quotient_tol,
    kappa_cross_check,
    nonuniqueness_witness,
    pretangent_approximation,
    tangency_check,
)
from .ternary import ce_truncation

CSV_FILES = {
    "i": "condition_i.csv",
    "ii": "condition_ii.csv",
    "iii": "condition_iii.csv",
    "equivalence": "tangent_equivalence.csv",
    "cantor": "cantor_table.csv",
}

_TASK_EXCEPTIONS = (FunctionalError, StabilityError, MetricSpaceError, ValueError)


@dataclass
class Report:
    """Everything one analysis produced, in JSON-ready form."""

    config: dict
    space: dict
    results: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)
    csv_blocks: dict = field(default_factory=dict)  # filename -> (header, rows)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_json_dict(self) -> dict:
        return {
            "tool": {"name": "pretangent", "version": __version__},
            "config": self.config,
            "space": self.space,
            "results": self.results,
            "errors": self.errors,
        }


def resolve_normalizing(config: AnalysisConfig, space: SpaceOracle) -> NormalizingSequence:
    """The normalizing sequence the config asks for, or a kind-aware default.

    Auto mode picks the scale family that matches the space's own structure:
    powers of three for the ternary set (digit shifts stay members), the
    sparse family for the lacunary set, and a geometric sequence otherwise.
    """
    kind = config.normalizing
    if kind == "auto":
        if isinstance(space, CantorSpace):
            kind = "power-of-three"
        elif space.kind == "lacunary":
            kind = "lacunary"
        else:
            kind = "geometric"
    if kind == "geometric":
        return NormalizingSequence.geometric(
            depth=config.depth,
            start=config.r_start,
            ratio=config.r_ratio,
            exact=space.exact,
        )
    if kind == "power-of-three":
        return NormalizingSequence.power_of_three(depth=config.depth)
    if kind == "lacunary":
        return NormalizingSequence.lacunary(depth=config.depth)
    if kind == "lacunary-even":
        return NormalizingSequence.lacunary_even(depth=config.depth)
    raise ValueError(f"unknown normalizing kind {kind!r}")


def resolve_r_grid(config: AnalysisConfig, space: SpaceOracle) -> tuple:
    """Geometric radius grid r_start * r_ratio**j, exact for exact spaces."""
    count = config.r_count
    if count is None:
        count = R_COUNT_EXACT if space.exact else R_COUNT_SAMPLED
    if space.exact:
        return tuple(config.r_start * config.r_ratio**j for j in range(count))
    return tuple(float(config.r_start) * float(config.r_ratio) ** j for j in range(count))


def resolve_selectors(config: AnalysisConfig, space: SpaceOracle) -> tuple[str, ...]:
    """Selector suite, with the square-index selector excluded for the
    lacunary space: its scale decreases super-geometrically, so index k**2
    reaches denominators with hundreds of thousands of digits."""
    if config.selectors != "auto":
        return tuple(config.selectors)
    if space.kind == "lacunary":
        return ("even", "odd", "random")
    return SELECTOR_NAMES


# ---------------------------------------------------------------------------
# JSON-ready serialization of result objects
# ---------------------------------------------------------------------------


def _num(value) -> Union[str, float, int, None]:
    """Floats stay floats; exact rationals become 'p/q' strings."""
    if value is None or isinstance(value, (int, float, str)):
        return value
    if isinstance(value, Fraction):
        return str(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _jsonify(value):
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    return _num(value)


def condition_block(report: ConditionReport) -> dict:
    return {
        "condition": report.condition,
        "verdict": report.verdict,
        "summary": report.summary,
        "metrics": _jsonify(report.metrics),
    }


def witness_block(witness: NonuniquenessWitness) -> dict:
    return {
        "plateau": witness.plateau,
        "gap": witness.gap,
        "sublimits": list(witness.sublimits),
        "normalizing": witness.r_label,
        "x_vs_a": {"status": witness.x_vs_a.status, "value": witness.x_vs_a.value},
        "z_vs_a": {"status": witness.z_vs_a.status, "value": witness.z_vs_a.value},
        "x_vs_z": {
            "status": witness.x_vs_z.status,
            "sublimits": list(witness.x_vs_z.sublimits),
        },
        "steps": [
            {"n": n, "r": r, "k": k, "ratio": ratio}
            for n, r, k, ratio in witness.rows
        ],
    }


def pretangent_block(fp: FinitePretangent) -> dict:
    return {
        "normalizing": fp.r_label,
        "tolerance": fp.tol,
        "depth": fp.depth,
        "classes": [
            {
                "label": c.label,
                "members": list(c.members),
                "radial_value": c.radial_value,
                "radial_exact": _num(c.radial_exact),
            }
            for c in fp.classes
        ],
        "matrix": [list(row) for row in fp.matrix],
        "exact_matrix": [list(row) for row in fp.exact_matrix],
        "dropped": [
            {"label": d.label, "status": d.status, "detail": d.detail}
            for d in fp.dropped
        ],
        "merged": [
            {"first": m.first, "second": m.second, "distance": m.distance}
            for m in fp.merged
        ],
    }


def tangency_block(report: TangencyReport) -> dict:
    return {
        "verdict": report.verdict,
        "normalizing": report.r_label,
        "base_values": list(report.base_values),
        "selectors": [
            {
                "selector": o.selector,
                "values": list(o.values),
                "extra": list(o.extra),
                "error": o.error,
            }
            for o in report.outcomes
        ],
        "summary": report.summary,
        "caveat": report.caveat,
    }


def equivalence_block(report: EquivalenceReport) -> dict:
    return {
        "verdict": report.verdict,
        "first": report.first_label,
        "second": report.second_label,
        "final_ratio": report.metrics["final_ratio"],
        "summary": report.summary,
    }


# ---------------------------------------------------------------------------
# the run itself
# ---------------------------------------------------------------------------


def _space_summary(space: SpaceOracle) -> dict:
    return {
        "kind": space.kind,
        "label": space.label,
        "exact": space.exact,
        "params": _jsonify(space.params()),
    }


def _equivalence_pair(config: AnalysisConfig, space: SpaceOracle):
    other = config.equivalence_other
    if other == "tangent-ray":
        if not isinstance(space, PolynomialCurve):
            raise ValueError('"tangent-ray" partner needs a curve space')
        return space, curve_tangent_ray(space)
    if other == "ray-pair":
        if not isinstance(space, PlanarRays):
            raise ValueError('"ray-pair" partner needs a crossing-rays space')
        return planar_ray_pair(space)
    return space, build_space(other)


def run_analysis(config: AnalysisConfig) -> Report:
    """Execute the configured tasks in dependency order.

    Returns a Report whose `results` carry one JSON-ready block per task.
    Task failures never abort the run: they are recorded under `errors` and
    later tasks that do not depend on the failed one still execute.
    """
    space = build_space(config.space)
    report = Report(config=config.to_json_dict(), space=_space_summary(space))
    tol_abs = config.tol_abs if config.tol_abs is not None else default_tol_abs(space)
    quotient_tol = (
        config.quotient_tol
        if config.quotient_tol is not None
        else default_quotient_tol(space)
    )

    def record_error(task: str, exc: Exception) -> None:
        report.errors.append(
            {"task": task, "error": type(exc).__name__, "detail": str(exc)}
        )

    conditions: dict[str, ConditionReport] = {}
    verdict = None
    if "conditions" in config.tasks:
        try:
            r_grid = resolve_r_grid(config, space)
            conditions["i"] = condition_i(
                space, r_grid=r_grid, k_grid=config.k_grid,
                window=config.window, tol_abs=tol_abs,
            )
            conditions["ii"] = condition_ii(
                space, r_grid=r_grid, eps=config.eps,
                window=config.window, tol_abs=tol_abs,
            )
            conditions["iii"] = condition_iii(
                space, r_grid=r_grid, eps=config.eps,
                window=config.window, tol_abs=tol_abs,
            )
            verdict = uniqueness_verdict(
                [conditions["i"], conditions["ii"], conditions["iii"]]
            )
            report.results["conditions"] = {
                name: condition_block(rep) for name, rep in conditions.items()
            }
            report.results["uniqueness"] = {
                "verdict": verdict.verdict,
                "failing": list(verdict.failing),
            }
            for name, rep in conditions.items():
                report.csv_blocks[CSV_FILES[name]] = (rep.columns, rep.rows)
        except _TASK_EXCEPTIONS as exc:
            record_error("conditions", exc)

    normalizing = resolve_normalizing(config, space)

    if "witness" in config.tasks:
        if "i" not in conditions:
            record_error(
                "witness", ValueError("witness needs the conditions task to run first")
            )
        else:
            try:
                witness = nonuniqueness_witness(
                    space, conditions["i"], normalizing,
                    depth=config.depth, window=config.window, tol=quotient_tol,
                )
                report.results["witness"] = witness_block(witness)
            except WitnessNotFoundError as exc:
                # an unrealizable plateau is evidence against the fail
                # verdict, not an operational failure
                report.results["witness"] = {"not_found": str(exc)}
                if verdict is not None and verdict.verdict == "non-unique":
                    report.results["uniqueness"]["verdict"] = "inconclusive"
                    report.results["uniqueness"]["downgraded"] = (
                        "witness construction could not realize the plateau"
                    )
            except _TASK_EXCEPTIONS as exc:
                record_error("witness", exc)

    pretangent: Optional[FinitePretangent] = None
    if "pretangent" in config.tasks:
        try:
            candidates = candidate_library(space, normalizing, mesh=config.mesh)
            pretangent = pretangent_approximation(
                space, normalizing, candidates,
                tol=quotient_tol, window=config.window,
            )
            block = pretangent_block(pretangent)
            if isinstance(space, LineLikeSpace):
                kappa = kappa_cross_check(space, normalizing, pretangent, 1.0)
                block["radial_consistency"] = {
                    "kappa0": kappa.kappa0,
                    "max_residual": kappa.max_residual,
                    "collapse_ok": kappa.collapse_ok,
                    "ok": kappa.ok,
                }
            report.results["pretangent"] = block
        except _TASK_EXCEPTIONS as exc:
            record_error("pretangent", exc)

    if "tangency" in config.tasks:
        try:
            tangency = tangency_check(
                space, normalizing,
                selectors=resolve_selectors(config, space),
                tol=quotient_tol, window=config.window,
                seed=config.seed, uniqueness=verdict,
            )
            report.results["tangency"] = tangency_block(tangency)
        except _TASK_EXCEPTIONS as exc:
            record_error("tangency", exc)

    if "tangent-equivalence" in config.tasks:
        try:
            first, second = _equivalence_pair(config, space)
            equivalence = tangent_equivalence_epsilon(first, second)
            report.results["tangent_equivalence"] = equivalence_block(equivalence)
            report.csv_blocks[CSV_FILES["equivalence"]] = (
                equivalence.columns, equivalence.rows
            )
        except _TASK_EXCEPTIONS as exc:
            record_error("tangent-equivalence", exc)

    if "cantor-report" in config.tasks:
        try:
            marked = space.marked_end if isinstance(space, CantorSpace) else 0
            values = ce_truncation(config.cantor_bound, config.cantor_depth, marked)
            report.results["cantor_report"] = {
                "bound": _num(config.cantor_bound),
                "depth": config.cantor_depth,
                "marked": marked,
                "count": len(values),
                "values": [str(v) for v in values],
            }
            report.csv_blocks[CSV_FILES["cantor"]] = (
                ("value",), [(v,) for v in values]
            )
        except _TASK_EXCEPTIONS as exc:
            record_error("cantor-report", exc)

    return report


# ---------------------------------------------------------------------------
# deterministic emission
# ---------------------------------------------------------------------------


def _csv_cell(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(header: tuple, rows) -> str:
    """RFC-4180 text: comma-separated, CRLF line endings, header first."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(cell) for cell in row])
    return buffer.getvalue()


def render_report_json(report: Report) -> str:
    return json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n"


def emit_outputs(report: Report, out_dir: Union[str, Path]) -> list[Path]:
    """Write report.json and every CSV profile; returns the paths written.

    Output bytes are a pure function of the report, which is itself a pure
    function of the config: reruns produce identical files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    report_path = out / "report.json"
    report_path.write_text(render_report_json(report), encoding="utf-8")
    written.append(report_path)
    for filename in sorted(report.csv_blocks):
        header, rows = report.csv_blocks[filename]
        path = out / filename
        path.write_text(render_csv(header, rows), encoding="utf-8", newline="")
        written.append(path)
    return written
