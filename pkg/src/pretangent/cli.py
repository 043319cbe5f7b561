"""Command-line front end.

Three journeys: `analyze` runs a configured analysis end to end, `witness`
is a shortcut that hunts for a non-uniqueness witness, and `cantor-table`
prints or writes the ternary-net truncation table without a config file.

Exit codes: 0 for a completed run regardless of mathematical verdicts
(failing conditions are results, not errors), 1 when some task errored, and
2 for operational problems (bad config, unreadable or unwritable paths).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .analyzer import emit_outputs, render_csv, run_analysis
from .config import ConfigError, parse_config
from .ternary import TernaryError, ce_truncation

EXIT_OK = 0
EXIT_TASK_ERROR = 1
EXIT_OPERATIONAL = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pretangent",
        description="Analyze uniqueness and tangency of metric rescaling limits.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run all configured tasks")
    analyze.add_argument("config", help="path to a JSON configuration file")
    _common_flags(analyze)

    witness = sub.add_parser(
        "witness", help="run conditions and hunt for a non-uniqueness witness"
    )
    witness.add_argument("config", help="path to a JSON configuration file")
    _common_flags(witness)

    table = sub.add_parser("cantor-table", help="emit the ternary-net truncation table")
    table.add_argument("--bound", default="1", help="upper bound, number or p/q (default 1)")
    table.add_argument("--depth", type=int, default=4, help="digit resolution (default 4)")
    table.add_argument(
        "--marked", type=int, default=0, choices=(0, 1),
        help="marked endpoint, 0 or 1 (default 0)",
    )
    table.add_argument("--out", metavar="DIR", help="write cantor_table.csv under DIR")
    table.add_argument("--quiet", action="store_true", help="suppress stdout summary")
    return parser


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", metavar="DIR", default="out", help="output directory (default ./out)")
    sub.add_argument("--seed", type=int, default=None, help="override the config seed")
    sub.add_argument("--quiet", action="store_true", help="suppress stdout summary")


def _load_config(path: str, seed):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    config = parse_config(text)
    if seed is not None:
        config = replace(config, seed=seed)
    return config


def _print_summary(report, out) -> None:
    results = report.results
    if "uniqueness" in results:
        verdict = results["uniqueness"]
        line = f"uniqueness: {verdict['verdict']}"
        if verdict.get("failing"):
            line += f" (failing: {', '.join(verdict['failing'])})"
        print(line)
    if "witness" in results:
        witness = results["witness"]
        if "not_found" in witness:
            print(f"witness: not found ({witness['not_found']})")
        else:
            print(
                f"witness: sublimits {witness['sublimits'][0]:.6g} / "
                f"{witness['sublimits'][1]:.6g}, gap {witness['gap']:.6g}"
            )
    if "pretangent" in results:
        classes = results["pretangent"]["classes"]
        values = ", ".join(
            c["radial_exact"] if c["radial_exact"] is not None else f"{c['radial_value']:.6g}"
            for c in classes
        )
        print(f"limit classes ({len(classes)}): {values}")
    if "tangency" in results:
        print(f"tangency: {results['tangency']['verdict']}")
    if "tangent_equivalence" in results:
        eq = results["tangent_equivalence"]
        print(f"tangent equivalence: {eq['verdict']} (final ratio {eq['final_ratio']:.6g})")
    if "cantor_report" in results:
        print(f"ternary net: {results['cantor_report']['count']} values")
    for error in report.errors:
        print(f"error in task {error['task']}: {error['detail']}", file=sys.stderr)
    print(f"wrote {out}")


def _run_analysis_command(args, tasks_override=None) -> int:
    try:
        config = _load_config(args.config, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_OPERATIONAL
    if tasks_override is not None:
        config = replace(config, tasks=tuple(tasks_override))
    report = run_analysis(config)
    try:
        written = emit_outputs(report, args.out)
    except OSError as exc:
        print(f"cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_OPERATIONAL
    if not args.quiet:
        _print_summary(report, written[0].parent)
    return EXIT_OK if report.ok else EXIT_TASK_ERROR


def _run_cantor_table(args) -> int:
    try:
        values = ce_truncation(args.bound, args.depth, args.marked)
    except (TernaryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OPERATIONAL
    text = render_csv(("value",), [(v,) for v in values])
    if args.out:
        try:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            path = out / "cantor_table.csv"
            path.write_text(text, encoding="utf-8", newline="")
        except OSError as exc:
            print(f"cannot write outputs: {exc}", file=sys.stderr)
            return EXIT_OPERATIONAL
        if not args.quiet:
            print(f"{len(values)} values, wrote {path}")
    elif not args.quiet:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "analyze":
        return _run_analysis_command(args)
    if args.command == "witness":
        return _run_analysis_command(args, tasks_override=("conditions", "witness"))
    if args.command == "cantor-table":
        return _run_cantor_table(args)
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
