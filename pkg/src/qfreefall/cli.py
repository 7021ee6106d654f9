"""Command line front end.

Subcommands: run (execute a scenario config and write its report),
validate (parse and check a config without running it), and
list-scenarios.  Reports are a JSON summary plus one CSV per table;
every file is byte-identical across reruns of the same config, so
wall-clock timing goes to the terminal only.  Exit status: 0 when every
check passed, 1 when a check failed, 2 for configuration problems, 3
when a numerical guard tripped.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import SCENARIOS, load_config
from .errors import ConfigError, NumericalGuardError
from .scenarios import ScenarioResult, Table, run_scenario

THREADS_ENV = "QFREEFALL_THREADS"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfreefall",
        description="Run free-fall scenario checks from a config file.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario and write its report")
    run.add_argument("config", help="path to a scenario config file")
    run.add_argument(
        "--out-dir", default=".", help="directory for report files (default: .)"
    )
    run.add_argument(
        "--threads",
        type=int,
        default=None,
        metavar="N",
        help=f"worker threads for parameter sweeps (default: ${THREADS_ENV} or 1)",
    )
    run.add_argument(
        "--si", action="store_true", help="force SI units regardless of the config"
    )
    run.add_argument(
        "--no-figures", action="store_true", help="skip rendering the PNG figure"
    )

    validate = sub.add_parser("validate", help="check a config without running it")
    validate.add_argument("config", help="path to a scenario config file")

    sub.add_parser("list-scenarios", help="print the available scenario kinds")
    return parser


def _resolve_threads(flag_value: int | None) -> int:
    if flag_value is None:
        raw = os.environ.get(THREADS_ENV)
        if raw is None:
            return 1
        try:
            flag_value = int(raw)
        except ValueError:
            raise ConfigError(
                f"{THREADS_ENV} must be an integer, got {raw!r}"
            ) from None
    if flag_value < 1:
        raise ConfigError(f"thread count must be positive, got {flag_value}")
    return flag_value


def _jsonable(value):
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    raise TypeError(f"not JSON serializable: {value!r}")


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_csv(path: Path, table: Table) -> None:
    header, rows = table
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])


def _write_report(result: ScenarioResult, loaded_si: bool, out_dir: Path, basename: str) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    table_files = {name: f"{basename}_{name}.csv" for name in result.tables}
    report = {
        "scenario": result.kind,
        "si": loaded_si,
        "version": __version__,
        "all_passed": result.all_passed,
        "checks": result.checks,
        "summary": result.summary,
        "tables": table_files,
    }
    json_path = out_dir / f"{basename}.json"
    json_path.write_text(
        json.dumps(report, indent=2, sort_keys=True, default=_jsonable) + "\n",
        encoding="utf-8",
    )
    written.append(json_path)

    for name, table in result.tables.items():
        csv_path = out_dir / table_files[name]
        _write_csv(csv_path, table)
        written.append(csv_path)
    return written


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        loaded = load_config(args.config, si_override=args.si)
        threads = _resolve_threads(args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    started = time.perf_counter()
    try:
        result = run_scenario(loaded, threads)
    except NumericalGuardError as exc:
        print(
            f"numerical guard tripped: {type(exc).__name__}: {exc}", file=sys.stderr
        )
        return 3
    elapsed = time.perf_counter() - started

    out_dir = Path(args.out_dir)
    written = _write_report(result, loaded.si, out_dir, loaded.basename)
    if not args.no_figures:
        from .figures import render_figure

        written.append(render_figure(result, out_dir / f"{loaded.basename}.png"))

    print(f"scenario: {result.kind}")
    for name, passed in result.checks.items():
        print(f"check {name}: {'pass' if passed else 'FAIL'}")
    for path in written:
        print(f"wrote {path}")
    print(f"completed in {elapsed:.3f} s")
    return 0 if result.all_passed else 1


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        loaded = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    print(f"ok: {loaded.kind} scenario ({args.config})")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "validate":
        return _cmd_validate(args)
    for name in SCENARIOS:
        print(name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
