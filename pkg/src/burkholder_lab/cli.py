"""Batch command line: `burkholder-lab <command> [options]`.

Every command builds a `RunConfig`, runs, and writes a report (JSON, CSV tables,
a Markdown summary and a metadata file). Options are merged in this order, later
ones winning: built-in defaults, environment and `.env`, the `--json` config
file, then flags.

Exit status: 0 when every check passed, 1 when any check failed, 2 when the
configuration or an input file is unusable.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from collections.abc import Callable, Sequence
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from burkholder_lab import __version__
from burkholder_lab.errors import ConfigurationError, FieldFormatError, GridError, LabError
from burkholder_lab.logger import attach_run_log, setup_logging
from burkholder_lab.models import (
    STOCHASTIC_COMMANDS,
    CheckRecord,
    Command,
    RunConfig,
    RunMetadata,
    RunReport,
)
from burkholder_lab.multipliers.fields import read_field, write_field
from burkholder_lab.multipliers.grid import (
    FrequencyGrid,
    MultiplierSymbolGrid,
    apply_symbol,
    lp_norm,
)
from burkholder_lab.multipliers.symbols import (
    symbol_beurling,
    symbol_gradient,
    symbol_identity,
    symbol_riesz,
    symbol_second_riesz,
    symbol_wirtinger,
)
from burkholder_lab.reporting.store import write_report
from burkholder_lab.reporting.tables import constants_table
from burkholder_lab.settings import get_settings
from burkholder_lab.suites import (
    LEHTO_THETAS,
    SuiteContext,
    constants_suite,
    lehto_records,
    lehto_rows,
    probe_suite,
    quasiconvex_suite,
    resolve_suites,
    run_suites,
    simulate_suite,
    simulation_kinds,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

SYMBOLS: dict[str, Callable[[FrequencyGrid], MultiplierSymbolGrid]] = {
    "identity": symbol_identity,
    "beurling": symbol_beurling,
    "riesz1": lambda grid: symbol_riesz(grid, 1),
    "riesz2": lambda grid: symbol_riesz(grid, 2),
    "r1r1": lambda grid: symbol_second_riesz(grid, 1, 1),
    "r2r2": lambda grid: symbol_second_riesz(grid, 2, 2),
    "r1r2": lambda grid: symbol_second_riesz(grid, 1, 2),
    "d1": lambda grid: symbol_gradient(grid, 1),
    "d2": lambda grid: symbol_gradient(grid, 2),
    "d": lambda grid: symbol_wirtinger(grid, conjugate=False),
    "dbar": lambda grid: symbol_wirtinger(grid, conjugate=True),
}

# Config-file keys, as accepted by RunConfig.
_CONFIG_KEYS = frozenset(RunConfig.model_fields) - {"command"}


# --------------------------------------------------------------------------- #
# Arguments
# --------------------------------------------------------------------------- #


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="burkholder-lab",
        description="Sharp martingale inequalities: constants, property suites and experiments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", dest="p_list", type=float, nargs="+", help="exponents, each > 1")
    common.add_argument("--seed", type=int, help="root seed for stochastic commands")
    common.add_argument("--samples", type=int, help="scan samples, fuzz cases or probe trials")
    common.add_argument("--grid", type=int, help="FFT grid size (a power of two)")
    common.add_argument("--paths", type=int, help="Monte Carlo paths")
    common.add_argument("--steps", type=int, help="Euler steps per path")
    common.add_argument("--tol", dest="tolerance", type=float, help="scan tolerance")
    common.add_argument("--in", dest="input_path", type=Path, help="input field file")
    common.add_argument(
        "--out",
        dest="output_path",
        type=Path,
        help="output field file (multiplier) or report directory (other commands)",
    )
    common.add_argument("--json", dest="config_file", type=Path, help="JSON config file")
    common.add_argument("--name", help="report file stem (default: the command)")
    common.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
    )

    helps = {
        Command.CONSTANTS: "table of sharp constants",
        Command.VERIFY: "run property suites",
        Command.MULTIPLIER: "apply a Fourier multiplier to a field file",
        Command.LEHTO: "Lehto extremal integrals and ratios",
        Command.SIMULATE: "Monte Carlo martingale pairs",
        Command.QUASICONVEX: "quasiconvexity counterexample search",
        Command.PROBE: "operator-norm ratio probes of the Beurling-Ahlfors operator",
    }
    subparsers = {
        command: commands.add_parser(command.value, parents=[common], help=text)
        for command, text in helps.items()
    }
    subparsers[Command.VERIFY].add_argument("--suite", help="suite name, comma list or 'all'")
    subparsers[Command.SIMULATE].add_argument(
        "--kind", help="pair kind (default: every kind with a known ceiling)"
    )
    subparsers[Command.MULTIPLIER].add_argument(
        "--symbol", choices=sorted(SYMBOLS), help="multiplier to apply"
    )
    subparsers[Command.LEHTO].add_argument(
        "--theta", type=float, nargs="+", help="Lehto parameters in (0, 1)"
    )
    return parser


def _read_config_file(path: Path) -> dict[str, Any]:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigurationError(f"config file {path} must hold a JSON object")
    unknown = sorted(set(payload) - _CONFIG_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown config keys in {path}: {', '.join(unknown)}")
    return payload


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge settings, the optional JSON file and flags into a validated RunConfig."""
    settings = get_settings()
    merged: dict[str, Any] = {"command": args.command}
    if args.command in STOCHASTIC_COMMANDS:
        merged["seed"] = settings.scan.seed
    if args.config_file is not None:
        merged.update(_read_config_file(args.config_file))
    flags = {
        key: value
        for key, value in vars(args).items()
        if key in _CONFIG_KEYS and value is not None
    }
    merged.update(flags)
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid configuration: {exc}") from exc


def _context(config: RunConfig) -> SuiteContext:
    return SuiteContext(
        p_list=tuple(config.p_list),
        seed=config.seed if config.seed is not None else get_settings().scan.seed,
        samples=config.samples,
        grid=config.grid,
        paths=config.paths,
        steps=config.steps,
        tolerance=config.tolerance,
        kind=config.kind,
        symbol=config.symbol,
    )


# --------------------------------------------------------------------------- #
# Commands
# --------------------------------------------------------------------------- #


def run_constants(config: RunConfig) -> RunReport:
    table = constants_table(config.p_list)
    records = constants_suite(_context(config))
    return RunReport(
        command=config.command, records=records, tables={"constants": table.to_dict("records")}
    )


def run_verify(config: RunConfig) -> RunReport:
    names = resolve_suites(config.suite)
    return RunReport(command=config.command, records=run_suites(names, _context(config)))


def run_multiplier(config: RunConfig) -> RunReport:
    """Apply a named symbol to `--in`, write `--out`, and check the written file reads back."""
    if config.symbol is None:
        raise ConfigurationError(f"--symbol is required; choose from {', '.join(sorted(SYMBOLS))}")
    if config.symbol not in SYMBOLS:
        raise ConfigurationError(f"unknown symbol {config.symbol!r}")
    if config.input_path is None or config.output_path is None:
        raise ConfigurationError("multiplier needs both --in and --out")

    field = read_field(config.input_path, get_settings().grid.box_length)
    symbol = SYMBOLS[config.symbol](field.grid)
    transformed = apply_symbol(field, symbol)
    written = write_field(config.output_path, transformed)
    reread = read_field(written, field.grid.box_length)

    gap = float(np.max(np.abs(reread.values - transformed.values)))
    records = [
        CheckRecord(
            suite="multiplier",
            citation="eq. (Fo)",
            value=gap,
            bound=0.0,
            passed=reread.values.shape == transformed.values.shape and gap == 0.0,
            details={"check": "field-round-trip", "path": str(written)},
        )
    ]
    norm_in, norm_out = lp_norm(field, 2.0), lp_norm(transformed, 2.0)
    if symbol.bound is not None:
        records.append(
            CheckRecord(
                suite="multiplier",
                citation="eq. (Fo)",
                value=norm_out,
                bound=symbol.bound * norm_in,
                passed=norm_out <= symbol.bound * norm_in * (1.0 + 1e-12),
                details={
                    "check": "l2-norm-within-symbol-bound",
                    "symbol": config.symbol,
                    "sup": symbol.sup(),
                },
            )
        )
    summary = {
        "symbol": config.symbol,
        "shape": "x".join(str(n) for n in field.grid.shape),
        "input_l2": norm_in,
        "output_l2": norm_out,
        "output_path": str(written),
    }
    logger.info("applied %s to %s, wrote %s", config.symbol, config.input_path, written)
    return RunReport(command=config.command, records=records, tables={"multiplier": [summary]})


def run_lehto(config: RunConfig) -> RunReport:
    thetas = tuple(config.theta) or LEHTO_THETAS
    bad = [theta for theta in thetas if not 0.0 < theta < 1.0]
    if bad:
        raise ConfigurationError(f"every theta must lie in (0, 1), got {bad}")
    rows = lehto_rows(tuple(config.p_list), thetas)
    return RunReport(command=config.command, records=lehto_records(rows), tables={"lehto": rows})


def run_simulate(config: RunConfig) -> RunReport:
    if config.kind is not None:
        try:
            simulation_kinds(config.p_list[0], config.kind)
        except ValueError as exc:
            raise ConfigurationError(f"unknown pair kind {config.kind!r}") from exc
    return RunReport(command=config.command, records=simulate_suite(_context(config)))


def run_quasiconvex(config: RunConfig) -> RunReport:
    return RunReport(command=config.command, records=quasiconvex_suite(_context(config)))


def run_probe(config: RunConfig) -> RunReport:
    return RunReport(command=config.command, records=probe_suite(_context(config)))


HANDLERS: dict[Command, Callable[[RunConfig], RunReport]] = {
    Command.CONSTANTS: run_constants,
    Command.VERIFY: run_verify,
    Command.MULTIPLIER: run_multiplier,
    Command.LEHTO: run_lehto,
    Command.SIMULATE: run_simulate,
    Command.QUASICONVEX: run_quasiconvex,
    Command.PROBE: run_probe,
}


def run(config: RunConfig) -> RunReport:
    """Dispatch one validated configuration to its command."""
    return HANDLERS[config.command](config)


def _report_directory(config: RunConfig) -> Path:
    if config.command is not Command.MULTIPLIER and config.output_path is not None:
        return config.output_path
    return get_settings().app.report_dir


# --------------------------------------------------------------------------- #
# Entry point
# --------------------------------------------------------------------------- #


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(args.log_level or settings.app.log_level)

    started = time.perf_counter()
    started_at = datetime.now(UTC).isoformat()
    try:
        config = build_config(args)
        if settings.app.log_to_file:
            attach_run_log(_report_directory(config), args.name or config.command.value)
        report = run(config)
    except (ConfigurationError, FieldFormatError, GridError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG
    except LabError as exc:
        logger.error("%s failed: %s", args.command, exc)
        return EXIT_CONFIG

    metadata = RunMetadata(
        version=__version__,
        started_at=started_at,
        finished_at=datetime.now(UTC).isoformat(),
        duration_seconds=time.perf_counter() - started,
        argv=argv,
        settings=settings.model_dump(mode="json"),
    )
    name = args.name or config.command.value
    write_report(
        report, _report_directory(config), name, metadata, indent=settings.app.json_indent
    )

    for record in report.failures:
        logger.error("%s: %s", record.suite, record.failure_message())
    if report.passed:
        logger.info("%s: all %d checks passed", config.command, len(report.records))
        return EXIT_OK
    logger.warning(
        "%s: %d of %d checks failed", config.command, len(report.failures), len(report.records)
    )
    return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
