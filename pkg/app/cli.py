"""Command-line front end: ``run``, ``sweep`` and ``rank``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, NoReturn, Optional, Sequence, Tuple

from .backend.pipeline import RunSpec, make_run_spec, report_for, run_sweep
from .core.errors import ConfigError
from .metrics.csvio import read_sweep_csv, write_aggregate_csv, write_runs_csv
from .metrics.ranking import format_rank
from .netsim.engine import run
from .netsim.scenario import Scenario
from .netsim.trace import trace_digest, write_trace
from .routing.factory import PROTOCOLS
from .utils.env import EnvironmentValidationError, validate_output_paths
from .utils.scenario_file import parse_field_size, parse_flow, parse_scenario_text

logger = logging.getLogger(__name__)

DEFAULT_PAUSE_TIMES: Tuple[float, ...] = (0.0, 20.0, 40.0, 60.0, 80.0, 100.0)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    """Argument errors become :class:`ConfigError` so they share exit code 1."""

    def error(self, message: str) -> NoReturn:
        raise ConfigError(f"{message} (see --help)")


# ----------------------------------------------------------------------
# Flag value parsers
# ----------------------------------------------------------------------
def parse_seeds(text: str) -> Tuple[int, ...]:
    """``1..10`` (inclusive) or ``1,4,9``."""

    try:
        if ".." in text:
            low, high = (int(part) for part in text.split("..", 1))
            if high < low:
                raise ConfigError(f"empty seed range {text!r}", field="seeds")
            return tuple(range(low, high + 1))
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"expected a..b or a comma list, got {text!r}", field="seeds") from exc


def parse_floats(text: str, field: str) -> Tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"expected a comma list of numbers, got {text!r}", field=field) from exc


def parse_protocols(text: str) -> Tuple[str, ...]:
    names = tuple(part.strip().lower() for part in text.split(",") if part.strip())
    unknown = [name for name in names if name not in PROTOCOLS]
    if unknown:
        choices = ", ".join(sorted(PROTOCOLS))
        raise ConfigError(
            f"unknown protocol {unknown[0]!r}; choose from {choices}", field="protocols"
        )
    return names


def _scenario_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    simple = {
        "nodes": "node_count",
        "range": "radio_range",
        "duration": "duration",
        "seed": "seed",
        "pause_time": "pause_time",
        "flow_count": "flow_count",
    }
    for attr, name in simple.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides[name] = value
    if args.field is not None:
        try:
            overrides["field_x"], overrides["field_y"] = parse_field_size(args.field)
        except ValueError as exc:
            raise ConfigError(str(exc), field="field") from exc
    if args.flows:
        try:
            overrides["flows"] = tuple(parse_flow(text) for text in args.flows)
        except ValueError as exc:
            raise ConfigError(str(exc).splitlines()[0], field="flows") from exc
    if getattr(args, "protocol", None) is not None:
        overrides["protocol"] = parse_protocols(args.protocol)[0]
    if args.static:
        overrides["static"] = True
    if args.connected:
        overrides["connected"] = True
    return overrides


def load_scenario(args: argparse.Namespace) -> Scenario:
    """Scenario file (or defaults) with command-line flags applied on top."""

    text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    return parse_scenario_text(text, _scenario_overrides(args))


# ----------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------
def cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args)
    validate_output_paths([args.trace_out, args.csv_out])
    result = run(scenario)
    report = report_for(result)
    if args.trace_out:
        write_trace(result.trace, args.trace_out)
        logger.info("Trace written to %s (sha256 %s)", args.trace_out, trace_digest(result.trace))
    if args.csv_out:
        write_runs_csv([report], args.csv_out)
    sys.stdout.write(report.model_dump_json(indent=2) + "\n")
    return EXIT_OK


def build_run_spec(args: argparse.Namespace) -> RunSpec:
    scenario = load_scenario(args)
    protocols = parse_protocols(args.protocols) if args.protocols else tuple(PROTOCOLS)
    pause_times = (
        parse_floats(args.pause_times, "pause_times")
        if args.pause_times
        else ((scenario.pause_time,) if args.static else DEFAULT_PAUSE_TIMES)
    )
    seeds = parse_seeds(args.seeds) if args.seeds else (scenario.seed,)
    return make_run_spec(
        scenario=scenario,
        protocols=protocols,
        pause_times=pause_times,
        seeds=seeds,
        jobs=args.jobs,
        csv_out=args.csv_out,
        agg_out=args.agg_out,
    )


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = build_run_spec(args)
    validate_output_paths([spec.csv_out, spec.agg_out])
    logger.info(
        "Sweep: %d protocols x %d pause times x %d seeds",
        len(spec.protocols),
        len(spec.pause_times),
        len(spec.seeds),
    )
    reports, aggregates = run_sweep(spec)
    if spec.csv_out is None:
        write_runs_csv(reports, sys.stdout)
        if spec.agg_out is None and args.aggregate:
            write_aggregate_csv(aggregates, sys.stdout)
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    frame = read_sweep_csv(args.csv)
    sys.stdout.write(format_rank(frame))
    return EXIT_OK


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------
def _add_scenario_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("scenario")
    group.add_argument("--config", metavar="FILE", help="scenario file (key = value lines)")
    group.add_argument("--nodes", type=int, help="number of nodes")
    group.add_argument("--field", metavar="WxH", help="field size in metres, e.g. 800x800")
    group.add_argument("--range", type=float, help="radio range in metres")
    group.add_argument("--duration", type=float, help="simulated seconds")
    group.add_argument("--flow-count", dest="flow_count", type=int, help="random CBR flows")
    group.add_argument(
        "--flows",
        action="append",
        metavar="SRC:DST:BYTES:INTERVAL",
        help="explicit CBR flow (repeatable)",
    )
    group.add_argument("--static", action="store_true", help="no mobility (pause = duration)")
    group.add_argument(
        "--connected", action="store_true", help="redraw placement until the graph is connected"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="manet-sim", description="Deterministic MANET routing simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run_parser = sub.add_parser("run", help="simulate one scenario")
    _add_scenario_flags(run_parser)
    run_parser.add_argument("-p", "--protocol", help="dymo, aodv, dsdv or dsr")
    run_parser.add_argument("--seed", type=int)
    run_parser.add_argument("--pause-time", dest="pause_time", type=float)
    run_parser.add_argument("--trace-out", metavar="FILE")
    run_parser.add_argument("--csv-out", metavar="FILE")
    run_parser.set_defaults(handler=cmd_run)

    sweep_parser = sub.add_parser("sweep", help="protocols x pause times x seeds")
    _add_scenario_flags(sweep_parser)
    sweep_parser.add_argument("--protocols", help="comma list (default: all four)")
    sweep_parser.add_argument("--pause-times", dest="pause_times", help="comma list of seconds")
    sweep_parser.add_argument("--seeds", help="a..b or comma list")
    sweep_parser.add_argument("--jobs", type=int, default=1, help="parallel runs")
    sweep_parser.add_argument("--csv-out", metavar="FILE", help="run rows (default: stdout)")
    sweep_parser.add_argument("--agg-out", metavar="FILE", help="aggregate rows")
    sweep_parser.add_argument(
        "--aggregate", action="store_true", help="append aggregate rows to stdout output"
    )
    sweep_parser.set_defaults(handler=cmd_sweep)

    rank_parser = sub.add_parser("rank", help="ordinal comparison table from a sweep CSV")
    rank_parser.add_argument("csv", help="sweep CSV file")
    rank_parser.set_defaults(handler=cmd_rank)
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        _configure_logging(args)
        return int(args.handler(args))
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except (OSError, EnvironmentValidationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO


__all__ = ["build_parser", "build_run_spec", "main", "parse_protocols", "parse_seeds"]
