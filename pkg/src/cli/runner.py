"""
Command-line runner.

Subcommands:
    validate   check scenario invariants
    capacity   D_temp, T̄_thr and λ per scenario
    pairs      the pairwise spacing table
    sweep      speed / separation sensitivity grid
    simulate   saturated-stream occupancy check of λ
    extract    input tables from recorded tracks

Exit status: 0 success, 1 validation failure, 2 input error, 3 solver failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from ..analysis.occupancy_sim import TRACE_COLUMNS, SimConfig, simulate
from ..analysis.sensitivity import (
    CSV_COLUMNS as SWEEP_COLUMNS,
    DEFAULT_REGIMES,
    DEFAULT_SPEED_GRID,
    SpeedScalingError,
    SweepSpec,
    grid_from_text,
    regimes_from_text,
    run_sweep,
    scale_speeds,
)
from ..config import SolverOptions, configure_logging
from ..model.capacity import CSV_COLUMNS as CAPACITY_COLUMNS
from ..model.capacity import CapacityInternalError, MissingCombinationError, capacity
from ..model.kinematics import KinematicsError
from ..model.pairwise import InfeasibleSpacingError, SpacingSolverError, solve_all_pairs
from ..scenario.loader import (
    ScenarioError,
    ScenarioSchemaError,
    ScenarioValidationError,
    load_scenario,
    validate,
)
from ..scenario.models import AirspaceScenario
from ..trajectory.gates import DEFAULT_CAPTURE_RADIUS_NM, ExtractionError, GateNotPassedError, load_gates
from ..trajectory.stats import build_tables, load_flights, scenario_skeleton
from . import formatting


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3

PAIR_COLUMNS = ("lead_path", "lead_class", "trail_path", "trail_class",
                "probability", "t0_min", "delta_t_min", "binding")

# Options whose values may start with a minus sign
DASH_VALUE_OPTIONS = frozenset({"--grid"})


class CliInputError(Exception):
    """Bad command-line values."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tma-capacity",
        description="Arrival capacity of a terminal control area from its structural space",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def output_options(sub: argparse.ArgumentParser):
        sub.add_argument("--out", help="Write output here instead of stdout")
        sub.add_argument("--format", choices=["table", "csv", "json"], default="table")

    def model_options(sub: argparse.ArgumentParser):
        sub.add_argument("--s", type=float, dest="s_tma", help="Override S, in-TMA separation (NM)")
        sub.add_argument("--sthr", type=float, dest="s_thr", help="Override S_thr, threshold separation (NM)")
        sub.add_argument("--speed-scale", type=float, default=0.0,
                         help="Scale entry and MP_iap speeds by (1 + fraction)")
        sub.add_argument("--tolerance", type=float, default=1e-6, help="Solver tolerance on t0 (min)")

    validate_cmd = subparsers.add_parser("validate", help="Check scenario invariants")
    validate_cmd.add_argument("scenarios", nargs="+", help="Scenario JSON files")

    capacity_cmd = subparsers.add_parser("capacity", help="Compute D_temp, T̄_thr and λ")
    capacity_cmd.add_argument("scenarios", nargs="+", help="Scenario JSON files")
    model_options(capacity_cmd)
    output_options(capacity_cmd)
    capacity_cmd.add_argument("--floor", action="store_true", help="Also report ⌊λ⌋")

    pairs_cmd = subparsers.add_parser("pairs", help="Dump the pairwise spacing table")
    pairs_cmd.add_argument("scenario", help="Scenario JSON file")
    model_options(pairs_cmd)
    output_options(pairs_cmd)

    sweep_cmd = subparsers.add_parser("sweep", help="Speed and separation sensitivity sweep")
    sweep_cmd.add_argument("scenario", help="Scenario JSON file")
    sweep_cmd.add_argument("--regimes", help="Comma-separated S:S_thr pairs (default 5:8,5:5,3:5,3:3)")
    sweep_cmd.add_argument("--grid", help="Speed-scale grid start:stop:step (default -0.1:0.1:0.01); "
                        "negative starts work as --grid -0.2:0:0.05 or --grid=-0.2:0:0.05")
    sweep_cmd.add_argument("--scale-thr", action="store_true", help="Scale threshold speeds too")
    sweep_cmd.add_argument("--tolerance", type=float, default=1e-6, help="Solver tolerance on t0 (min)")
    output_options(sweep_cmd)

    simulate_cmd = subparsers.add_parser("simulate", help="Occupancy simulation of a saturated stream")
    simulate_cmd.add_argument("scenario", help="Scenario JSON file")
    model_options(simulate_cmd)
    output_options(simulate_cmd)
    simulate_cmd.add_argument("--seed", type=int, default=0, help="Stream seed")
    simulate_cmd.add_argument("--n", type=int, default=100_000, help="Aircraft in the stream")
    simulate_cmd.add_argument("--warmup", type=float, default=0.05, help="Warm-up share of the stream")
    simulate_cmd.add_argument("--trace", help="Write the per-aircraft event trace CSV here")

    extract_cmd = subparsers.add_parser("extract", help="Build input tables from trajectory data")
    extract_cmd.add_argument("flights", help="Trajectory CSV")
    extract_cmd.add_argument("gates", help="Gate JSON file")
    extract_cmd.add_argument("--runway", default="RWY", help="Runway label for the skeleton")
    extract_cmd.add_argument("--radius", type=float, default=DEFAULT_CAPTURE_RADIUS_NM,
                             help="Capture radius (NM)")
    extract_cmd.add_argument("--out", help="Directory for the tables and the scenario skeleton")
    extract_cmd.add_argument("--format", choices=["table", "csv", "json"], default="table")

    return parser


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info("Wrote %s", out)
    else:
        sys.stdout.write(text)


def _solver_options(args) -> SolverOptions:
    try:
        return SolverOptions(tolerance=args.tolerance)
    except ValidationError as e:
        raise CliInputError(f"--tolerance: {e.errors()[0]['msg']}") from e


def _prepared_scenario(path: str, args) -> AirspaceScenario:
    """Load a scenario and apply the separation and speed overrides."""
    scenario = load_scenario(path)
    s_tma = getattr(args, "s_tma", None)
    s_thr = getattr(args, "s_thr", None)
    if s_tma is not None or s_thr is not None:
        base = scenario.separation
        policy = base.with_values(
            s_tma if s_tma is not None else base.s_tma,
            s_thr if s_thr is not None else base.s_thr,
        )
        scenario = scenario.with_separation(policy)
    scenario = scale_speeds(scenario, getattr(args, "speed_scale", 0.0) or 0.0)
    violations = validate(scenario)
    if violations:
        raise ScenarioValidationError(f"{path}: overrides break the scenario", violations)
    return scenario


def cmd_validate(args) -> int:
    status = EXIT_OK
    for path in args.scenarios:
        try:
            scenario = load_scenario(path)
        except ScenarioValidationError as e:
            sys.stdout.write(formatting.violations_text(path, e.violations))
            status = max(status, EXIT_VALIDATION)
            continue
        sys.stdout.write(formatting.violations_text(f"{path} ({scenario.runway_id})", []))
    return status


def cmd_capacity(args) -> int:
    options = _solver_options(args)
    reports = [capacity(_prepared_scenario(path, args), options=options) for path in args.scenarios]
    if args.format == "table":
        text = formatting.capacity_table(reports, floor=args.floor)
    elif args.format == "csv":
        columns = CAPACITY_COLUMNS + (("lambda_floor",) if args.floor else ())
        rows = []
        for report in reports:
            row = report.csv_row()
            if args.floor:
                row["lambda_floor"] = report.lambda_floor
            rows.append(row)
        text = formatting.render_csv(rows, columns)
    else:
        text = formatting.render_json([report.to_dict(include_floor=args.floor) for report in reports])
    _emit(text, args.out)
    return EXIT_OK


def cmd_pairs(args) -> int:
    scenario = _prepared_scenario(args.scenario, args)
    table = solve_all_pairs(scenario, _solver_options(args))
    if args.format == "table":
        text = formatting.pairs_table(table)
    elif args.format == "csv":
        text = formatting.render_csv(table.to_rows(), PAIR_COLUMNS)
    else:
        text = formatting.render_json({"runway": table.runway_id, "pairs": table.to_rows()})
    _emit(text, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        sweep = SweepSpec(
            speed_scale_grid=grid_from_text(args.grid) if args.grid else DEFAULT_SPEED_GRID,
            separation_regimes=regimes_from_text(args.regimes) if args.regimes else DEFAULT_REGIMES,
            scale_thr_speeds=args.scale_thr,
        )
    except ValueError as e:
        raise CliInputError(str(e)) from e
    scenario = load_scenario(args.scenario)
    try:
        rows = run_sweep(scenario, sweep, _solver_options(args))
    except ValueError as e:
        raise CliInputError(str(e)) from e
    if args.format == "table":
        text = formatting.sweep_table(rows)
    elif args.format == "csv":
        text = formatting.render_csv([row.csv_row() for row in rows], SWEEP_COLUMNS)
    else:
        text = formatting.render_json({"runway": scenario.runway_id, "rows": [row.csv_row() for row in rows]})
    _emit(text, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        config = SimConfig(n_aircraft=args.n, rng_seed=args.seed, warmup_fraction=args.warmup,
                           record_trace=bool(args.trace))
    except ValidationError as e:
        raise CliInputError("; ".join(f"{err['loc'][0]}: {err['msg']}" for err in e.errors())) from e
    scenario = _prepared_scenario(args.scenario, args)
    report = capacity(scenario, options=_solver_options(args))
    result = simulate(scenario, report.pair_table, config)

    summary = dict(result.to_dict(), runway=scenario.runway_id, lambda_analytic=report.lambda_rwy)
    if args.format == "table":
        text = formatting.simulation_table(result, report.lambda_rwy)
    elif args.format == "csv":
        text = formatting.render_csv([summary], sorted(summary))
    else:
        text = formatting.render_json(summary)
    _emit(text, args.out)
    if args.trace:
        Path(args.trace).write_text(formatting.render_csv(result.trace, TRACE_COLUMNS), encoding="utf-8")
    return EXIT_OK


def cmd_extract(args) -> int:
    gates = load_gates(args.gates, radius_nm=args.radius)
    tables = build_tables(load_flights(args.flights), gates)
    skeleton = scenario_skeleton(tables, args.runway)

    proportions = formatting.render_csv(tables.proportions.to_dict("records"), list(tables.proportions.columns))
    class_mix = formatting.render_csv(tables.class_mix.to_dict("records"), list(tables.class_mix.columns))
    speeds = formatting.render_csv(tables.speeds.to_dict("records"), list(tables.speeds.columns))

    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "proportions.csv").write_text(proportions, encoding="utf-8")
        (out_dir / "class_mix.csv").write_text(class_mix, encoding="utf-8")
        (out_dir / "speeds.csv").write_text(speeds, encoding="utf-8")
        (out_dir / "scenario_skeleton.json").write_text(formatting.render_json(skeleton), encoding="utf-8")
        logger.info("Wrote extraction tables to %s", out_dir)
    elif args.format == "json":
        sys.stdout.write(formatting.render_json(skeleton))
    elif args.format == "csv":
        sys.stdout.write("\n".join((proportions, class_mix, speeds)))
    else:
        sys.stdout.write(f"Matched {tables.matched_count} flights, {tables.unmatched_count} unmatched\n\n")
        for title, frame in (("Traffic proportions", tables.proportions),
                             ("Aircraft mix", tables.class_mix),
                             ("Mean passing speeds (kt)", tables.speeds)):
            sys.stdout.write(f"{title}\n{frame.to_string(index=False, float_format=lambda x: f'{x:.2f}')}\n\n")
    return EXIT_OK


def _is_negative_value(token: str) -> bool:
    return token.startswith("-") and token[1:2] in set("0123456789.")


def _attach_dash_values(argv: List[str]) -> List[str]:
    """Rewrite `--grid -0.1:...` as `--grid=-0.1:...` so argparse keeps the value."""
    rewritten: List[str] = []
    i = 0
    while i < len(argv):
        if argv[i] in DASH_VALUE_OPTIONS and i + 1 < len(argv) and _is_negative_value(argv[i + 1]):
            rewritten.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
            continue
        rewritten.append(argv[i])
        i += 1
    return rewritten


COMMANDS = {
    "validate": cmd_validate,
    "capacity": cmd_capacity,
    "pairs": cmd_pairs,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "extract": cmd_extract,
}


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and map failures to exit codes.

    Diagnostics go to stderr; results to stdout or --out.
    """
    args = build_parser().parse_args(_attach_dash_values(sys.argv[1:] if argv is None else list(argv)))
    configure_logging()
    try:
        return COMMANDS[args.command](args)
    except ScenarioValidationError as e:
        sys.stderr.write(formatting.violations_text(str(e), e.violations))
        return EXIT_VALIDATION
    except SpeedScalingError as e:
        sys.stderr.write(formatting.violations_text(str(e), e.violations))
        return EXIT_VALIDATION
    except (FileNotFoundError, ScenarioSchemaError, ScenarioError, ExtractionError,
            GateNotPassedError, CliInputError) as e:
        sys.stderr.write(f"✗ {e}\n")
        return EXIT_INPUT
    except (SpacingSolverError, InfeasibleSpacingError, KinematicsError,
            MissingCombinationError, CapacityInternalError) as e:
        sys.stderr.write(f"✗ Solver failure: {e}\n")
        return EXIT_SOLVER


def main(argv: Optional[List[str]] = None):
    sys.exit(run(argv))
