"""
Command-line entry point for the mixed NCW combat toolkit
Threat rates, battle runs, strategy comparison and oracle verification from
scenario files
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

# Add src directory to path for imports
sys.path.append(str(Path(__file__).parent))

from engine.battle import compare_strategies, run_battle
from engine.oracle import SimplexGrid, verify_dominance, verify_scalarization_minimum
from model.core import optimal_allocation, proof_case, threat_rates
from model.exceptions import NCWError
from utils.config import (
    load_comparison_settings,
    load_oracle_settings,
    output_directory,
    parse_float_list,
)
from utils.logger import log_operation, setup_logger
from utils.report import (
    format_battle_summary,
    format_comparison_lines,
    format_dominance_lines,
    format_rates_line,
    format_scalarization_lines,
    write_comparison_csv,
    write_timeseries_csv,
)
from utils.scenario_file import load_scenario_file, load_strategy_file

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ORACLE_VIOLATION = 2
EXIT_IO = 3

logger = setup_logger()


class CommandLineError(Exception):
    """Bad command-line usage"""


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved for oracle violations
    def error(self, message):
        raise CommandLineError(message)


def _failure(error: str, exit_code: int) -> Dict[str, Any]:
    return {"success": False, "error": error, "exit_code": exit_code}


def _run(operation: str, command: Callable[[], Dict[str, Any]]) -> Dict[str, Any]:
    """Run a command, turning library errors into a result dict with its exit code"""
    log_operation(operation, "PENDING")
    try:
        result = command()
    except NCWError as e:
        result = _failure(str(e), EXIT_INVALID)
    except OSError as e:
        result = _failure(f"I/O error: {e}", EXIT_IO)

    if result["success"]:
        log_operation(operation, "SUCCESS", result.get("details", ""))
    else:
        log_operation(operation, "FAILED", result["error"])
    return result


def cmd_rates(scenario_path: str) -> Dict[str, Any]:
    """
    Print the threat rates of a scenario and the first-stage allocation

    Args:
        scenario_path (str): Scenario file

    Returns:
        Dict[str, Any]: success, error, exit_code and the printed lines
    """
    def command():
        scn = load_scenario_file(Path(scenario_path)).scenario
        rates = threat_rates(scn)
        alloc = optimal_allocation(rates)
        lines = [format_rates_line(rates, alloc), f"case={proof_case(rates)}"]
        return {"success": True, "error": None, "exit_code": EXIT_OK, "lines": lines,
                "rates": rates, "allocation": alloc, "details": lines[0]}

    return _run("rates", command)


def cmd_simulate(scenario_path: str, output_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Run the scenario's strategy to the end of the battle and write the CSV

    Args:
        scenario_path (str): Scenario file
        output_path (str): CSV destination; <output folder>/<scenario>.csv when omitted

    Returns:
        Dict[str, Any]: success, error, exit_code, the trajectory and the CSV path
    """
    def command():
        scenario_file = load_scenario_file(Path(scenario_path))
        trajectory = run_battle(scenario_file.scenario, scenario_file.strategy_or_default(),
                                scenario_file.integrator_or_default())
        target = Path(output_path) if output_path else output_directory() / f"{Path(scenario_path).stem}.csv"
        write_timeseries_csv(trajectory, target)
        summary = format_battle_summary(trajectory)
        return {"success": True, "error": None, "exit_code": EXIT_OK, "lines": [summary],
                "trajectory": trajectory, "output": target, "details": summary}

    return _run("simulate", command)


def cmd_compare(scenario_path: str, strategy_paths: List[str], output_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Compare the scenario's strategy against contrast strategy files

    Args:
        scenario_path (str): Scenario file; its strategy is the reference
        strategy_paths (List[str]): Contrast strategy files
        output_path (str): CSV destination; <output folder>/<scenario>_compare.csv when omitted

    Returns:
        Dict[str, Any]: success, error, exit_code, the comparison report and the CSV path
    """
    def command():
        if not strategy_paths:
            return _failure("at least one contrast strategy is required", EXIT_INVALID)
        scenario_file = load_scenario_file(Path(scenario_path))
        scn = scenario_file.scenario
        scripts = [scenario_file.strategy_or_default()]
        scripts += [load_strategy_file(Path(path), scn) for path in strategy_paths]

        settings = load_comparison_settings()
        report = compare_strategies(
            scn, scripts, scenario_file.integrator_or_default(),
            grid_points=settings["grid_points"],
            tolerance=settings["dominance_tolerance"],
            workers=load_oracle_settings()["workers"],
        )
        columns = [Path(scenario_path).stem] + [Path(path).stem for path in strategy_paths]
        target = (Path(output_path) if output_path
                  else output_directory() / f"{Path(scenario_path).stem}_compare.csv")
        write_comparison_csv(report, columns, target)
        return {"success": True, "error": None, "exit_code": EXIT_OK,
                "lines": format_comparison_lines(report), "report": report, "output": target,
                "details": ", ".join(report.verdicts)}

    return _run("compare", command)


def cmd_verify(scenario_path: str, resolution: int, lambdas: Optional[List[float]] = None) -> Dict[str, Any]:
    """
    Run the dominance and scalarization oracles

    The scalarization check uses a grid of at least 10.

    Args:
        scenario_path (str): Scenario file
        resolution (int): Dominance grid resolution, at least 1
        lambdas (List[float]): Scalarization weights; config.ini's when omitted

    Returns:
        Dict[str, Any]: success (both oracles passed), exit_code 2 on a violation,
            and both reports
    """
    def command():
        if resolution < 1:
            return _failure(f"grid resolution must be at least 1, got {resolution}", EXIT_INVALID)
        scenario_file = load_scenario_file(Path(scenario_path))
        scn = scenario_file.scenario
        settings = load_oracle_settings()
        weights = list(lambdas) if lambdas else settings["lambdas"]

        scalarization = verify_scalarization_minimum(
            scn, SimplexGrid(max(resolution, 10)), weights, tolerance=settings["scalarization_tolerance"],
        )
        dominance = verify_dominance(
            scn, SimplexGrid(resolution), scenario_file.integrator_or_default(),
            sample_points=settings["sample_points"],
            tolerance=settings["dominance_tolerance"],
            workers=settings["workers"],
        )
        lines = format_dominance_lines(dominance) + format_scalarization_lines(scalarization)
        passed = dominance.passed and scalarization.passed
        return {
            "success": passed,
            "error": None if passed else "oracle violation",
            "exit_code": EXIT_OK if passed else EXIT_ORACLE_VIOLATION,
            "lines": lines,
            "dominance": dominance,
            "scalarization": scalarization,
            "details": f"worst margin {dominance.worst_margin:.6g}",
        }

    return _run("verify", command)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="lanchester-ncw",
                             description="Mixed NCW Lanchester model: B against {(R,N), A}")
    commands = parser.add_subparsers(dest="command", required=True)

    rates = commands.add_parser("rates", help="Threat rates and first-stage allocation")
    rates.add_argument("scenario", help="Scenario file")

    simulate = commands.add_parser("simulate", help="Run a battle and write its time series")
    simulate.add_argument("scenario", help="Scenario file")
    simulate.add_argument("-o", "--output", help="CSV output path")

    compare = commands.add_parser("compare", help="Compare strategies on one scenario")
    compare.add_argument("scenario", help="Scenario file; its strategy is the reference")
    compare.add_argument("-s", "--strategy", action="append", required=True, help="Contrast strategy file")
    compare.add_argument("-o", "--output", help="CSV output path")

    verify = commands.add_parser("verify", help="Brute-force checks of the allocation rule")
    verify.add_argument("scenario", help="Scenario file")
    verify.add_argument("--grid", type=int, default=10, help="Simplex grid resolution")
    verify.add_argument("--lambdas", type=parse_float_list, help="Comma-separated scalarization weights")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run the command and print its output

    Returns:
        int: 0 success, 1 invalid input, 2 oracle violation, 3 I/O error
    """
    try:
        args = build_parser().parse_args(argv)
    except CommandLineError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID

    if args.command == "rates":
        result = cmd_rates(args.scenario)
    elif args.command == "simulate":
        result = cmd_simulate(args.scenario, args.output)
    elif args.command == "compare":
        result = cmd_compare(args.scenario, args.strategy, args.output)
    else:
        result = cmd_verify(args.scenario, args.grid, args.lambdas)

    for line in result.get("lines", []):
        print(line)
    if result["error"]:
        print(f"error: {result['error']}", file=sys.stderr)
    return result["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
