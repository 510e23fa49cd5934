"""
Report Module
CSV time series and one-line summaries of battles, comparisons and oracle checks
"""

import csv
from pathlib import Path
from typing import List, Sequence

from engine.battle import ComparisonReport, Trajectory
from engine.oracle import DominanceReport, ScalarizationReport
from model.core import Allocation, ThreatRates

TIMESERIES_HEADER = ["t", "b", "r", "n", "a", "x", "stage_index", "pi1", "pi2", "pi3"]


def _number(value: float) -> str:
    # repr keeps full precision and is locale independent
    return repr(float(value))


def _short(value: float) -> str:
    return f"{value:.6g}"


def timeseries_rows(trajectory: Trajectory) -> List[List[str]]:
    """One row per sample, including the state at every stage event"""
    rows = []
    for st, stage_index in zip(trajectory.states, trajectory.stage_indices):
        if trajectory.allocations:
            alloc = trajectory.allocations[min(stage_index, len(trajectory.allocations) - 1)]
            fractions = [_number(v) for v in alloc.as_tuple()]
        else:
            fractions = ["", "", ""]
        rows.append([_number(st.t), _number(st.b), _number(st.r), _number(st.n), _number(st.a),
                     _number(st.x), str(stage_index)] + fractions)
    return rows


def write_timeseries_csv(trajectory: Trajectory, path: Path) -> Path:
    """
    Write a battle as CSV

    Args:
        trajectory (Trajectory): Battle to write
        path (Path): Output file; parent folders are created

    Returns:
        Path: The written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TIMESERIES_HEADER)
        writer.writerows(timeseries_rows(trajectory))
    return path


def write_comparison_csv(report: ComparisonReport, columns: Sequence[str], path: Path) -> Path:
    """
    Write B of every strategy on the common grid, one column per strategy

    Args:
        report (ComparisonReport): Aligned comparison
        columns (Sequence[str]): Column suffixes, one per strategy (b_<suffix>)
        path (Path): Output file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["t"] + [f"b_{name}" for name in columns])
        for index, t in enumerate(report.grid):
            writer.writerow([_number(t)] + [_number(values[index]) for values in report.b_values])
    return path


def format_rates_line(rates: ThreatRates, alloc: Allocation) -> str:
    return f"b1={_short(rates.b1)} b2={_short(rates.b2)} b3={_short(rates.b3)}, allocation={alloc}"


def format_battle_summary(trajectory: Trajectory) -> str:
    """Outcome, final counts, stage boundaries and per-stage allocations"""
    final = trajectory.final_state
    boundaries = ",".join(_short(t) for t in trajectory.stage_boundaries)
    allocations = "->".join(str(alloc) for alloc in trajectory.allocations)
    return (
        f"outcome={trajectory.outcome.value} t={_short(final.t)} "
        f"b={_short(final.b)} r={_short(final.r)} n={_short(final.n)} a={_short(final.a)} "
        f"boundaries=[{boundaries}] allocations={allocations}"
    )


def format_comparison_lines(report: ComparisonReport) -> List[str]:
    lines = [
        f"{label}: outcome={trajectory.outcome.value} final b={_short(trajectory.final_state.b)}"
        for label, trajectory in zip(report.labels, report.trajectories)
    ]
    for label, margin, verdict in zip(report.labels[1:], report.margins, report.verdicts):
        lines.append(f"{report.labels[0]} vs {label}: {verdict} (margin={_short(margin)})")
    return lines


def format_scalarization_lines(report: ScalarizationReport) -> List[str]:
    lines = [f"scalarization: case={report.proof_case} vertex={report.expected} grid={report.resolution}"]
    for check in report.checks:
        status = "ok" if check.passed else f"VIOLATION at {check.minimizer} ({_short(check.minimum)})"
        lines.append(f"  lambda={_short(check.lam)} F={_short(check.expected_value)} {status}")
    return lines


def format_dominance_lines(report: DominanceReport) -> List[str]:
    worst = str(report.worst_competitor) if report.worst_competitor is not None else "none"
    lines = [
        f"dominance: vertex={report.expected} grid={report.resolution} t*={_short(report.t_star)} "
        f"(set by {report.t_star_allocation})",
        f"  worst margin={_short(report.worst_margin)} against {worst}; best at t*={report.best_allocation}",
    ]
    for alloc, margin in report.violations:
        lines.append(f"  VIOLATION {alloc} margin={_short(margin)}")
    return lines
