"""
Oracle Module
Brute-force checks of the first-stage allocation rule: grid search over
constant allocations on the simplex, pointwise dominance of B and the
weighted-sum scalarization of the threat objectives
"""

import concurrent.futures
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from engine.battle import Trajectory, run_stage
from engine.integrator import IntegratorConfig
from model.core import (
    Allocation,
    Scenario,
    optimal_allocation,
    proof_case,
    threat_rates,
)
from model.exceptions import PreconditionError, ValidationError
from utils.logger import log_oracle_violation, setup_logger

logger = setup_logger()

MIN_SCALARIZATION_RESOLUTION = 10


@dataclass(frozen=True)
class SimplexGrid:
    """All allocations (i/k, j/k, (k-i-j)/k) with i + j <= k"""

    resolution: int

    def __post_init__(self):
        if isinstance(self.resolution, bool) or not isinstance(self.resolution, int) or self.resolution < 1:
            raise ValidationError(f"grid resolution must be a positive integer, got {self.resolution!r}",
                                  field="resolution")

    def __len__(self) -> int:
        k = self.resolution
        return (k + 1) * (k + 2) // 2

    def points(self) -> List[Allocation]:
        k = self.resolution
        return [
            Allocation(i / k, j / k, (k - i - j) / k)
            for i in range(k + 1)
            for j in range(k + 1 - i)
        ]

    def as_array(self) -> np.ndarray:
        """Grid points as rows of an (n, 3) array"""
        return np.array([alloc.as_tuple() for alloc in self.points()])


def product_coefficient(scn: Scenario) -> float:
    """Weight of the pi1*pi2 cross term: beta_r * beta_n * (alpha_c - alpha_d) / capacity"""
    return scn.beta_r * scn.beta_n * (scn.alpha_c - scn.alpha_d) / scn.capacity


def scalarized_objective(scn: Scenario, alloc: Allocation, lam: float) -> float:
    """
    Weighted sum of the cross term and the threat reduction of an allocation

    Args:
        scn (Scenario): Battle parameters
        alloc (Allocation): Allocation to score
        lam (float): Weight in [0, 1]

    Returns:
        float: lam * a * pi1 * pi2 - (1 - lam) * (b1 * pi1 + b2 * pi2 + b3 * pi3)
    """
    rates = threat_rates(scn)
    pi1, pi2, pi3 = alloc.as_tuple()
    threat = rates.b1 * pi1 + rates.b2 * pi2 + rates.b3 * pi3
    return lam * product_coefficient(scn) * pi1 * pi2 - (1.0 - lam) * threat


def _objective_on_grid(scn: Scenario, points: np.ndarray, lam: float) -> np.ndarray:
    rates = np.array(threat_rates(scn).as_tuple())
    return lam * product_coefficient(scn) * points[:, 0] * points[:, 1] - (1.0 - lam) * (points @ rates)


@dataclass
class ScalarizationCheck:
    """Result of one weight of the scalarization sweep"""

    lam: float
    expected: Allocation
    expected_value: float
    minimizer: Allocation
    minimum: float
    passed: bool


@dataclass
class ScalarizationReport:
    resolution: int
    proof_case: str
    expected: Allocation
    checks: List[ScalarizationCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def violations(self) -> List[ScalarizationCheck]:
        return [check for check in self.checks if not check.passed]


def verify_scalarization_minimum(scn: Scenario, grid: SimplexGrid, lambdas: Sequence[float],
                                 tolerance: float = 1e-12) -> ScalarizationReport:
    """
    Check that every weighted objective is minimized at the chosen vertex

    Args:
        scn (Scenario): Battle parameters
        grid (SimplexGrid): Grid of at least MIN_SCALARIZATION_RESOLUTION
        lambdas (Sequence[float]): Weights, each strictly inside (0, 1)
        tolerance (float): Slack allowed between the vertex value and the grid minimum

    Returns:
        ScalarizationReport: One check per weight; violations carry the grid minimizer
    """
    if grid.resolution < MIN_SCALARIZATION_RESOLUTION:
        raise PreconditionError(
            f"scalarization check needs grid resolution >= {MIN_SCALARIZATION_RESOLUTION}, got {grid.resolution}"
        )
    if not lambdas:
        raise PreconditionError("at least one weight is required")
    for lam in lambdas:
        if not 0.0 < lam < 1.0:
            raise PreconditionError(f"weights must lie in (0, 1), got {lam}")

    rates = threat_rates(scn)
    expected = optimal_allocation(rates)
    points = grid.points()
    matrix = np.array([alloc.as_tuple() for alloc in points])
    report = ScalarizationReport(resolution=grid.resolution, proof_case=proof_case(rates), expected=expected)

    for lam in lambdas:
        values = _objective_on_grid(scn, matrix, lam)
        index = int(np.argmin(values))
        expected_value = scalarized_objective(scn, expected, lam)
        check = ScalarizationCheck(
            lam=lam,
            expected=expected,
            expected_value=expected_value,
            minimizer=points[index],
            minimum=float(values[index]),
            passed=expected_value <= float(values[index]) + tolerance,
        )
        if not check.passed:
            log_oracle_violation(
                "scalarization",
                f"lambda={lam:.6g} grid minimum {check.minimum:.6g} at {check.minimizer} "
                f"below {expected_value:.6g} at {expected}",
            )
        report.checks.append(check)

    logger.info(f"Scalarization check | Case: {report.proof_case} | Weights: {len(lambdas)} "
                f"| Passed: {report.passed}")
    return report


@dataclass
class DominanceReport:
    """B under the chosen vertex against every grid allocation on [0, t_star]"""

    resolution: int
    expected: Allocation
    t_star: float
    t_star_allocation: Allocation
    sample_times: np.ndarray
    worst_margin: float
    worst_competitor: Optional[Allocation]
    best_allocation: Allocation
    violations: List[Tuple[Allocation, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def _first_stage(scn: Scenario, alloc: Allocation, cfg: IntegratorConfig,
                 t_end: Optional[float]) -> Tuple[Trajectory, bool]:
    segment, event = run_stage(scn, alloc, scn.initial_state(), cfg, t_end=t_end)
    return segment, event is not None


def verify_dominance(scn: Scenario, grid: SimplexGrid, cfg: IntegratorConfig, sample_points: int = 50,
                     tolerance: float = 1e-6, workers: int = 1) -> DominanceReport:
    """
    Check that the chosen vertex keeps B highest over the shortest first stage

    Every grid allocation is held constant from the initial state. t_star is
    the earliest first elimination among all runs; B is compared at
    sample_points equally spaced times in [0, t_star]. Runs are stopped at the
    chosen vertex's own first elimination since t_star cannot exceed it.

    Args:
        scn (Scenario): Battle parameters
        grid (SimplexGrid): Constant allocations to compete against
        cfg (IntegratorConfig): Integrator settings
        sample_points (int): Number of comparison times
        tolerance (float): Allowed negative margin
        workers (int): Processes used for the grid runs

    Returns:
        DominanceReport: t_star, worst margin and competitor, best allocation
            at t_star and every violating allocation
    """
    if sample_points < 2:
        raise ValidationError(f"sample_points must be at least 2, got {sample_points}", field="sample_points")

    expected = optimal_allocation(threat_rates(scn))
    reference, _ = _first_stage(scn, expected, cfg, None)
    horizon = reference.final_state.t

    points = grid.points()
    count = len(points)
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
            runs = list(executor.map(_first_stage, [scn] * count, points, [cfg] * count, [horizon] * count))
    else:
        runs = [_first_stage(scn, alloc, cfg, horizon) for alloc in points]

    t_star, t_star_allocation = horizon, expected
    for alloc, (segment, ended) in zip(points, runs):
        if ended and segment.final_state.t < t_star:
            t_star, t_star_allocation = segment.final_state.t, alloc

    sample_times = np.linspace(0.0, t_star, sample_points)
    reference_b = reference.b_at(sample_times)
    # every run starts from the same B, so t=0 is left out of the margins
    b_star = [segment.b_at(sample_times[-1:])[0] for segment, _ in runs]

    worst_margin, worst_competitor = float("inf"), None
    violations = []
    for alloc, (segment, _) in zip(points, runs):
        if alloc == expected:
            continue
        margin = float(np.min(reference_b[1:] - segment.b_at(sample_times[1:])))
        if margin < worst_margin:
            worst_margin, worst_competitor = margin, alloc
        if margin < -tolerance:
            violations.append((alloc, margin))
            log_oracle_violation("dominance", f"{alloc} beats {expected} by {-margin:.6g}")

    report = DominanceReport(
        resolution=grid.resolution,
        expected=expected,
        t_star=t_star,
        t_star_allocation=t_star_allocation,
        sample_times=sample_times,
        worst_margin=worst_margin if worst_competitor is not None else 0.0,
        worst_competitor=worst_competitor,
        best_allocation=points[int(np.argmax(b_star))],
        violations=violations,
    )
    logger.info(f"Dominance check | Grid: {count} allocations | t*: {t_star:.6g} "
                f"| Worst margin: {report.worst_margin:.6g} | Passed: {report.passed}")
    return report
