"""
Battle Module
Drives stages of constant fire allocation to the end of a battle under a
scripted or greedy-optimal policy and compares strategies
"""

import concurrent.futures
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from engine.integrator import (
    IntegratorConfig,
    StageEvent,
    detect_elimination,
    step_rk4,
)
from model.core import (
    Allocation,
    BattleState,
    Entity,
    Scenario,
    optimal_allocation,
    rhs,
    stage_threat_rates,
)
from model.exceptions import PreconditionError, ValidationError
from utils.logger import log_stage_event, setup_logger

logger = setup_logger()


class PolicyMode(str, Enum):
    SCRIPTED = "scripted"
    GREEDY_OPTIMAL = "greedy_optimal"


class Outcome(str, Enum):
    BLUE_WINS = "BlueWins"
    BLUE_LOSES = "BlueLoses"
    TIMEOUT = "Timeout"
    # segment ended by a non-terminal elimination or a time horizon
    ONGOING = "Ongoing"


@dataclass(frozen=True)
class StrategyScript:
    """How the allocation of each stage is chosen"""

    allocations: Tuple[Allocation, ...] = ()
    policy_mode: PolicyMode = PolicyMode.GREEDY_OPTIMAL

    def __post_init__(self):
        object.__setattr__(self, "allocations", tuple(self.allocations))
        if self.policy_mode is PolicyMode.SCRIPTED and not self.allocations:
            raise ValidationError("a scripted strategy needs at least one allocation", field="stages")

    @classmethod
    def greedy(cls) -> "StrategyScript":
        return cls(policy_mode=PolicyMode.GREEDY_OPTIMAL)

    @classmethod
    def scripted(cls, allocations: Sequence[Allocation]) -> "StrategyScript":
        return cls(allocations=tuple(allocations), policy_mode=PolicyMode.SCRIPTED)

    @property
    def label(self) -> str:
        if self.policy_mode is PolicyMode.GREEDY_OPTIMAL:
            return "greedy"
        return "->".join(str(alloc) for alloc in self.allocations)

    def allocation_for(self, stage_index: int, scn: Scenario, st: BattleState) -> Allocation:
        """
        Allocation for a stage starting at st

        Scripted strategies keep their last entry once stages outnumber it.
        """
        if self.policy_mode is PolicyMode.SCRIPTED:
            return self.allocations[min(stage_index, len(self.allocations) - 1)]
        return greedy_allocation(scn, st)


def greedy_allocation(scn: Scenario, st: BattleState) -> Allocation:
    """
    All fire on the greatest threat at the current state

    When every live threat has rate 0 the first live entity among R and A is
    targeted, since both must fall for B to win.
    """
    rates = stage_threat_rates(scn, st)
    if max(rates.as_tuple()) > 0:
        return optimal_allocation(rates)
    return Allocation.vertex(0) if st.alive(Entity.R) else Allocation.vertex(2)


@dataclass
class Trajectory:
    """Sampled run of a battle (or of one stage of it)"""

    states: List[BattleState] = field(default_factory=list)
    stage_indices: List[int] = field(default_factory=list)
    allocations: List[Allocation] = field(default_factory=list)
    events: List[StageEvent] = field(default_factory=list)
    outcome: Outcome = Outcome.ONGOING

    @property
    def final_state(self) -> BattleState:
        return self.states[-1]

    @property
    def stage_boundaries(self) -> List[float]:
        return [event.time for event in self.events]

    def times(self) -> np.ndarray:
        return np.array([st.t for st in self.states])

    def series(self, name: str) -> np.ndarray:
        """Values of one state field (t, b, r, n, a or x) over the samples"""
        return np.array([getattr(st, name) for st in self.states])

    def b_at(self, times: np.ndarray) -> np.ndarray:
        """B linearly interpolated at the given times, held constant past the ends"""
        return np.interp(times, self.times(), self.series("b"))

    def stage_states(self, stage_index: int) -> List[BattleState]:
        """Samples of one stage, including its starting state"""
        samples = [st for st, k in zip(self.states, self.stage_indices) if k == stage_index]
        if stage_index > 0 and stage_index - 1 < len(self.events):
            samples.insert(0, self.events[stage_index - 1].state_at_event)
        return samples

    def first_stage_states(self) -> List[BattleState]:
        return self.stage_states(0)


def run_stage(scn: Scenario, alloc: Allocation, st0: BattleState, cfg: IntegratorConfig,
              stage_index: int = 0, t_end: Optional[float] = None) -> Tuple[Trajectory, Optional[StageEvent]]:
    """
    Integrate at a fixed allocation until an elimination, a horizon or max_time

    Args:
        scn (Scenario): Battle parameters
        alloc (Allocation): Allocation held during the stage
        st0 (BattleState): State at the start of the stage
        cfg (IntegratorConfig): Integrator settings
        stage_index (int): Index recorded on every sample
        t_end (float): Optional horizon; the last step is shortened to land on it

    Returns:
        Tuple[Trajectory, Optional[StageEvent]]: Sampled segment (starting with
            st0) and the event that ended it, if any
    """
    if not st0.alive(Entity.B):
        raise PreconditionError("B is already eliminated")
    if not (st0.alive(Entity.R) or st0.alive(Entity.A)):
        raise PreconditionError("R and A are already eliminated; the battle is over")

    t_stop = cfg.max_time if t_end is None else min(t_end, cfg.max_time)
    segment = Trajectory(states=[st0], stage_indices=[stage_index], allocations=[alloc])

    # Nothing can change any more: only X keeps growing at rate B
    if not np.any(rhs(scn, alloc, st0)[:4]):
        if t_stop > st0.t:
            segment.states.append(BattleState(
                t=t_stop, b=st0.b, r=st0.r, n=st0.n, a=st0.a, x=st0.x + st0.b * (t_stop - st0.t),
            ))
            segment.stage_indices.append(stage_index)
        segment.outcome = Outcome.TIMEOUT if t_stop >= cfg.max_time else Outcome.ONGOING
        logger.debug(f"Stage {stage_index} is stationary at t={st0.t:.6g}")
        return segment, None

    st = st0
    event = None
    while t_stop - st.t > cfg.event_tolerance:
        h = min(cfg.step, t_stop - st.t)
        after = step_rk4(scn, alloc, st, h)
        event = detect_elimination(scn, alloc, st, after, cfg)
        if event is not None:
            segment.states.append(event.state_at_event)
            segment.stage_indices.append(stage_index)
            break
        segment.states.append(after)
        segment.stage_indices.append(stage_index)
        st = after

    if event is None:
        segment.outcome = Outcome.TIMEOUT if t_stop >= cfg.max_time else Outcome.ONGOING
        return segment, None

    segment.events.append(event)
    final = event.state_at_event
    if Entity.B in event.eliminated:
        segment.outcome = Outcome.BLUE_LOSES
    elif not (final.alive(Entity.R) or final.alive(Entity.A)):
        segment.outcome = Outcome.BLUE_WINS
    else:
        segment.outcome = Outcome.ONGOING
    return segment, event


def run_battle(scn: Scenario, script: StrategyScript, cfg: IntegratorConfig) -> Trajectory:
    """
    Chain stages until B falls, R and A both fall, or max_time is reached

    Args:
        scn (Scenario): Battle parameters
        script (StrategyScript): Per-stage allocation policy
        cfg (IntegratorConfig): Integrator settings

    Returns:
        Trajectory: Full battle with events, per-stage allocations and outcome
    """
    st = scn.initial_state()
    trajectory = Trajectory(states=[st], stage_indices=[0])
    if not (st.alive(Entity.R) or st.alive(Entity.A)):
        trajectory.outcome = Outcome.BLUE_WINS
        return trajectory

    stage_index = 0
    alloc = script.allocation_for(stage_index, scn, st)
    while True:
        segment, event = run_stage(scn, alloc, st, cfg, stage_index=stage_index)
        trajectory.states.extend(segment.states[1:])
        trajectory.stage_indices.extend(segment.stage_indices[1:])
        trajectory.allocations.append(alloc)
        if event is not None:
            trajectory.events.append(event)
        if segment.outcome is not Outcome.ONGOING:
            trajectory.outcome = segment.outcome
            log_stage_event(stage_index, segment.final_state.t, event.label if event else "none")
            break

        st = event.state_at_event
        stage_index += 1
        alloc = script.allocation_for(stage_index, scn, st)
        log_stage_event(stage_index - 1, event.time, event.label, str(alloc))

    logger.info(
        f"Battle finished | Strategy: {script.label} | Outcome: {trajectory.outcome.value} "
        f"| Stages: {len(trajectory.allocations)} | Final B: {trajectory.final_state.b:.6g}"
    )
    return trajectory


@dataclass
class ComparisonReport:
    """Strategies run on the same scenario and aligned on a common time grid"""

    labels: List[str]
    trajectories: List[Trajectory]
    grid: np.ndarray
    b_values: List[np.ndarray]
    margins: List[float]
    dominated: List[bool]
    verdicts: List[str]

    @property
    def outcomes(self) -> List[Outcome]:
        return [trajectory.outcome for trajectory in self.trajectories]

    @property
    def final_states(self) -> List[BattleState]:
        return [trajectory.final_state for trajectory in self.trajectories]

    @property
    def first_dominates_all(self) -> bool:
        return all(self.dominated)


def compare_strategies(scn: Scenario, scripts: Sequence[StrategyScript], cfg: IntegratorConfig,
                       grid_points: int = 201, tolerance: float = 1e-6,
                       workers: int = 1) -> ComparisonReport:
    """
    Run every strategy and check whether the first dominates the others in B

    Args:
        scn (Scenario): Battle parameters
        scripts (Sequence[StrategyScript]): Reference strategy first, then contrasts
        cfg (IntegratorConfig): Integrator settings
        grid_points (int): Points of the common time grid
        tolerance (float): Allowed negative margin for dominance
        workers (int): Processes used to run the battles; 1 runs them in order

    Returns:
        ComparisonReport: Aligned B values, margins and a verdict per contrast
            ("dominated", "not dominated" or "different outcome")
    """
    if len(scripts) < 2:
        raise PreconditionError("compare_strategies needs at least two strategies")
    if grid_points < 2:
        raise ValidationError(f"grid_points must be at least 2, got {grid_points}", field="grid_points")

    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
            trajectories = list(executor.map(run_battle, [scn] * len(scripts), scripts, [cfg] * len(scripts)))
    else:
        trajectories = [run_battle(scn, script, cfg) for script in scripts]

    horizon = max(trajectory.final_state.t for trajectory in trajectories)
    grid = np.linspace(0.0, horizon, grid_points)
    b_values = [trajectory.b_at(grid) for trajectory in trajectories]

    reference = trajectories[0]
    margins, dominated, verdicts = [], [], []
    for trajectory, values in zip(trajectories[1:], b_values[1:]):
        margin = float(np.min(b_values[0] - values))
        is_dominated = margin >= -tolerance
        margins.append(margin)
        dominated.append(is_dominated)
        if trajectory.outcome is not reference.outcome:
            verdicts.append("different outcome")
        else:
            verdicts.append("dominated" if is_dominated else "not dominated")

    return ComparisonReport(
        labels=[script.label for script in scripts],
        trajectories=trajectories,
        grid=grid,
        b_values=b_values,
        margins=margins,
        dominated=dominated,
        verdicts=verdicts,
    )
