"""
Integrator Module
Fixed-step classical Runge-Kutta integration of the battle system with
bisection refinement of elimination events
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from model.core import (
    EPS_KILL,
    Allocation,
    BattleState,
    Entity,
    Scenario,
    rhs_vector,
)
from model.exceptions import NumericError, ValidationError
from utils.config import load_integrator_defaults

# Order of the troop counts inside a state vector
STATE_ENTITIES = (Entity.B, Entity.R, Entity.N, Entity.A)


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, event localisation width and time limit of a run"""

    step: float = 1e-3
    event_tolerance: float = 1e-10
    max_time: float = 1e4

    def __post_init__(self):
        if not self.step > 0:
            raise ValidationError(f"step must be positive, got {self.step}", field="step")
        if not 0 < self.event_tolerance < self.step:
            raise ValidationError(
                f"event_tolerance must lie in (0, step), got {self.event_tolerance}",
                field="event_tolerance",
            )
        if not self.max_time > 0:
            raise ValidationError(f"max_time must be positive, got {self.max_time}", field="max_time")

    @classmethod
    def from_config(cls) -> "IntegratorConfig":
        """Defaults from the [INTEGRATOR] section of config.ini"""
        return cls(**load_integrator_defaults())


@dataclass(frozen=True)
class StageEvent:
    """Elimination of one or more entities, ending a stage"""

    time: float
    eliminated: Tuple[Entity, ...]
    state_at_event: BattleState

    @property
    def label(self) -> str:
        return "+".join(entity.value for entity in self.eliminated)


def _rk4_raw(scn: Scenario, alloc: Allocation, y: np.ndarray, h: float,
             live: Tuple[bool, bool, bool, bool]) -> np.ndarray:
    k1 = rhs_vector(scn, alloc, y, live)
    k2 = rhs_vector(scn, alloc, y + 0.5 * h * k1, live)
    k3 = rhs_vector(scn, alloc, y + 0.5 * h * k2, live)
    k4 = rhs_vector(scn, alloc, y + h * k3, live)
    return y + h * (k1 + 2.0 * (k2 + k3) + k4) / 6.0


def step_rk4(scn: Scenario, alloc: Allocation, st: BattleState, h: float) -> BattleState:
    """
    Advance the state by one classical Runge-Kutta step

    Args:
        scn (Scenario): Battle parameters
        alloc (Allocation): Allocation held over the step
        st (BattleState): State at the start of the step
        h (float): Step size

    Returns:
        BattleState: State at t + h with eliminated counts pinned to 0

    Raises:
        NumericError: The step produced a non-finite value
    """
    if not h > 0:
        raise ValidationError(f"step size must be positive, got {h}", field="step")
    y = _rk4_raw(scn, alloc, st.as_array(), h, st.live_mask())
    if not np.all(np.isfinite(y)):
        raise NumericError(f"non-finite state after step from t={st.t}: {y}")
    return BattleState.from_array(st.t + h, y).clamped()


def _crossed(before_live: Tuple[bool, ...], y: np.ndarray) -> Tuple[Entity, ...]:
    return tuple(
        entity for entity, was_alive, value in zip(STATE_ENTITIES, before_live, y[:4])
        if was_alive and value <= EPS_KILL
    )


def detect_elimination(scn: Scenario, alloc: Allocation, st_before: BattleState,
                       st_after: BattleState, cfg: IntegratorConfig) -> Optional[StageEvent]:
    """
    Localise an elimination inside the step from st_before to st_after

    The sub-step length is bisected until the first crossing of EPS_KILL is
    bracketed within cfg.event_tolerance. Entities crossing within one more
    tolerance width are reported in the same event.

    Args:
        scn (Scenario): Battle parameters
        alloc (Allocation): Allocation held over the step
        st_before (BattleState): Accepted state at the start of the step
        st_after (BattleState): State at the end of the step
        cfg (IntegratorConfig): Integrator settings

    Returns:
        Optional[StageEvent]: The event, or None if no count crossed zero
    """
    live = st_before.live_mask()
    if not _crossed(live, st_after.as_array()):
        return None

    y0 = st_before.as_array()
    lo, hi = 0.0, st_after.t - st_before.t
    while hi - lo > cfg.event_tolerance:
        mid = 0.5 * (lo + hi)
        if _crossed(live, _rk4_raw(scn, alloc, y0, mid, live)):
            hi = mid
        else:
            lo = mid

    y_event = _rk4_raw(scn, alloc, y0, hi, live)
    overshoot = min(hi + cfg.event_tolerance, st_after.t - st_before.t)
    crossing = set(_crossed(live, _rk4_raw(scn, alloc, y0, overshoot, live))) | set(_crossed(live, y_event))
    eliminated = tuple(entity for entity in STATE_ENTITIES if entity in crossing)
    for index, entity in enumerate(STATE_ENTITIES):
        if entity in eliminated:
            y_event[index] = 0.0
    if not np.all(np.isfinite(y_event)):
        raise NumericError(f"non-finite state while localising event after t={st_before.t}")

    state = BattleState.from_array(st_before.t + hi, y_event).clamped()
    return StageEvent(time=state.t, eliminated=eliminated, state_at_event=state)
