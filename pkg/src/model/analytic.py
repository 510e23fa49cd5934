"""
Analytic Module
Fire-integral reduction of the first stage: with X(t) the integral of B, the
counts R, N, A are linear in X, X'' is quadratic in X and B follows from an
energy relation. Used to validate numerical trajectories.
"""

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from model.core import (
    EPS_KILL,
    Allocation,
    BattleState,
    Entity,
    Scenario,
    attrition_fn,
)
from model.exceptions import DomainError


@dataclass(frozen=True)
class ReducedCoefficients:
    """Coefficients of X'' = -c1 X^2 + c2 X - c3 with energy constant c4"""

    c1: float
    c2: float
    c3: float
    c4: float


@dataclass(frozen=True)
class FirstStagePrediction:
    """Analytic outcome of a stage held at one allocation"""

    eliminated: Entity
    x_at_event: float
    b_at_event: float
    elimination_x: Dict[Entity, float]


def _effective_fractions(scn: Scenario, alloc: Allocation) -> Tuple[float, float, float]:
    # fire aimed at an entity that is already gone changes nothing
    return (
        alloc.pi1 if scn.r0 > EPS_KILL else 0.0,
        alloc.pi2 if scn.n0 > EPS_KILL else 0.0,
        alloc.pi3 if scn.a0 > EPS_KILL else 0.0,
    )


def reduced_coefficients(scn: Scenario, alloc: Allocation) -> ReducedCoefficients:
    """
    Coefficients of the reduced equation for a stage starting at scn's counts

    Args:
        scn (Scenario): Battle parameters; initial counts are the stage's start
        alloc (Allocation): Allocation held during the stage

    Returns:
        ReducedCoefficients: c1, c2, c3 and c4 = b0^2
    """
    p1, p2, p3 = _effective_fractions(scn, alloc)
    slope = (scn.alpha_c - scn.alpha_d) / scn.capacity
    f0 = attrition_fn(scn, scn.n0)
    c1 = p1 * p2 * scn.beta_r * scn.beta_n * slope
    c2 = p2 * scn.beta_n * slope * scn.r0 + p1 * scn.beta_r * f0 + scn.gamma_a * p3 * scn.beta_a
    c3 = f0 * scn.r0 + scn.gamma_a * scn.a0
    return ReducedCoefficients(c1=c1, c2=c2, c3=c3, c4=scn.b0 ** 2)


def linear_states_from_x(scn: Scenario, alloc: Allocation, x: float) -> Tuple[float, float, float]:
    """R, N, A after B has spent fire integral x at a constant allocation"""
    r = max(0.0, scn.r0 - alloc.pi1 * scn.beta_r * x)
    n = max(0.0, scn.n0 - alloc.pi2 * scn.beta_n * x)
    a = max(0.0, scn.a0 - alloc.pi3 * scn.beta_a * x)
    return r, n, a


def energy_radicand(coef: ReducedCoefficients, x: float) -> float:
    return -(2.0 / 3.0) * coef.c1 * x ** 3 + coef.c2 * x ** 2 - 2.0 * coef.c3 * x + coef.c4


def b_from_energy(coef: ReducedCoefficients, x: float) -> float:
    """
    B at the instant the fire integral reaches x

    Raises:
        DomainError: x lies beyond B's annihilation point
    """
    radicand = energy_radicand(coef, x)
    if radicand < 0:
        raise DomainError(f"energy radicand {radicand} is negative at x={x}")
    return math.sqrt(radicand)


def energy_residual(coef: ReducedCoefficients, st: BattleState) -> float:
    """b^2 + (2/3) c1 x^3 - c2 x^2 + 2 c3 x - c4, zero on the exact solution"""
    x = st.x
    return st.b ** 2 + (2.0 / 3.0) * coef.c1 * x ** 3 - coef.c2 * x ** 2 + 2.0 * coef.c3 * x - coef.c4


def x_acceleration(coef: ReducedCoefficients, x: float) -> float:
    """X'' as a function of X"""
    return -coef.c1 * x ** 2 + coef.c2 * x - coef.c3


def annihilation_fire_integral(coef: ReducedCoefficients) -> Optional[float]:
    """Smallest positive root of the energy radicand, None if B never reaches 0"""
    roots = np.roots([-(2.0 / 3.0) * coef.c1, coef.c2, -2.0 * coef.c3, coef.c4])
    candidates = [
        float(root.real) for root in roots
        if abs(root.imag) <= 1e-9 * max(1.0, abs(root.real)) and root.real > 0
    ]
    return min(candidates) if candidates else None


def predict_first_stage(scn: Scenario, alloc: Allocation) -> FirstStagePrediction:
    """
    Predict which entity falls first under a constant allocation

    Args:
        scn (Scenario): Battle parameters
        alloc (Allocation): Allocation held until the first elimination

    Returns:
        FirstStagePrediction: First entity eliminated, the fire integral at that
            point and B's strength there (0 when B is the one eliminated)
    """
    coef = reduced_coefficients(scn, alloc)
    elimination_x: Dict[Entity, float] = {}
    for entity, count, fraction, beta in (
        (Entity.R, scn.r0, alloc.pi1, scn.beta_r),
        (Entity.N, scn.n0, alloc.pi2, scn.beta_n),
        (Entity.A, scn.a0, alloc.pi3, scn.beta_a),
    ):
        if count > EPS_KILL and fraction * beta > 0:
            elimination_x[entity] = count / (fraction * beta)

    b_zero = annihilation_fire_integral(coef)
    if b_zero is not None:
        elimination_x[Entity.B] = b_zero
    if not elimination_x:
        raise DomainError("no entity can be eliminated under this allocation")

    # B listed last so a red entity wins an exact tie
    eliminated = min(elimination_x, key=elimination_x.get)
    x_event = elimination_x[eliminated]
    b_event = 0.0 if eliminated is Entity.B else math.sqrt(max(energy_radicand(coef, x_event), 0.0))
    return FirstStagePrediction(
        eliminated=eliminated,
        x_at_event=x_event,
        b_at_event=b_event,
        elimination_x=elimination_x,
    )
