"""
Core Model Module
Domain types of the B vs {(R,N), A} battle, the network attrition function,
the ODE right-hand side, threatening rates and the first-stage allocation rule
"""

import math
import numbers
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from model.exceptions import DomainError, PreconditionError, ValidationError

# A troop count at or below this level is treated as eliminated
EPS_KILL = 1e-9

# Largest deviation of an allocation's sum from 1 that is renormalized away
ALLOCATION_TOLERANCE = 1e-12


class Entity(str, Enum):
    """Combat entities of the model"""

    B = "B"
    R = "R"
    N = "N"
    A = "A"


@dataclass(frozen=True)
class Scenario:
    """
    Attrition parameters and initial troop counts of one battle

    n_capacity is the network capacity anchoring the slope of the attrition
    function; it defaults to n0. Stage-boundary scenarios keep the original
    capacity while n0 carries the live network count.
    """

    alpha_c: float
    alpha_d: float
    gamma_a: float
    beta_r: float
    beta_n: float
    beta_a: float
    b0: float
    r0: float
    n0: float
    a0: float
    n_capacity: Optional[float] = None

    def __post_init__(self):
        for name in ("alpha_c", "alpha_d", "gamma_a", "beta_r", "beta_n", "beta_a",
                     "b0", "r0", "n0", "a0"):
            value = getattr(self, name)
            if not isinstance(value, numbers.Real) or not math.isfinite(value):
                raise ValidationError(f"{name} must be a finite number, got {value!r}", field=name)
            if value < 0:
                raise ValidationError(f"{name} must be nonnegative, got {value}", field=name)
        if self.alpha_d > self.alpha_c:
            raise ValidationError(
                f"alpha_d ({self.alpha_d}) must not exceed alpha_c ({self.alpha_c})",
                field="alpha_d",
            )
        if self.b0 <= 0:
            raise ValidationError(f"b0 must be positive, got {self.b0}", field="b0")
        if self.n_capacity is None:
            if self.n0 <= 0:
                raise ValidationError(f"n0 must be positive, got {self.n0}", field="n0")
        else:
            if not math.isfinite(self.n_capacity) or self.n_capacity <= 0:
                raise ValidationError(f"n_capacity must be positive, got {self.n_capacity}", field="n_capacity")
            if self.n0 > self.n_capacity:
                raise ValidationError(
                    f"n0 ({self.n0}) must not exceed n_capacity ({self.n_capacity})",
                    field="n0",
                )

    @property
    def capacity(self) -> float:
        """Network size at which R and N are fully connected"""
        return self.n_capacity if self.n_capacity is not None else self.n0

    def initial_state(self) -> "BattleState":
        return BattleState(t=0.0, b=self.b0, r=self.r0, n=self.n0, a=self.a0, x=0.0)


@dataclass(frozen=True)
class Allocation:
    """Fractions of B's fire aimed at R, N and A"""

    pi1: float
    pi2: float
    pi3: float

    def __post_init__(self):
        values = (self.pi1, self.pi2, self.pi3)
        for index, value in enumerate(values, start=1):
            if not isinstance(value, numbers.Real) or not math.isfinite(value):
                raise ValidationError(f"pi{index} must be a finite number, got {value!r}")
            if value < -ALLOCATION_TOLERANCE or value > 1 + ALLOCATION_TOLERANCE:
                raise ValidationError(f"pi{index} must lie in [0, 1], got {value}")
        total = sum(values)
        if abs(total - 1.0) > ALLOCATION_TOLERANCE:
            raise ValidationError(f"allocation must sum to 1, got {total!r}")
        clipped = [min(max(float(v), 0.0), 1.0) for v in values]
        scale = sum(clipped)
        object.__setattr__(self, "pi1", clipped[0] / scale)
        object.__setattr__(self, "pi2", clipped[1] / scale)
        object.__setattr__(self, "pi3", clipped[2] / scale)

    @classmethod
    def vertex(cls, index: int) -> "Allocation":
        """Simplex vertex concentrating all fire on entity index 0 (R), 1 (N) or 2 (A)"""
        if index not in (0, 1, 2):
            raise ValidationError(f"vertex index must be 0, 1 or 2, got {index}")
        values = [0.0, 0.0, 0.0]
        values[index] = 1.0
        return cls(*values)

    @property
    def target(self) -> Optional[Entity]:
        """Entity receiving all of B's fire, or None for a mixed allocation"""
        for entity, value in zip((Entity.R, Entity.N, Entity.A), self.as_tuple()):
            if value == 1.0:
                return entity
        return None

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.pi1, self.pi2, self.pi3)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())

    def __str__(self) -> str:
        return "(" + ",".join(f"{v:.6g}" for v in self.as_tuple()) + ")"


@dataclass(frozen=True)
class BattleState:
    """Troop levels at time t plus the accumulated fire integral x"""

    t: float
    b: float
    r: float
    n: float
    a: float
    x: float = 0.0

    def count(self, entity: Entity) -> float:
        return getattr(self, entity.value.lower())

    def alive(self, entity: Entity) -> bool:
        return self.count(entity) > EPS_KILL

    def live_mask(self) -> Tuple[bool, bool, bool, bool]:
        """Liveness of (B, R, N, A)"""
        return (self.b > EPS_KILL, self.r > EPS_KILL, self.n > EPS_KILL, self.a > EPS_KILL)

    def as_array(self) -> np.ndarray:
        return np.array([self.b, self.r, self.n, self.a, self.x])

    @classmethod
    def from_array(cls, t: float, values: np.ndarray) -> "BattleState":
        b, r, n, a, x = (float(v) for v in values)
        return cls(t=float(t), b=b, r=r, n=n, a=a, x=x)

    def clamped(self) -> "BattleState":
        """Pin counts within EPS_KILL of zero (or below it) to exactly zero"""
        b, r, n, a = (v if v > EPS_KILL else 0.0 for v in (self.b, self.r, self.n, self.a))
        return BattleState(t=self.t, b=b, r=r, n=n, a=a, x=self.x)


@dataclass(frozen=True)
class ThreatRates:
    """Threatening rates of R, N and A against B"""

    b1: float
    b2: float
    b3: float

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.b1, self.b2, self.b3)


def attrition_fn(scn: Scenario, n: float) -> float:
    """
    Attrition rate of R against B when the supporting network holds n troops

    Args:
        scn (Scenario): Battle parameters
        n (float): Current network count, 0 <= n <= network capacity

    Returns:
        float: alpha_d + (alpha_c - alpha_d) * n / capacity
    """
    capacity = scn.capacity
    if n < 0 or n > capacity:
        raise DomainError(f"network count {n} outside [0, {capacity}]")
    share = n / capacity
    return scn.alpha_c * share + scn.alpha_d * (1.0 - share)


def rhs(scn: Scenario, alloc: Allocation, st: BattleState,
        live: Optional[Tuple[bool, bool, bool, bool]] = None) -> np.ndarray:
    """
    Time derivatives (dB, dR, dN, dA, dX) of the battle system

    Args:
        scn (Scenario): Battle parameters
        alloc (Allocation): B's fire allocation
        st (BattleState): State to evaluate at
        live (tuple): Liveness of (B, R, N, A); derived from st when omitted

    Returns:
        np.ndarray: Derivative vector; eliminated entities get 0
    """
    return rhs_vector(scn, alloc, st.as_array(), live if live is not None else st.live_mask())


def rhs_vector(scn: Scenario, alloc: Allocation, y: np.ndarray,
               live: Tuple[bool, bool, bool, bool]) -> np.ndarray:
    """
    Array form of rhs over y = (b, r, n, a, x)

    The integrator fixes live at the start of a step so that all four
    Runge-Kutta stages see the same set of active entities.
    """
    b_live, r_live, n_live, a_live = live
    b = max(y[0], 0.0) if b_live else 0.0
    r = max(y[1], 0.0) if r_live else 0.0
    n = min(max(y[2], 0.0), scn.capacity) if n_live else 0.0
    a = max(y[3], 0.0) if a_live else 0.0

    db = -(attrition_fn(scn, n) * r + scn.gamma_a * a) if b_live else 0.0
    dr = -alloc.pi1 * scn.beta_r * b if r_live else 0.0
    dn = -alloc.pi2 * scn.beta_n * b if n_live else 0.0
    da = -alloc.pi3 * scn.beta_a * b if a_live else 0.0
    return np.array([db, dr, dn, da, b])


def threat_rates(scn: Scenario) -> ThreatRates:
    """
    Threatening rates computed from the scenario's initial counts

    b1 = f_alpha(n0) * beta_r, which is alpha_c * beta_r for a full network
    b2 = beta_n * (alpha_c - alpha_d) * r0 / capacity
    b3 = gamma_a * beta_a
    """
    b1 = attrition_fn(scn, scn.n0) * scn.beta_r
    b2 = scn.beta_n * (scn.alpha_c - scn.alpha_d) * scn.r0 / scn.capacity
    b3 = scn.gamma_a * scn.beta_a
    return ThreatRates(b1=b1, b2=b2, b3=b3)


def optimal_allocation(rates: ThreatRates) -> Allocation:
    """
    First-stage optimal allocation: all fire on the greatest threat

    Ties resolve in the order R, then N, then A.
    """
    b1, b2, b3 = rates.as_tuple()
    if b1 >= b2 and b1 >= b3:
        return Allocation.vertex(0)
    if b2 >= b3:
        return Allocation.vertex(1)
    return Allocation.vertex(2)


def stage_scenario(scn: Scenario, st: BattleState) -> Scenario:
    """
    Scenario whose initial counts are the live counts of a boundary state

    The attrition slope stays anchored to the original network capacity.
    """
    clamped = st.clamped()
    if clamped.b <= 0:
        raise PreconditionError("no stage follows the elimination of B")
    return Scenario(
        alpha_c=scn.alpha_c,
        alpha_d=scn.alpha_d,
        gamma_a=scn.gamma_a,
        beta_r=scn.beta_r,
        beta_n=scn.beta_n,
        beta_a=scn.beta_a,
        b0=clamped.b,
        r0=clamped.r,
        n0=min(clamped.n, scn.capacity),
        a0=clamped.a,
        n_capacity=scn.capacity,
    )


def stage_threat_rates(scn: Scenario, st: BattleState) -> ThreatRates:
    """
    Threatening rates at a stage boundary; eliminated entities contribute 0

    With N dead, R threatens at alpha_d * beta_r; with R dead, b2 is 0.
    """
    rates = threat_rates(stage_scenario(scn, st))
    r_alive = st.alive(Entity.R)
    return ThreatRates(
        b1=rates.b1 if r_alive else 0.0,
        b2=rates.b2 if r_alive and st.alive(Entity.N) else 0.0,
        b3=rates.b3 if st.alive(Entity.A) else 0.0,
    )


def proof_case(rates: ThreatRates) -> str:
    """Which branch of the case analysis the rates fall into"""
    b1, b2, b3 = rates.as_tuple()
    if b1 == b2 or b1 == b3 or b2 == b3:
        return "tie"
    if b1 > b2 and b1 > b3:
        return "b1 max"
    if b2 > b3 > b1:
        return "b2>b3>b1"
    if b2 > b1 > b3:
        return "b2>b1>b3"
    if b3 > b2 > b1:
        return "b3>b2>b1"
    return "b3>b1>b2"
