import numpy as np
import pytest
from numpy.testing import assert_allclose

from model.core import (
    EPS_KILL,
    Allocation,
    BattleState,
    Entity,
    Scenario,
    ThreatRates,
    attrition_fn,
    optimal_allocation,
    proof_case,
    rhs,
    stage_scenario,
    stage_threat_rates,
    threat_rates,
)
from model.exceptions import DomainError, PreconditionError, ValidationError


class TestScenario:
    def test_rejects_alpha_d_above_alpha_c(self):
        with pytest.raises(ValidationError) as info:
            Scenario(alpha_c=0.1, alpha_d=0.2, gamma_a=0.2, beta_r=0.5, beta_n=0.3, beta_a=0.2,
                     b0=170, r0=120, n0=20, a0=50)
        assert info.value.field == "alpha_d"

    @pytest.mark.parametrize("name", ["b0", "n0"])
    def test_rejects_zero_b0_and_n0(self, name):
        values = dict(alpha_c=0.4, alpha_d=0.15, gamma_a=0.2, beta_r=0.5, beta_n=0.3, beta_a=0.2,
                      b0=170, r0=120, n0=20, a0=50)
        values[name] = 0
        with pytest.raises(ValidationError) as info:
            Scenario(**values)
        assert info.value.field == name

    def test_rejects_negative_rate(self):
        with pytest.raises(ValidationError) as info:
            Scenario(alpha_c=0.4, alpha_d=0.15, gamma_a=-0.2, beta_r=0.5, beta_n=0.3, beta_a=0.2,
                     b0=170, r0=120, n0=20, a0=50)
        assert info.value.field == "gamma_a"

    def test_capacity_defaults_to_n0(self, case1):
        assert case1.capacity == 20
        assert case1.initial_state() == BattleState(t=0.0, b=170, r=120, n=20, a=50, x=0.0)

    def test_accepts_numpy_scalars(self, case1):
        scn = Scenario(alpha_c=np.float64(0.4), alpha_d=0.15, gamma_a=0.2, beta_r=0.5, beta_n=0.3, beta_a=0.2,
                       b0=np.int64(170), r0=np.int32(120), n0=np.int64(20), a0=50)
        assert scn == case1
        assert Allocation(np.int64(0), np.float64(1.0), 0) == Allocation(0, 1, 0)

    def test_rejects_non_numeric(self):
        with pytest.raises(ValidationError) as info:
            Scenario(alpha_c=0.4, alpha_d=0.15, gamma_a=0.2, beta_r=0.5, beta_n=0.3, beta_a="0.2",
                     b0=170, r0=120, n0=20, a0=50)
        assert info.value.field == "beta_a"

    def test_zero_network_allowed_with_capacity(self, case1):
        scn = Scenario(alpha_c=0.4, alpha_d=0.15, gamma_a=0.2, beta_r=0.5, beta_n=0.3, beta_a=0.2,
                       b0=100, r0=120, n0=0, a0=50, n_capacity=20)
        assert scn.capacity == 20


class TestAllocation:
    def test_renormalizes_small_deviation(self):
        alloc = Allocation(0.7, 0.2, 0.1)
        assert sum(alloc.as_tuple()) == pytest.approx(1.0, abs=1e-15)

    def test_rejects_bad_sum(self):
        with pytest.raises(ValidationError):
            Allocation(0.5, 0.2, 0.1)

    def test_rejects_component_outside_unit_interval(self):
        with pytest.raises(ValidationError):
            Allocation(1.5, -0.5, 0.0)

    def test_vertex_and_target(self):
        assert Allocation.vertex(1) == Allocation(0, 1, 0)
        assert Allocation.vertex(2).target is Entity.A
        assert Allocation(0.5, 0.5, 0).target is None
        assert str(Allocation.vertex(1)) == "(0,1,0)"
        assert_allclose(Allocation.vertex(0).as_array(), [1.0, 0.0, 0.0])


class TestAttritionFn:
    @pytest.mark.parametrize("n, expected", [(20, 0.4), (0, 0.15), (10, 0.275)])
    def test_case1_values(self, case1, n, expected):
        assert attrition_fn(case1, n) == pytest.approx(expected, abs=1e-15)

    def test_endpoints_exact(self, case1):
        assert attrition_fn(case1, 20) == 0.4
        assert attrition_fn(case1, 0) == 0.15

    @pytest.mark.parametrize("n", [-1e-6, 20.001])
    def test_outside_domain(self, case1, n):
        with pytest.raises(DomainError):
            attrition_fn(case1, n)

    def test_affine(self, case2):
        for lam in np.linspace(0.0, 1.0, 11):
            expected = case2.alpha_d + lam * (case2.alpha_c - case2.alpha_d)
            assert attrition_fn(case2, lam * case2.n0) == pytest.approx(expected, abs=1e-15)


class TestRhs:
    def test_case1_initial_state(self, case1):
        d = rhs(case1, Allocation(0, 1, 0), case1.initial_state())
        assert_allclose(d, [-58.0, 0.0, -51.0, 0.0, 170.0], atol=1e-12)

    def test_case3_fire_on_a(self, case3):
        d = rhs(case3, Allocation(0, 0, 1), case3.initial_state())
        assert_allclose(d, [-78.0, 0.0, 0.0, -85.0, 170.0], atol=1e-12)

    def test_dead_b_stops_everything(self, case1):
        st = BattleState(t=1.0, b=0.0, r=30, n=5, a=10, x=100)
        d = rhs(case1, Allocation(0.3, 0.3, 0.4), st)
        assert_allclose(d[1:], [0.0, 0.0, 0.0, 0.0])

    def test_dead_entities_frozen(self, case1):
        st = BattleState(t=1.0, b=100, r=EPS_KILL / 2, n=0.0, a=10, x=100)
        d = rhs(case1, Allocation(0.5, 0.5, 0.0), st)
        assert d[1] == 0.0
        assert d[2] == 0.0
        assert d[0] == pytest.approx(-0.2 * 10)

    def test_signs(self, any_case):
        for alloc in (Allocation(1, 0, 0), Allocation(0.2, 0.3, 0.5)):
            d = rhs(any_case, alloc, any_case.initial_state())
            assert d[0] <= 0
            assert np.all(d[1:4] <= 0)


class TestThreatRates:
    @pytest.mark.parametrize("fixture, expected", [
        ("case1", (0.2, 0.45, 0.04)),
        ("case2", (0.2, 0.12, 0.04)),
        ("case3", (0.2, 0.08, 0.3)),
    ])
    def test_bundled_cases(self, request, fixture, expected):
        rates = threat_rates(request.getfixturevalue(fixture))
        assert_allclose(rates.as_tuple(), expected, atol=1e-12, rtol=0)

    def test_b2_vanishes_without_network_effect(self):
        scn = Scenario(alpha_c=0.3, alpha_d=0.3, gamma_a=0.2, beta_r=0.5, beta_n=0.3, beta_a=0.2,
                       b0=170, r0=120, n0=20, a0=50)
        assert threat_rates(scn).b2 == 0.0

    def test_independent_of_a0_and_b0(self, case1):
        other = Scenario(alpha_c=0.4, alpha_d=0.15, gamma_a=0.2, beta_r=0.5, beta_n=0.3, beta_a=0.2,
                         b0=3, r0=120, n0=20, a0=7)
        assert threat_rates(other) == threat_rates(case1)


class TestOptimalAllocation:
    @pytest.mark.parametrize("rates, expected", [
        ((0.2, 0.45, 0.04), (0, 1, 0)),
        ((0.2, 0.12, 0.04), (1, 0, 0)),
        ((0.5, 0.5, 0.5), (1, 0, 0)),
        ((0.2, 0.08, 0.3), (0, 0, 1)),
        ((0.1, 0.3, 0.3), (0, 1, 0)),
    ])
    def test_vertex_choice(self, rates, expected):
        assert optimal_allocation(ThreatRates(*rates)) == Allocation(*expected)

    def test_scaling_invariance(self):
        rates = ThreatRates(0.2, 0.08, 0.3)
        for k in (1e-3, 2.0, 1e6):
            scaled = ThreatRates(*(k * v for v in rates.as_tuple()))
            assert optimal_allocation(scaled) == optimal_allocation(rates)

    def test_returns_vertex_of_max_rate(self):
        rng = np.random.default_rng(7)
        for values in rng.uniform(0, 1, size=(50, 3)):
            alloc = optimal_allocation(ThreatRates(*values))
            assert alloc.target is not None
            assert float(np.dot(alloc.as_array(), values)) == max(values)


class TestStageRates:
    def test_boundary_scenario_keeps_capacity(self, case1):
        st = BattleState(t=0.4, b=152.2, r=120, n=0.0, a=50, x=66.67)
        scn = stage_scenario(case1, st)
        assert scn.n0 == 0.0
        assert scn.capacity == 20
        assert scn.b0 == 152.2

    def test_dead_network_uses_disconnected_rate(self, case1):
        st = BattleState(t=0.4, b=152.2, r=120, n=0.0, a=50, x=66.67)
        rates = stage_threat_rates(case1, st)
        assert rates.b1 == pytest.approx(0.15 * 0.5)
        assert rates.b2 == 0.0
        assert rates.b3 == pytest.approx(0.04)

    def test_dead_r_zeroes_b1_and_b2(self, case1):
        st = BattleState(t=1.0, b=120, r=0.0, n=10, a=50, x=200)
        rates = stage_threat_rates(case1, st)
        assert rates.b1 == 0.0
        assert rates.b2 == 0.0

    def test_no_stage_after_b_dies(self, case1):
        with pytest.raises(PreconditionError):
            stage_scenario(case1, BattleState(t=2.0, b=0.0, r=10, n=5, a=5, x=300))


@pytest.mark.parametrize("rates, expected", [
    ((0.2, 0.45, 0.04), "b2>b1>b3"),
    ((0.2, 0.08, 0.3), "b3>b1>b2"),
    ((0.2, 0.12, 0.04), "b1 max"),
    ((0.1, 0.3, 0.2), "b2>b3>b1"),
    ((0.1, 0.2, 0.3), "b3>b2>b1"),
    ((0.2, 0.2, 0.1), "tie"),
])
def test_proof_case(rates, expected):
    assert proof_case(ThreatRates(*rates)) == expected
