import sys
from pathlib import Path

import pytest

# Add src directory to path for imports
sys.path.append(str(Path(__file__).parent.parent / "src"))

from engine.integrator import IntegratorConfig  # noqa: E402
from model.core import Scenario  # noqa: E402

SCENARIOS_DIR = Path(__file__).parent.parent / "scenarios"
STRATEGIES_DIR = SCENARIOS_DIR / "strategies"


def case1_scenario() -> Scenario:
    return Scenario(alpha_c=0.4, alpha_d=0.15, gamma_a=0.2, beta_r=0.5, beta_n=0.3, beta_a=0.2,
                    b0=170, r0=120, n0=20, a0=50)


def case2_scenario() -> Scenario:
    return Scenario(alpha_c=0.4, alpha_d=0.15, gamma_a=0.2, beta_r=0.5, beta_n=0.2, beta_a=0.2,
                    b0=170, r0=120, n0=50, a0=50)


def case3_scenario() -> Scenario:
    return Scenario(alpha_c=0.4, alpha_d=0.2, gamma_a=0.6, beta_r=0.5, beta_n=0.2, beta_a=0.5,
                    b0=170, r0=120, n0=60, a0=50)


@pytest.fixture
def case1():
    return case1_scenario()


@pytest.fixture
def case2():
    return case2_scenario()


@pytest.fixture
def case3():
    return case3_scenario()


@pytest.fixture(params=[case1_scenario, case2_scenario, case3_scenario], ids=["case1", "case2", "case3"])
def any_case(request):
    return request.param()


@pytest.fixture
def cfg():
    return IntegratorConfig(step=1e-3, event_tolerance=1e-10, max_time=1e4)
