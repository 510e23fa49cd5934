import pytest

from conftest import SCENARIOS_DIR, STRATEGIES_DIR, case1_scenario, case3_scenario
from engine.battle import PolicyMode, StrategyScript
from engine.integrator import IntegratorConfig
from model.core import Allocation
from utils.scenario_file import (
    ScenarioFile,
    ScenarioFileError,
    load_scenario_file,
    load_strategy_file,
    parse_scenario_text,
    save_scenario_file,
    serialize_scenario_file,
)

CASE1_TEXT = """[parameters]
alpha_c = 0.4
alpha_d = 0.15
gamma_a = 0.2
beta_r = 0.5
beta_n = 0.3
beta_a = 0.2

[initial]
b0 = 170
r0 = 120
n0 = 20
a0 = 50
"""


class TestBundledFiles:
    @pytest.mark.parametrize("name, scenario", [("case1", case1_scenario), ("case3", case3_scenario)])
    def test_parse(self, name, scenario):
        parsed = load_scenario_file(SCENARIOS_DIR / f"{name}.ini")
        assert parsed.scenario == scenario()
        assert parsed.strategy == StrategyScript.greedy()
        assert parsed.integrator is None
        assert parsed.source.endswith(f"{name}.ini")

    def test_contrast_strategy(self):
        script = load_strategy_file(STRATEGIES_DIR / "case2_pi3.ini", load_scenario_file(
            SCENARIOS_DIR / "case2.ini").scenario)
        assert script.policy_mode is PolicyMode.SCRIPTED
        assert script.allocations == (Allocation(0.7, 0.2, 0.1), Allocation(0, 0, 1))


class TestParse:
    def test_defaults_without_optional_sections(self):
        parsed = parse_scenario_text(CASE1_TEXT)
        assert parsed.scenario == case1_scenario()
        assert parsed.strategy is None
        assert parsed.strategy_or_default() == StrategyScript.greedy()
        assert parsed.integrator_or_default() == IntegratorConfig()

    def test_integrator_section(self):
        parsed = parse_scenario_text(CASE1_TEXT + "\n[integrator]\nstep = 0.002\n")
        assert parsed.integrator.step == 0.002
        assert parsed.integrator.event_tolerance == 1e-10

    def test_unknown_key(self):
        with pytest.raises(ScenarioFileError) as info:
            parse_scenario_text(CASE1_TEXT.replace("gamma_a", "gamma_x"), source="bad.ini")
        assert info.value.key == "gamma_x"
        assert info.value.line == 4
        assert str(info.value).startswith("bad.ini:4: gamma_x:")

    def test_key_names_are_case_sensitive(self):
        with pytest.raises(ScenarioFileError) as info:
            parse_scenario_text(CASE1_TEXT.replace("alpha_c", "ALPHA_C"))
        assert info.value.key == "ALPHA_C"
        assert info.value.line == 2

    def test_unknown_section(self):
        with pytest.raises(ScenarioFileError) as info:
            parse_scenario_text(CASE1_TEXT + "\n[extras]\nfoo = 1\n")
        assert info.value.key == "extras"
        assert info.value.line == 15

    def test_missing_key(self):
        with pytest.raises(ScenarioFileError) as info:
            parse_scenario_text(CASE1_TEXT.replace("a0 = 50\n", ""))
        assert info.value.key == "a0"

    def test_missing_section(self):
        with pytest.raises(ScenarioFileError) as info:
            parse_scenario_text(CASE1_TEXT.split("[initial]")[0])
        assert info.value.key == "initial"

    def test_non_utf8_file(self, tmp_path):
        path = tmp_path / "latin.ini"
        path.write_bytes(CASE1_TEXT.replace("b0 = 170", "b0 = 170\xb0").encode("latin-1"))
        with pytest.raises(ScenarioFileError) as info:
            load_scenario_file(path)
        assert "not valid UTF-8" in str(info.value)
        assert info.value.source == str(path)

    def test_non_number(self):
        with pytest.raises(ScenarioFileError) as info:
            parse_scenario_text(CASE1_TEXT.replace("beta_n = 0.3", "beta_n = lots"))
        assert info.value.key == "beta_n"
        assert info.value.line == 6

    def test_zero_network_reports_key_and_line(self):
        with pytest.raises(ScenarioFileError) as info:
            parse_scenario_text(CASE1_TEXT.replace("n0 = 20", "n0 = 0"))
        assert info.value.key == "n0"
        assert info.value.line == 12

    @pytest.mark.parametrize("stages", ["[[1, 0]]", "[]", "[[0.5, 0.2, 0.1]]", "not json", '[["a", 0, 1]]'])
    def test_bad_stages(self, stages):
        text = CASE1_TEXT + f"\n[strategy]\nmode = scripted\nstages = {stages}\n"
        with pytest.raises(ScenarioFileError) as info:
            parse_scenario_text(text)
        assert info.value.key == "stages"
        assert info.value.line == 17

    def test_scripted_mode_needs_stages(self):
        with pytest.raises(ScenarioFileError):
            parse_scenario_text(CASE1_TEXT + "\n[strategy]\nmode = scripted\n")

    def test_greedy_mode_rejects_stages(self):
        with pytest.raises(ScenarioFileError):
            parse_scenario_text(CASE1_TEXT + "\n[strategy]\nmode = greedy\nstages = [[1, 0, 0]]\n")

    def test_bad_integrator_tolerance(self):
        text = CASE1_TEXT + "\n[integrator]\nstep = 1e-3\nevent_tolerance = 0.1\n"
        with pytest.raises(ScenarioFileError) as info:
            parse_scenario_text(text)
        assert info.value.key == "event_tolerance"
        assert info.value.line == 17


def test_round_trip(tmp_path):
    original = ScenarioFile(
        scenario=case3_scenario(),
        strategy=StrategyScript.scripted([Allocation(0.5, 0.25, 0.25), Allocation(0, 0, 1)]),
        integrator=IntegratorConfig(step=2e-3, event_tolerance=1e-11, max_time=500.0),
    )
    path = save_scenario_file(original, tmp_path / "saved.ini")
    loaded = load_scenario_file(path)
    assert loaded.scenario == original.scenario
    assert loaded.strategy == original.strategy
    assert loaded.integrator == original.integrator
    assert serialize_scenario_file(loaded) == serialize_scenario_file(original)


class TestStrategyFiles:
    def test_without_scenario_sections(self, tmp_path):
        path = tmp_path / "pi2.ini"
        path.write_text("[strategy]\nmode = scripted\nstages = [[0, 1, 0]]\n", encoding="utf-8")
        script = load_strategy_file(path, case3_scenario())
        assert script.allocations == (Allocation(0, 1, 0),)

    def test_matching_scenario_accepted(self, tmp_path):
        path = tmp_path / "same.ini"
        path.write_text(CASE1_TEXT + "\n[strategy]\nmode = scripted\nstages = [[1, 0, 0]]\n", encoding="utf-8")
        assert load_strategy_file(path, case1_scenario()).label == "(1,0,0)"

    def test_mismatched_scenario(self, tmp_path):
        path = tmp_path / "other.ini"
        path.write_text(CASE1_TEXT + "\n[strategy]\nmode = greedy\n", encoding="utf-8")
        with pytest.raises(ScenarioFileError) as info:
            load_strategy_file(path, case3_scenario())
        assert info.value.key == "parameters"
        assert info.value.line == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_scenario_file(tmp_path / "absent.ini")
