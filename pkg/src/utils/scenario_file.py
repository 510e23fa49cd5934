"""
Scenario File Module
Reads and writes the INI documents describing one battle: attrition
parameters, initial counts, an optional strategy and integrator settings
"""

import configparser
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from engine.battle import PolicyMode, StrategyScript
from engine.integrator import IntegratorConfig
from model.core import Allocation, Scenario
from model.exceptions import ValidationError

PARAMETER_KEYS = ("alpha_c", "alpha_d", "gamma_a", "beta_r", "beta_n", "beta_a")
INITIAL_KEYS = ("b0", "r0", "n0", "a0")
STRATEGY_KEYS = ("mode", "stages")
INTEGRATOR_KEYS = ("step", "event_tolerance", "max_time")

SECTION_KEYS: Dict[str, Tuple[str, ...]] = {
    "parameters": PARAMETER_KEYS,
    "initial": INITIAL_KEYS,
    "strategy": STRATEGY_KEYS,
    "integrator": INTEGRATOR_KEYS,
}

STRATEGY_MODES = {"greedy": PolicyMode.GREEDY_OPTIMAL, "scripted": PolicyMode.SCRIPTED}


class ScenarioFileError(ValidationError):
    """Scenario file problem, located by key and line where possible"""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None,
                 source: str = "<string>"):
        self.key = key
        self.line = line
        self.source = source
        location = source if line is None else f"{source}:{line}"
        prefix = f"{location}: {key}: " if key else f"{location}: "
        super().__init__(prefix + message, field=key)


@dataclass(frozen=True)
class ScenarioFile:
    """Parsed content of a scenario or strategy file"""

    scenario: Optional[Scenario]
    strategy: Optional[StrategyScript] = None
    integrator: Optional[IntegratorConfig] = None
    source: str = "<string>"

    def strategy_or_default(self) -> StrategyScript:
        return self.strategy if self.strategy is not None else StrategyScript.greedy()

    def integrator_or_default(self) -> IntegratorConfig:
        return self.integrator if self.integrator is not None else IntegratorConfig.from_config()


def _find_line(text: str, section: str, key: Optional[str] = None) -> Optional[int]:
    """1-based line of a section header, or of a key inside that section"""
    current = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        header = re.match(r"^\[([^\]]+)\]", line)
        if header:
            current = header.group(1).strip()
            if key is None and current == section:
                return number
            continue
        if key is not None and current == section:
            match = re.match(r"^([^=:\s]+)\s*[=:]", line)
            if match and match.group(1) == key:
                return number
    return None


def _read_parser(text: str, source: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    # key names are matched exactly
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.DuplicateOptionError as e:
        raise ScenarioFileError("duplicate key", key=e.option, line=e.lineno, source=source) from e
    except configparser.DuplicateSectionError as e:
        raise ScenarioFileError("duplicate section", key=e.section, line=e.lineno, source=source) from e
    except configparser.MissingSectionHeaderError as e:
        raise ScenarioFileError("content before the first section header", line=e.lineno, source=source) from e
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise ScenarioFileError("malformed line", line=line, source=source) from e
    return parser


def _check_layout(parser: configparser.ConfigParser, text: str, source: str) -> None:
    for section in parser.sections():
        if section not in SECTION_KEYS:
            raise ScenarioFileError(f"unknown section [{section}]", key=section,
                                    line=_find_line(text, section), source=source)
        for key in parser[section]:
            if key not in SECTION_KEYS[section]:
                raise ScenarioFileError(f"unknown key in [{section}]", key=key,
                                        line=_find_line(text, section, key), source=source)


def _read_floats(parser: configparser.ConfigParser, text: str, source: str, section: str,
                 keys: Tuple[str, ...], required: bool = True) -> Dict[str, float]:
    values = {}
    for key in keys:
        if key not in parser[section]:
            if required:
                raise ScenarioFileError(f"missing from [{section}]", key=key,
                                        line=_find_line(text, section), source=source)
            continue
        try:
            values[key] = parser.getfloat(section, key)
        except ValueError as e:
            raise ScenarioFileError(f"not a number: {parser.get(section, key)!r}", key=key,
                                    line=_find_line(text, section, key), source=source) from e
    return values


def _parse_stages(value: str, line: Optional[int], source: str) -> List[Allocation]:
    try:
        stages = json.loads(value)
    except json.JSONDecodeError as e:
        raise ScenarioFileError(f"stages must be a JSON list of allocations: {e.msg}",
                                key="stages", line=line, source=source) from e
    if not isinstance(stages, list) or not stages:
        raise ScenarioFileError("stages must be a non-empty list", key="stages", line=line, source=source)

    allocations = []
    for index, entry in enumerate(stages):
        if not isinstance(entry, list) or len(entry) != 3:
            raise ScenarioFileError(f"stage {index} must have exactly three fractions",
                                    key="stages", line=line, source=source)
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry):
            raise ScenarioFileError(f"stage {index} holds a non-numeric fraction",
                                    key="stages", line=line, source=source)
        try:
            allocations.append(Allocation(*(float(v) for v in entry)))
        except ValidationError as e:
            raise ScenarioFileError(f"stage {index}: {e}", key="stages", line=line, source=source) from e
    return allocations


def _parse_strategy(parser: configparser.ConfigParser, text: str, source: str) -> StrategyScript:
    section = parser["strategy"]
    mode_name = section.get("mode", "greedy").strip().lower()
    if mode_name not in STRATEGY_MODES:
        raise ScenarioFileError(f"mode must be one of {sorted(STRATEGY_MODES)}, got {mode_name!r}",
                                key="mode", line=_find_line(text, "strategy", "mode"), source=source)

    stages_line = _find_line(text, "strategy", "stages")
    if STRATEGY_MODES[mode_name] is PolicyMode.GREEDY_OPTIMAL:
        if "stages" in section:
            raise ScenarioFileError("stages are only read in scripted mode", key="stages",
                                    line=stages_line, source=source)
        return StrategyScript.greedy()

    if "stages" not in section:
        raise ScenarioFileError("scripted mode needs a stages list", key="stages",
                                line=_find_line(text, "strategy"), source=source)
    return StrategyScript.scripted(_parse_stages(section["stages"], stages_line, source))


def _field_section(field: Optional[str]) -> Optional[str]:
    for section, keys in SECTION_KEYS.items():
        if field in keys:
            return section
    return None


def parse_scenario_text(text: str, source: str = "<string>", require_scenario: bool = True) -> ScenarioFile:
    """
    Parse the text of a scenario file

    Args:
        text (str): INI document
        source (str): Name used in error messages
        require_scenario (bool): Whether [parameters] and [initial] must be present;
            strategy files may leave both out

    Returns:
        ScenarioFile: Scenario, strategy and integrator settings found in the text

    Raises:
        ScenarioFileError: Unknown or missing key, bad value or invalid scenario,
            naming the key and its line
    """
    parser = _read_parser(text, source)
    _check_layout(parser, text, source)

    has_parameters = parser.has_section("parameters")
    has_initial = parser.has_section("initial")
    scenario = None
    if has_parameters or has_initial or require_scenario:
        for section in ("parameters", "initial"):
            if not parser.has_section(section):
                raise ScenarioFileError(f"missing section [{section}]", key=section, source=source)
        values = _read_floats(parser, text, source, "parameters", PARAMETER_KEYS)
        values.update(_read_floats(parser, text, source, "initial", INITIAL_KEYS))
        try:
            scenario = Scenario(**values)
        except ValidationError as e:
            section = _field_section(e.field)
            line = _find_line(text, section, e.field) if section else None
            raise ScenarioFileError(str(e), key=e.field, line=line, source=source) from e

    strategy = _parse_strategy(parser, text, source) if parser.has_section("strategy") else None

    integrator = None
    if parser.has_section("integrator"):
        settings = _read_floats(parser, text, source, "integrator", INTEGRATOR_KEYS, required=False)
        try:
            integrator = IntegratorConfig(**settings)
        except ValidationError as e:
            raise ScenarioFileError(str(e), key=e.field, line=_find_line(text, "integrator", e.field),
                                    source=source) from e

    return ScenarioFile(scenario=scenario, strategy=strategy, integrator=integrator, source=source)


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ScenarioFileError(f"file is not valid UTF-8 (byte {e.start})", source=str(path)) from e


def load_scenario_file(path: Path) -> ScenarioFile:
    """Read and parse a scenario file; OSError propagates when it cannot be read"""
    path = Path(path)
    return parse_scenario_text(_read_text(path), source=str(path))


def load_strategy_file(path: Path, scenario: Scenario) -> StrategyScript:
    """
    Read the strategy of a contrast file

    Args:
        path (Path): Strategy file; its scenario sections are optional
        scenario (Scenario): Scenario the strategy will be run against

    Returns:
        StrategyScript: The file's strategy (greedy when it has none)

    Raises:
        ScenarioFileError: The file describes a different scenario
    """
    path = Path(path)
    text = _read_text(path)
    parsed = parse_scenario_text(text, source=str(path), require_scenario=False)
    if parsed.scenario is not None and parsed.scenario != scenario:
        raise ScenarioFileError("scenario differs from the one being compared", key="parameters",
                                line=_find_line(text, "parameters"), source=str(path))
    return parsed.strategy_or_default()


def serialize_scenario_file(scenario_file: ScenarioFile) -> str:
    """INI text that parses back to the same values"""
    parser = configparser.ConfigParser(interpolation=None)
    scn = scenario_file.scenario
    if scn is not None:
        parser["parameters"] = {key: repr(float(getattr(scn, key))) for key in PARAMETER_KEYS}
        parser["initial"] = {key: repr(float(getattr(scn, key))) for key in INITIAL_KEYS}

    strategy = scenario_file.strategy
    if strategy is not None:
        if strategy.policy_mode is PolicyMode.GREEDY_OPTIMAL:
            parser["strategy"] = {"mode": "greedy"}
        else:
            parser["strategy"] = {
                "mode": "scripted",
                "stages": json.dumps([list(alloc.as_tuple()) for alloc in strategy.allocations]),
            }

    cfg = scenario_file.integrator
    if cfg is not None:
        parser["integrator"] = {key: repr(float(getattr(cfg, key))) for key in INTEGRATOR_KEYS}

    buffer = io.StringIO()
    parser.write(buffer)
    return buffer.getvalue()


def save_scenario_file(scenario_file: ScenarioFile, path: Path) -> Path:
    path = Path(path)
    path.write_text(serialize_scenario_file(scenario_file), encoding="utf-8")
    return path
