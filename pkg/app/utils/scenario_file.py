"""Plain-text scenario files: ``key = value`` per line, ``#`` starts a comment."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Union

from pydantic import ValidationError

from ..core.errors import ConfigError
from ..netsim.scenario import Flow, Move, Scenario, make_scenario

logger = logging.getLogger(__name__)


def parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in {"1", "true", "yes", "on"}:
        return True
    if value in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def parse_field_size(text: str) -> Tuple[float, float]:
    """``800x600`` -> ``(800.0, 600.0)``."""

    parts = text.lower().replace("×", "x").split("x")
    if len(parts) != 2:
        raise ValueError(f"expected WxH, got {text!r}")
    return float(parts[0]), float(parts[1])


def parse_flow(text: str) -> Flow:
    """``src:dst:bytes:interval[:start[:stop]]``."""

    parts = [part.strip() for part in text.split(":")]
    if not 4 <= len(parts) <= 6:
        raise ValueError(f"expected src:dst:bytes:interval[:start[:stop]], got {text!r}")
    values: Dict[str, Any] = {
        "src": int(parts[0]),
        "dst": int(parts[1]),
        "packet_size": int(parts[2]),
        "interval": float(parts[3]),
    }
    if len(parts) >= 5:
        values["start"] = float(parts[4])
    if len(parts) == 6:
        values["stop"] = float(parts[5])
    return Flow(**values)


def parse_move(text: str) -> Move:
    """``time:node:x:y``."""

    parts = [part.strip() for part in text.split(":")]
    if len(parts) != 4:
        raise ValueError(f"expected time:node:x:y, got {text!r}")
    return Move(time=float(parts[0]), node=int(parts[1]), x=float(parts[2]), y=float(parts[3]))


def _parse_point(text: str) -> Tuple[float, float]:
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected x,y, got {text!r}")
    return float(parts[0]), float(parts[1])


def _setting(text: str) -> Union[bool, int, float, str]:
    for convert in (int, float):
        try:
            return convert(text)
        except ValueError:
            pass
    try:
        return parse_bool(text)
    except ValueError:
        return text


# Simple keys: file key -> (Scenario field, converter)
_SIMPLE_KEYS: Dict[str, Tuple[str, Callable[[str], Any]]] = {
    "nodes": ("node_count", int),
    "field_x": ("field_x", float),
    "field_y": ("field_y", float),
    "range": ("radio_range", float),
    "bitrate": ("bitrate", float),
    "queue": ("queue_capacity", int),
    "speed_min": ("speed_min", float),
    "speed_max": ("speed_max", float),
    "pause_time": ("pause_time", float),
    "duration": ("duration", float),
    "protocol": ("protocol", lambda text: text.strip().lower()),
    "seed": ("seed", int),
    "packet_size": ("packet_size", int),
    "interval": ("interval", float),
    "flow_count": ("flow_count", int),
    "data_ttl": ("data_ttl", int),
    "connected": ("connected", parse_bool),
}

KNOWN_KEYS = sorted(set(_SIMPLE_KEYS) | {"field", "static", "flow", "move"})


@dataclass(slots=True)
class ScenarioValues:
    """Raw scenario settings plus the file line each one came from."""

    values: Dict[str, Any] = field(default_factory=dict)
    static: bool = False
    lines: Dict[str, int] = field(default_factory=dict)

    def apply(self, overrides: Mapping[str, Any]) -> None:
        """Merge flag values over file values; a flag has no source line."""

        for key, value in overrides.items():
            if key == "static":
                self.static = bool(value)
                continue
            self.values[key] = value
            self.lines.pop(key, None)

    def build(self) -> Scenario:
        values = dict(self.values)
        if self.static:
            values["pause_time"] = values.get("duration", Scenario.model_fields["duration"].default)
            values.setdefault("connected", True)
        try:
            return make_scenario(**values)
        except ConfigError as exc:
            root = (exc.field or "").split(".")[0]
            if exc.line is None and root in self.lines:
                raise ConfigError(exc.message, field=exc.field, line=self.lines[root]) from exc
            raise


def read_scenario_values(text: str) -> ScenarioValues:
    """Parse scenario text without validating cross-field rules yet."""

    parsed = ScenarioValues()
    flows: List[Flow] = []
    moves: List[Move] = []
    positions: Dict[int, Tuple[float, float]] = {}
    energies: Dict[int, float] = {}
    settings: Dict[str, Any] = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=line_no)
        key, value = (part.strip() for part in line.split("=", 1))
        if not value:
            raise ConfigError("missing value", field=key, line=line_no)
        try:
            if key in _SIMPLE_KEYS:
                name, convert = _SIMPLE_KEYS[key]
                parsed.values[name] = convert(value)
                parsed.lines[name] = line_no
            elif key == "field":
                parsed.values["field_x"], parsed.values["field_y"] = parse_field_size(value)
                parsed.lines["field_x"] = parsed.lines["field_y"] = line_no
            elif key == "static":
                parsed.static = parse_bool(value)
            elif key == "flow":
                flows.append(parse_flow(value))
                parsed.lines.setdefault("flows", line_no)
            elif key == "move":
                moves.append(parse_move(value))
                parsed.lines.setdefault("moves", line_no)
            elif key.startswith("position."):
                positions[int(key.split(".", 1)[1])] = _parse_point(value)
                parsed.lines.setdefault("positions", line_no)
            elif key.startswith("energy."):
                energies[int(key.split(".", 1)[1])] = float(value)
                parsed.lines.setdefault("energies", line_no)
            elif key.startswith("config.") and len(key) > len("config."):
                settings[key.split(".", 1)[1]] = _setting(value)
                parsed.lines.setdefault("protocol_config", line_no)
            else:
                raise ConfigError("unknown key", field=key, line=line_no)
        except ConfigError as exc:
            if exc.line is None:
                raise ConfigError(exc.message, field=key, line=line_no) from exc
            raise
        except ValidationError as exc:
            first = exc.errors()[0]
            where = ".".join(str(part) for part in first.get("loc", ()))
            message = f"{where}: {first['msg']}" if where else first["msg"]
            raise ConfigError(message, field=key, line=line_no) from exc
        except ValueError as exc:
            raise ConfigError(str(exc).splitlines()[0], field=key, line=line_no) from exc

    if flows:
        parsed.values["flows"] = tuple(flows)
    if moves:
        parsed.values["moves"] = tuple(moves)
    if positions:
        parsed.values["positions"] = positions
    if energies:
        parsed.values["energies"] = energies
    if settings:
        parsed.values["protocol_config"] = settings
    return parsed


def parse_scenario_text(text: str, overrides: Optional[Mapping[str, Any]] = None) -> Scenario:
    parsed = read_scenario_values(text)
    if overrides:
        parsed.apply(overrides)
    return parsed.build()


def parse_scenario(
    path: Union[str, Path], overrides: Optional[Mapping[str, Any]] = None
) -> Scenario:
    """Read a scenario file; *overrides* (command-line flags) win over file values.

    ``OSError`` from reading propagates unchanged.
    """

    text = Path(path).read_text(encoding="utf-8")
    scenario = parse_scenario_text(text, overrides)
    logger.debug("Loaded scenario from %s", path)
    return scenario


__all__ = [
    "KNOWN_KEYS",
    "ScenarioValues",
    "parse_bool",
    "parse_field_size",
    "parse_flow",
    "parse_move",
    "parse_scenario",
    "parse_scenario_text",
    "read_scenario_values",
]
