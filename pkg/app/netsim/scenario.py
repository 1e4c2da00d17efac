"""Run configuration: field, radio, mobility, traffic and protocol settings."""

from __future__ import annotations

import logging
from typing import Any, Dict, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..core.errors import ConfigError
from ..routing.factory import validate_overrides
from .prng import StreamId, substream

logger = logging.getLogger(__name__)

ProtocolName = Literal["dymo", "aodv", "dsdv", "dsr"]
SettingValue = Union[bool, int, float, str]

_MAX_FLOW_START_SPREAD = 10.0


class Flow(BaseModel):
    """One constant-bit-rate source."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    src: int = Field(ge=0)
    dst: int = Field(ge=0)
    packet_size: int = Field(default=512, gt=0, le=0xFFFF)
    interval: float = Field(default=0.1, gt=0)
    start: float = Field(default=1.0, ge=0)
    stop: Optional[float] = None

    @model_validator(mode="after")
    def _check_window(self) -> "Flow":
        if self.stop is not None and self.stop <= self.start:
            raise ConfigError("stop must be later than start", field="flow.stop")
        return self


class Move(BaseModel):
    """A scripted relocation: *node* jumps to ``(x, y)`` at *time* and stays there."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    time: float = Field(ge=0)
    node: int = Field(ge=0)
    x: float
    y: float


class Scenario(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    node_count: int = Field(default=40, gt=0)
    field_x: float = Field(default=800.0, gt=0)
    field_y: float = Field(default=800.0, gt=0)
    radio_range: float = Field(default=250.0, gt=0)
    bitrate: float = Field(default=2_000_000.0, gt=0)
    queue_capacity: int = Field(default=15, gt=0)
    speed_min: float = Field(default=1.0, gt=0)
    speed_max: float = Field(default=20.0, gt=0)
    pause_time: float = Field(default=0.0, ge=0)
    duration: float = Field(default=200.0, gt=0)
    protocol: ProtocolName = "dymo"
    seed: int = Field(default=1, ge=0, lt=1 << 64)
    flows: Tuple[Flow, ...] = ()
    flow_count: int = Field(default=10, ge=0)
    packet_size: int = Field(default=512, gt=0, le=0xFFFF)
    interval: float = Field(default=0.1, gt=0)
    data_ttl: int = Field(default=32, ge=1, le=255)
    connected: bool = False
    positions: Dict[int, Tuple[float, float]] = Field(default_factory=dict)
    moves: Tuple[Move, ...] = ()
    energies: Dict[int, float] = Field(default_factory=dict)
    protocol_config: Dict[str, SettingValue] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_references(self) -> "Scenario":
        if self.speed_min > self.speed_max:
            raise ConfigError("must not exceed speed_max", field="speed_min")
        for flow in self.flows:
            for name, node in (("src", flow.src), ("dst", flow.dst)):
                if node >= self.node_count:
                    raise ConfigError(f"node {node} does not exist", field=f"flow.{name}")
        for move in self.moves:
            self._check_node(move.node, "move.node")
            self._check_point(move.x, move.y, "move")
        for node, (x, y) in self.positions.items():
            self._check_node(node, "positions")
            self._check_point(x, y, "positions")
        for node in self.energies:
            self._check_node(node, "energies")
        validate_overrides(self.protocol_config)
        return self

    def _check_node(self, node: int, field: str) -> None:
        if not 0 <= node < self.node_count:
            raise ConfigError(f"node {node} does not exist", field=field)

    def _check_point(self, x: float, y: float, field: str) -> None:
        if not (0 <= x <= self.field_x and 0 <= y <= self.field_y):
            raise ConfigError(f"point ({x}, {y}) lies outside the field", field=field)

    # ------------------------------------------------------------------
    # Derived values
    # ------------------------------------------------------------------
    @property
    def is_static(self) -> bool:
        return self.pause_time >= self.duration

    def with_overrides(self, **changes: Any) -> "Scenario":
        """Return a re-validated copy with *changes* applied."""

        values = self.model_dump()
        values.update(changes)
        return make_scenario(**values)

    def resolved_flows(self) -> Tuple[Flow, ...]:
        """Explicit flows, or ``flow_count`` random ones from the traffic substream."""

        if self.flows:
            return self.flows
        if self.node_count < 2 or self.flow_count == 0:
            return ()
        rng = substream(self.seed, StreamId.TRAFFIC)
        spread = min(_MAX_FLOW_START_SPREAD, self.duration / 10)
        flows: list[Flow] = []
        for _ in range(self.flow_count):
            src = rng.randbelow(self.node_count)
            dst = rng.randbelow(self.node_count - 1)
            if dst >= src:
                dst += 1
            flows.append(
                Flow(
                    src=src,
                    dst=dst,
                    packet_size=self.packet_size,
                    interval=self.interval,
                    start=1.0 + spread * rng.random(),
                )
            )
        return tuple(flows)


def _error_field(exc: ValidationError) -> Tuple[Optional[str], str]:
    errors = exc.errors()
    if not errors:
        return None, str(exc)
    first = errors[0]
    loc = ".".join(str(part) for part in first.get("loc", ()))
    return loc or None, first.get("msg", "invalid value")


def make_scenario(**values: Any) -> Scenario:
    """Build a :class:`Scenario`, reporting pydantic failures as :class:`ConfigError`."""

    try:
        return Scenario(**values)
    except ValidationError as exc:
        field, message = _error_field(exc)
        raise ConfigError(message, field=field) from exc


__all__ = ["Flow", "Move", "Scenario", "make_scenario"]
