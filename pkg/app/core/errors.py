"""Exception hierarchy shared by the simulator packages."""

from __future__ import annotations

from enum import Enum
from typing import Optional


class SimulationError(RuntimeError):
    """Base error raised by the simulator."""


class ConfigError(SimulationError):
    """Raised when a scenario, flag or protocol setting is invalid."""

    def __init__(
        self, message: str, *, field: Optional[str] = None, line: Optional[int] = None
    ) -> None:
        self.field = field
        self.line = line
        self.message = message
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if field is not None:
            prefix += f"{field}: "
        super().__init__(prefix + message)


class DecodeReason(str, Enum):
    TRUNCATED = "Truncated"
    BAD_KIND = "BadKind"
    BAD_LENGTH = "BadLength"


class DecodeError(SimulationError):
    """Raised when a byte sequence is not a valid wire message."""

    def __init__(self, reason: DecodeReason, offset: int) -> None:
        self.reason = reason
        self.offset = offset
        super().__init__(f"{reason.value} at byte offset {offset}")


class EncodeError(SimulationError):
    """Raised when a message violates the wire layout limits."""


class DuplicateAddress(SimulationError):
    """Raised when a node would appear twice in an accumulated address list."""

    def __init__(self, addr: int) -> None:
        self.addr = addr
        super().__init__(f"node {addr} already present in accumulated path")


class MalformedTrace(SimulationError):
    """Raised when a trace line or packet lifecycle is inconsistent."""

    def __init__(self, message: str, *, line: int) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


class NoDeliveredPackets(SimulationError):
    """Raised when a delay metric is requested for a trace without deliveries."""


class EmptyInput(SimulationError):
    """Raised when aggregation receives no reports."""


__all__ = [
    "SimulationError",
    "ConfigError",
    "DecodeReason",
    "DecodeError",
    "EncodeError",
    "DuplicateAddress",
    "MalformedTrace",
    "NoDeliveredPackets",
    "EmptyInput",
]
