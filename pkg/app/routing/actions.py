"""Router outputs consumed by the simulation engine."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from ..core.messages import Message


class DropReason(str, Enum):
    BUFFER_FULL = "BufferFull"
    NO_ROUTE = "NoRoute"
    DROP_TAIL = "DropTail"
    TTL_EXPIRED = "TtlExpired"
    LINK_BREAK = "LinkBreak"


@dataclass(frozen=True, slots=True)
class Broadcast:
    message: Message


@dataclass(frozen=True, slots=True)
class Unicast:
    message: Message
    next_hop: int


@dataclass(frozen=True, slots=True)
class Deliver:
    message: Message


@dataclass(frozen=True, slots=True)
class Drop:
    message: Message
    reason: DropReason


@dataclass(frozen=True, slots=True)
class SetTimer:
    time: float
    tag: Optional[str] = None


RouterAction = Union[Broadcast, Unicast, Deliver, Drop, SetTimer]


__all__ = [
    "DropReason",
    "Broadcast",
    "Unicast",
    "Deliver",
    "Drop",
    "SetTimer",
    "RouterAction",
]
