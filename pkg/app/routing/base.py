"""The state-machine interface every routing protocol implements."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import fields
from typing import ClassVar, FrozenSet, List, Optional, Protocol

from ..core.errors import ConfigError
from ..core.messages import Message, make_msg_id
from .actions import RouterAction


class ConfigValidation:
    """Mixin for protocol config dataclasses: numeric fields must be positive.

    Names listed in ``_non_negative`` may also be zero; booleans are skipped.
    """

    __slots__ = ()

    _non_negative: ClassVar[FrozenSet[str]] = frozenset()

    def __post_init__(self) -> None:
        for item in fields(self):  # type: ignore[arg-type]
            value = getattr(self, item.name)
            if isinstance(value, bool):
                continue
            if item.name in self._non_negative:
                if value < 0:
                    raise ConfigError("must be >= 0", field=item.name)
            elif value <= 0:
                raise ConfigError("must be > 0", field=item.name)


class UniformSource(Protocol):
    """Per-node randomness handed to protocols that jitter their timers."""

    def random(self) -> float: ...


class Router(ABC):
    """Single-threaded, deterministic per-node routing state machine.

    The engine feeds inputs one at a time and executes the returned actions.
    No method performs I/O or reads the clock; ``now`` is always passed in.
    """

    protocol: ClassVar[str]

    def __init__(self, node_id: int) -> None:
        self.node_id = node_id
        self._msg_counter = 0

    def next_msg_id(self) -> int:
        self._msg_counter += 1
        return make_msg_id(self.node_id, self._msg_counter)

    def on_tick(self, now: float) -> List[RouterAction]:
        """Called once when the node powers on; periodic protocols arm timers here."""

        return []

    @abstractmethod
    def on_data(self, packet: Message, now: float) -> List[RouterAction]:
        """Handle a Data packet produced by the local traffic source."""

    @abstractmethod
    def process_message(self, msg: Message, sender: int, now: float) -> List[RouterAction]:
        """Handle a frame received from neighbour *sender*."""

    @abstractmethod
    def on_link_break(
        self, neighbor: int, now: float, failed: Optional[Message] = None
    ) -> List[RouterAction]:
        """Handle loss of the link to *neighbor*; *failed* is the undelivered frame."""

    @abstractmethod
    def on_timer(self, now: float, tag: Optional[str] = None) -> List[RouterAction]:
        """Handle a timer previously requested with ``SetTimer``."""

    @abstractmethod
    def known_destinations(self, now: float) -> set[int]:
        """Destinations this node could forward to at *now*."""


__all__ = ["ConfigValidation", "Router", "UniformSource"]
