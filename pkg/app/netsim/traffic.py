"""Constant-bit-rate sources."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

from ..core.messages import Message, MessageKind
from .scenario import Flow


@dataclass(frozen=True, slots=True)
class CbrSource:
    """Emits one packet every ``flow.interval`` seconds inside ``[start, stop)``.

    Emission *k* happens at exactly ``start + k * interval``; times are never
    accumulated so rounding cannot drift.
    """

    flow: Flow
    stop: float

    @classmethod
    def for_flow(cls, flow: Flow, duration: float) -> "CbrSource":
        stop = duration if flow.stop is None else min(flow.stop, duration)
        return cls(flow, stop)

    def time_of(self, k: int) -> float:
        return self.flow.start + k * self.flow.interval

    def emission(self, k: int) -> Optional[float]:
        """Time of emission *k*, or ``None`` once the window has closed."""

        t = self.time_of(k)
        return t if t < self.stop else None

    def times(self) -> Iterator[float]:
        k = 0
        while (t := self.emission(k)) is not None:
            yield t
            k += 1

    def count(self) -> int:
        if self.stop <= self.flow.start:
            return 0
        n = math.ceil((self.stop - self.flow.start) / self.flow.interval)
        # ceil can overshoot by one when the quotient lands a hair above an integer.
        while n > 0 and self.time_of(n - 1) >= self.stop:
            n -= 1
        while self.time_of(n) < self.stop:
            n += 1
        return n

    def packet(self, msg_id: int, ttl: int) -> Message:
        return Message(
            kind=MessageKind.DATA,
            orig=self.flow.src,
            target=self.flow.dst,
            ttl=ttl,
            payload_size=self.flow.packet_size,
            msg_id=msg_id,
        )


def cbr_emit(source: CbrSource, k: int, msg_id: int, ttl: int) -> tuple[Message, Optional[float]]:
    """Build packet *k* of *source* and return it with the time of packet ``k + 1``."""

    return source.packet(msg_id, ttl), source.emission(k + 1)


__all__ = ["CbrSource", "cbr_emit"]
