"""Unit-disk radio with serialized per-sender transmission and drop-tail queues."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Deque, List, Optional, Union

import numpy as np

from ..core.codec import encoded_size
from ..core.errors import ConfigError
from ..core.messages import Message
from .mobility import MobilityModel


def tx_time(size_bytes: int, bitrate: float) -> float:
    return size_bytes * 8 / bitrate


def frame_size(msg: Message) -> int:
    """Bytes on the air: the encoded header and elements plus any payload."""

    return encoded_size(msg) + msg.payload_size


@dataclass(frozen=True, slots=True)
class Frame:
    message: Message
    next_hop: Optional[int] = None

    @property
    def is_broadcast(self) -> bool:
        return self.next_hop is None

    @property
    def size(self) -> int:
        return frame_size(self.message)


@dataclass(frozen=True, slots=True)
class Reception:
    receiver: int
    time: float


@dataclass(frozen=True, slots=True)
class LinkFailure:
    neighbor: int
    time: float


class RadioMedium:
    """Reception iff the distance at transmit start is at most ``radio_range``."""

    def __init__(self, mobility: MobilityModel, radio_range: float, bitrate: float) -> None:
        self.mobility = mobility
        self.radio_range = radio_range
        self.bitrate = bitrate

    def neighbors(self, node: int, t: float) -> List[int]:
        positions = self.mobility.positions_at(t)
        distances = np.hypot(*(positions - positions[node]).T)
        in_range = np.flatnonzero(distances <= self.radio_range)
        return [int(other) for other in in_range if other != node]

    def in_range(self, a: int, b: int, t: float) -> bool:
        positions = self.mobility.positions_at(t)
        dx, dy = positions[a] - positions[b]
        return bool(np.hypot(dx, dy) <= self.radio_range)

    def broadcast(self, node: int, size: int, now: float) -> List[Reception]:
        arrival = now + tx_time(size, self.bitrate)
        return [Reception(other, arrival) for other in self.neighbors(node, now)]

    def unicast(
        self, node: int, next_hop: int, size: int, now: float
    ) -> Union[Reception, LinkFailure]:
        if next_hop == node:
            raise ConfigError(f"node {node} cannot transmit to itself", field="next_hop")
        arrival = now + tx_time(size, self.bitrate)
        if self.in_range(node, next_hop, now):
            return Reception(next_hop, arrival)
        return LinkFailure(next_hop, arrival)


class TransmitQueue:
    """FIFO of frames waiting behind the one on the air; full means drop-tail."""

    def __init__(self, capacity: int) -> None:
        self.capacity = capacity
        self.busy = False
        self._frames: Deque[Frame] = deque()

    def __len__(self) -> int:
        return len(self._frames)

    def enqueue(self, frame: Frame) -> bool:
        if len(self._frames) >= self.capacity:
            return False
        self._frames.append(frame)
        return True

    def pop(self) -> Optional[Frame]:
        return self._frames.popleft() if self._frames else None


__all__ = [
    "Frame",
    "LinkFailure",
    "RadioMedium",
    "Reception",
    "TransmitQueue",
    "frame_size",
    "tx_time",
]
