"""Shared machinery for on-demand protocols: packet buffering and RREQ retries."""

from __future__ import annotations

import logging
from abc import abstractmethod
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, List, Tuple

from ..core.errors import ConfigError
from ..core.messages import Message, MessageKind
from ..core.seqnum import next_seqnum
from .actions import Broadcast, Drop, DropReason, RouterAction, SetTimer
from .base import ConfigValidation, Router

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class DiscoveryConfig(ConfigValidation):
    """Timers and limits shared by every route-discovery protocol."""

    rreq_wait: float = 1.0
    rreq_max_retries: int = 3
    rreq_ttl: int = 32
    buffer_capacity: int = 16
    rreq_seen_lifetime: float = 5.0

    def __post_init__(self) -> None:
        ConfigValidation.__post_init__(self)
        if self.rreq_ttl > 255:
            raise ConfigError("must fit in 8 bits", field="rreq_ttl")


@dataclass(slots=True)
class PendingDiscovery:
    packets: Deque[Message] = field(default_factory=deque)
    retry_count: int = 0
    next_retry_time: float = float("-inf")


class ReactiveRouter(Router):
    """Buffers packets while a discovery is outstanding and retries RREQs."""

    def __init__(self, node_id: int, config: DiscoveryConfig) -> None:
        super().__init__(node_id)
        self.config = config
        self.own_seqnum = 0
        self.pending: Dict[int, PendingDiscovery] = {}
        self.seen_rreqs: Dict[Tuple[int, int], float] = {}
        self.rreq_originations = 0

    # ------------------------------------------------------------------
    # Protocol hooks
    # ------------------------------------------------------------------
    @abstractmethod
    def _has_route(self, dest: int, now: float) -> bool: ...

    @abstractmethod
    def _send_data(self, packet: Message, now: float) -> List[RouterAction]: ...

    @abstractmethod
    def _build_rreq(self, dest: int) -> Message: ...

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------
    def on_data(self, packet: Message, now: float) -> List[RouterAction]:
        if self._has_route(packet.target, now):
            return self._send_data(packet, now)
        return self._buffer(packet, now)

    def originate_rreq(self, dest: int, now: float) -> List[RouterAction]:
        """Start a discovery for *dest* unless one is already outstanding.

        Later attempts for an outstanding discovery only come from the retry timer.
        """

        if dest in self.pending:
            return []
        pending = self.pending[dest] = PendingDiscovery()
        return self._send_rreq(dest, pending, now)

    # ------------------------------------------------------------------
    # Internal helpers
    # ------------------------------------------------------------------
    def _buffer(self, packet: Message, now: float) -> List[RouterAction]:
        actions = self.originate_rreq(packet.target, now)
        pending = self.pending[packet.target]
        if len(pending.packets) >= self.config.buffer_capacity:
            actions.append(Drop(pending.packets.popleft(), DropReason.BUFFER_FULL))
        pending.packets.append(packet)
        return actions

    def _send_rreq(
        self, dest: int, pending: PendingDiscovery, now: float
    ) -> List[RouterAction]:
        self.own_seqnum = next_seqnum(self.own_seqnum)
        self.rreq_originations += 1
        self.seen_rreqs[(self.node_id, self.own_seqnum)] = now
        pending.next_retry_time = now + self.config.rreq_wait
        logger.debug(
            "node %d discovers %d (seqnum %d, attempt %d)",
            self.node_id,
            dest,
            self.own_seqnum,
            pending.retry_count + 1,
        )
        return [
            Broadcast(self._build_rreq(dest)),
            SetTimer(pending.next_retry_time, f"rreq:{dest}"),
        ]

    def _retry_discoveries(self, now: float) -> List[RouterAction]:
        actions: List[RouterAction] = []
        for dest, pending in list(self.pending.items()):
            if pending.next_retry_time > now:
                continue
            if pending.retry_count < self.config.rreq_max_retries:
                pending.retry_count += 1
                actions.extend(self._send_rreq(dest, pending, now))
                continue
            del self.pending[dest]
            logger.debug("node %d gives up on %d", self.node_id, dest)
            actions.extend(Drop(packet, DropReason.NO_ROUTE) for packet in pending.packets)
        return actions

    def _flush_pending(self, now: float) -> List[RouterAction]:
        actions: List[RouterAction] = []
        ready = [dest for dest in self.pending if self._has_route(dest, now)]
        for dest in ready:
            pending = self.pending.pop(dest)
            for packet in pending.packets:
                actions.extend(self._send_data(packet, now))
        return actions

    def _purge_seen(self, now: float) -> None:
        # Insertion order is time order, so stale keys sit at the front.
        cutoff = now - self.config.rreq_seen_lifetime
        while self.seen_rreqs:
            key = next(iter(self.seen_rreqs))
            if self.seen_rreqs[key] > cutoff:
                break
            del self.seen_rreqs[key]

    def _handle_failed(self, failed: Message | None, now: float) -> List[RouterAction]:
        """Re-buffer the node's own Data packets; forwarders drop theirs."""

        if failed is None or failed.kind is not MessageKind.DATA:
            return []
        if failed.orig == self.node_id:
            return self.on_data(failed, now)
        return [Drop(failed, DropReason.LINK_BREAK)]


__all__ = ["DiscoveryConfig", "PendingDiscovery", "ReactiveRouter"]
