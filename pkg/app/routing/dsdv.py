"""DSDV baseline: proactive distance vector with destination-owned sequence numbers.

Even sequence numbers are issued by the destination itself, two per full dump.
An odd number is issued by a neighbour that lost the link and always travels
with an infinite metric.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Deque, Dict, List, Optional, Tuple

from ..core.messages import AddressBlock, Message, MessageKind
from ..core.seqnum import Ordering, next_seqnum, seqnum_compare
from .actions import Broadcast, Deliver, Drop, DropReason, RouterAction, SetTimer, Unicast
from .base import ConfigValidation, Router, UniformSource

logger = logging.getLogger(__name__)

INFINITE_METRIC = 255
DUMP_TAG = "dump"
BUFFER_TAG = "buffer"


@dataclass(slots=True)
class DsdvConfig(ConfigValidation):
    periodic_update: float = 15.0
    buffer_capacity: int = 16
    buffer_timeout: float = 15.0
    broken_hold: float = 15.0


@dataclass(slots=True)
class DsdvEntry:
    dest: int
    next_hop: int
    seqnum: int
    metric: int
    changed: bool = True
    broken_since: Optional[float] = None

    @property
    def valid(self) -> bool:
        return self.broken_since is None and self.metric < INFINITE_METRIC

    def as_block(self) -> AddressBlock:
        return AddressBlock(self.dest, self.seqnum, self.metric)


class DsdvRouter(Router):
    protocol = "dsdv"

    def __init__(
        self,
        node_id: int,
        config: Optional[DsdvConfig] = None,
        *,
        rng: Optional[UniformSource] = None,
    ) -> None:
        super().__init__(node_id)
        self.config = config or DsdvConfig()
        self.own_seqnum = 0
        self.routes: Dict[int, DsdvEntry] = {}
        self.buffers: Dict[int, Deque[Tuple[Message, float]]] = {}
        self.dumps_sent = 0
        self._rng = rng
        self._buffer_timer: Optional[float] = None

    # ------------------------------------------------------------------
    # Router interface
    # ------------------------------------------------------------------
    def on_tick(self, now: float) -> List[RouterAction]:
        phase = self._rng.random() if self._rng is not None else 0.0
        return [SetTimer(now + phase * self.config.periodic_update, DUMP_TAG)]

    def on_data(self, packet: Message, now: float) -> List[RouterAction]:
        return self._route_or_buffer(packet, now)

    def process_message(self, msg: Message, sender: int, now: float) -> List[RouterAction]:
        if msg.kind is MessageKind.TABLE_UPDATE:
            return self.process_update(msg, sender, now)
        if msg.kind is MessageKind.DATA:
            if msg.target == self.node_id:
                return [Deliver(msg)]
            if msg.ttl <= 1:
                return [Drop(msg, DropReason.TTL_EXPIRED)]
            forwarded = msg.replace(ttl=msg.ttl - 1, hop_count=min(msg.hop_count + 1, 255))
            return self._route_or_buffer(forwarded, now)
        return []

    def on_link_break(
        self, neighbor: int, now: float, failed: Optional[Message] = None
    ) -> List[RouterAction]:
        for entry in self.routes.values():
            if entry.next_hop == neighbor and entry.broken_since is None:
                self._mark_broken(entry, next_seqnum(entry.seqnum) | 1, now)
        actions = self._triggered_update()
        if failed is not None and failed.kind is MessageKind.DATA:
            if failed.orig == self.node_id:
                actions.extend(self._route_or_buffer(failed, now))
            else:
                actions.append(Drop(failed, DropReason.LINK_BREAK))
        return actions

    def on_timer(self, now: float, tag: Optional[str] = None) -> List[RouterAction]:
        actions: List[RouterAction] = []
        if tag == DUMP_TAG:
            self._purge_broken(now)
            actions.append(Broadcast(self._full_dump()))
            actions.append(SetTimer(now + self.config.periodic_update, DUMP_TAG))
        elif tag == BUFFER_TAG:
            self._buffer_timer = None
        actions.extend(self._expire_buffers(now))
        actions.extend(self._flush_buffers(now))
        return actions

    def known_destinations(self, now: float) -> set[int]:
        return {dest for dest, entry in self.routes.items() if entry.valid}

    # ------------------------------------------------------------------
    # Table updates
    # ------------------------------------------------------------------
    def process_update(self, update: Message, sender: int, now: float) -> List[RouterAction]:
        for row in update.accumulated:
            if row.addr == self.node_id:
                continue
            entry = self.routes.get(row.addr)
            if row.seqnum % 2 == 1 or row.hop_distance >= INFINITE_METRIC:
                if (
                    entry is not None
                    and entry.next_hop == sender
                    and entry.broken_since is None
                    and seqnum_compare(row.seqnum, entry.seqnum) is Ordering.SUPERIOR
                ):
                    self._mark_broken(entry, row.seqnum, now)
                continue
            metric = min(row.hop_distance + 1, INFINITE_METRIC)
            if entry is None or self._better(row.seqnum, metric, entry):
                self.routes[row.addr] = DsdvEntry(row.addr, sender, row.seqnum, metric)
        actions = self._triggered_update()
        actions.extend(self._flush_buffers(now))
        return actions

    # ------------------------------------------------------------------
    # Internal helpers
    # ------------------------------------------------------------------
    @staticmethod
    def _better(seqnum: int, metric: int, entry: DsdvEntry) -> bool:
        order = seqnum_compare(seqnum, entry.seqnum)
        if order is Ordering.SUPERIOR:
            return True
        return order is Ordering.SAME and metric < entry.metric

    def _mark_broken(self, entry: DsdvEntry, seqnum: int, now: float) -> None:
        logger.debug("node %d marks route to %d broken", self.node_id, entry.dest)
        entry.seqnum = seqnum
        entry.metric = INFINITE_METRIC
        entry.broken_since = now
        entry.changed = True

    def _purge_broken(self, now: float) -> None:
        hold = self.config.broken_hold
        stale = [
            dest
            for dest, entry in self.routes.items()
            if entry.broken_since is not None and now - entry.broken_since >= hold
        ]
        for dest in stale:
            del self.routes[dest]

    def _table_update(self, rows: List[AddressBlock]) -> Message:
        return Message(
            kind=MessageKind.TABLE_UPDATE,
            orig=self.node_id,
            orig_seqnum=self.own_seqnum,
            target=self.node_id,
            ttl=1,
            accumulated=tuple(rows),
            msg_id=self.next_msg_id(),
        )

    def _full_dump(self) -> Message:
        self.own_seqnum = next_seqnum(self.own_seqnum, 2)
        self.dumps_sent += 1
        rows = [AddressBlock(self.node_id, self.own_seqnum, 0)]
        for dest in sorted(self.routes):
            entry = self.routes[dest]
            entry.changed = False
            rows.append(entry.as_block())
        return self._table_update(rows)

    def _triggered_update(self) -> List[RouterAction]:
        changed = [self.routes[dest] for dest in sorted(self.routes) if self.routes[dest].changed]
        if not changed:
            return []
        for entry in changed:
            entry.changed = False
        return [Broadcast(self._table_update([entry.as_block() for entry in changed]))]

    def _route_or_buffer(self, packet: Message, now: float) -> List[RouterAction]:
        entry = self.routes.get(packet.target)
        if entry is not None and entry.valid:
            return [Unicast(packet, entry.next_hop)]
        actions: List[RouterAction] = []
        queue = self.buffers.setdefault(packet.target, deque())
        if len(queue) >= self.config.buffer_capacity:
            dropped, _ = queue.popleft()
            actions.append(Drop(dropped, DropReason.BUFFER_FULL))
        queue.append((packet, now))
        actions.extend(self._arm_buffer_timer(now + self.config.buffer_timeout))
        return actions

    def _arm_buffer_timer(self, when: float) -> List[RouterAction]:
        if self._buffer_timer is not None and self._buffer_timer <= when:
            return []
        self._buffer_timer = when
        return [SetTimer(when, BUFFER_TAG)]

    def _expire_buffers(self, now: float) -> List[RouterAction]:
        actions: List[RouterAction] = []
        oldest: Optional[float] = None
        for dest in sorted(self.buffers):
            queue = self.buffers[dest]
            while queue and now - queue[0][1] >= self.config.buffer_timeout:
                packet, _ = queue.popleft()
                actions.append(Drop(packet, DropReason.NO_ROUTE))
            if queue:
                oldest = queue[0][1] if oldest is None else min(oldest, queue[0][1])
            else:
                del self.buffers[dest]
        if oldest is not None:
            actions.extend(self._arm_buffer_timer(oldest + self.config.buffer_timeout))
        return actions

    def _flush_buffers(self, now: float) -> List[RouterAction]:
        actions: List[RouterAction] = []
        for dest in sorted(self.buffers):
            entry = self.routes.get(dest)
            if entry is None or not entry.valid:
                continue
            for packet, _ in self.buffers.pop(dest):
                actions.append(Unicast(packet, entry.next_hop))
        return actions


__all__ = ["DsdvConfig", "DsdvEntry", "DsdvRouter", "INFINITE_METRIC"]
