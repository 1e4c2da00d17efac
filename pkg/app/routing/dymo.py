"""DYMO router: on-demand discovery with path accumulation and RERR maintenance."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Dict, FrozenSet, List, Optional

from ..core.errors import DuplicateAddress
from ..core.messages import (
    AddressBlock,
    Message,
    MessageKind,
    UnreachableDest,
    append_address,
)
from ..core.seqnum import Ordering, next_seqnum, seqnum_compare
from ..core.table import (
    RouteCandidate,
    RouteEntry,
    RouteState,
    RoutingTable,
    UpdatePolicy,
    route_update_decision,
)
from .actions import (
    Broadcast,
    Deliver,
    Drop,
    DropReason,
    RouterAction,
    Unicast,
)
from .reactive import DiscoveryConfig, ReactiveRouter

logger = logging.getLogger(__name__)

DEFAULT_ENERGY = 100.0


@dataclass(slots=True)
class DymoConfig(DiscoveryConfig):
    route_timeout: float = 5.0
    energy_threshold: float = 0.0
    intermediate_rrep: bool = True

    _non_negative: ClassVar[FrozenSet[str]] = frozenset({"energy_threshold"})


class EnergyDecision(str, Enum):
    FORWARD = "Forward"
    SUPPRESS = "Suppress"


class DymoRouter(ReactiveRouter):
    protocol = "dymo"
    update_policy: ClassVar[UpdatePolicy] = route_update_decision

    def __init__(
        self,
        node_id: int,
        config: Optional[DymoConfig] = None,
        *,
        energy: float = DEFAULT_ENERGY,
    ) -> None:
        cfg = config or DymoConfig()
        super().__init__(node_id, cfg)
        self.config: DymoConfig = cfg
        self.energy = energy
        self.table = RoutingTable(node_id, policy=type(self).update_policy)
        self._last_rerr: Dict[int, float] = {}

    # ------------------------------------------------------------------
    # Router interface
    # ------------------------------------------------------------------
    def process_message(self, msg: Message, sender: int, now: float) -> List[RouterAction]:
        kind = msg.kind
        if kind is MessageKind.RREQ:
            return self.process_rreq(msg, sender, now)
        if kind is MessageKind.RREP:
            return self.process_rrep(msg, sender, now)
        if kind is MessageKind.RERR:
            return self.process_rerr(msg, sender, now)
        if kind is MessageKind.DATA:
            return self._forward_data(msg, sender, now)
        return []

    def on_link_break(
        self, neighbor: int, now: float, failed: Optional[Message] = None
    ) -> List[RouterAction]:
        actions: List[RouterAction] = []
        affected = sorted(self.table.entries_via(neighbor, now), key=lambda e: e.dest)
        if affected:
            for entry in affected:
                entry.state = RouteState.BROKEN
            unreachable = tuple((entry.dest, entry.seqnum) for entry in affected)
            for entry in affected:
                self.table.delete(entry.dest)
                self._last_rerr[entry.dest] = now
            logger.debug(
                "node %d lost link to %d, %d routes unreachable",
                self.node_id,
                neighbor,
                len(unreachable),
            )
            actions.append(Broadcast(self._build_rerr(unreachable, target=neighbor)))
        actions.extend(self._handle_failed(failed, now))
        return actions

    def on_timer(self, now: float, tag: Optional[str] = None) -> List[RouterAction]:
        self._purge_seen(now)
        self.table.purge_expired(now)
        actions = self._retry_discoveries(now)
        actions.extend(self._flush_pending(now))
        return actions

    def known_destinations(self, now: float) -> set[int]:
        return self.table.destinations(now)

    # ------------------------------------------------------------------
    # Discovery
    # ------------------------------------------------------------------
    def energy_gate(self, rreq: Message) -> EnergyDecision:
        if self.energy < self.config.energy_threshold:
            return EnergyDecision.SUPPRESS
        return EnergyDecision.FORWARD

    def process_rreq(self, rreq: Message, sender: int, now: float) -> List[RouterAction]:
        self._purge_seen(now)
        key = (rreq.orig, rreq.orig_seqnum)
        if key in self.seen_rreqs:
            return []
        self.seen_rreqs[key] = now
        if self.node_id in rreq.addresses:
            return []

        self._learn(rreq, sender, now)
        actions: List[RouterAction] = []
        if rreq.target == self.node_id:
            actions.extend(self._reply_as_target(rreq, now))
        else:
            cached = self._cached_route_for(rreq, sender, now)
            if cached is not None:
                actions.extend(self._reply_as_intermediate(rreq, cached, now))
            elif rreq.ttl > 1 and self.energy_gate(rreq) is EnergyDecision.FORWARD:
                relayed = self._relay(rreq)
                if relayed is not None:
                    actions.append(Broadcast(relayed))
        actions.extend(self._flush_pending(now))
        return actions

    def process_rrep(self, rrep: Message, sender: int, now: float) -> List[RouterAction]:
        if rrep.orig == self.node_id or self.node_id in rrep.addresses:
            return []
        self._learn(rrep, sender, now)
        actions: List[RouterAction] = []
        if rrep.target != self.node_id:
            backward = self.table.lookup(rrep.target, now)
            if backward is None:
                logger.debug(
                    "node %d has no backward route to %d; RREP dropped",
                    self.node_id,
                    rrep.target,
                )
            elif rrep.ttl > 1:
                if self.energy_gate(rrep) is EnergyDecision.FORWARD:
                    relayed = self._relay(rrep)
                else:
                    relayed = self._pass_through(rrep)
                if relayed is not None:
                    self.table.refresh(rrep.target, now, self.config.route_timeout)
                    actions.append(Unicast(relayed, backward.next_hop))
        actions.extend(self._flush_pending(now))
        return actions

    # ------------------------------------------------------------------
    # Maintenance
    # ------------------------------------------------------------------
    def process_rerr(self, rerr: Message, sender: int, now: float) -> List[RouterAction]:
        if rerr.orig == self.node_id:
            return []
        forwarded: List[UnreachableDest] = []
        for dest, seqnum in rerr.unreachable:
            entry = self.table.lookup(dest, now)
            if entry is None or entry.next_hop != sender:
                continue
            if seqnum is not None and (
                seqnum_compare(entry.seqnum, seqnum) is Ordering.SUPERIOR
            ):
                continue
            self.table.delete(dest)
            forwarded.append((dest, seqnum))
        if not forwarded or rerr.ttl <= 1:
            return []
        return [
            Broadcast(
                rerr.replace(
                    unreachable=tuple(forwarded),
                    ttl=rerr.ttl - 1,
                    hop_count=min(rerr.hop_count + 1, 255),
                )
            )
        ]

    # ------------------------------------------------------------------
    # Hooks used by the reactive base
    # ------------------------------------------------------------------
    def _has_route(self, dest: int, now: float) -> bool:
        return self.table.lookup(dest, now) is not None

    def _send_data(self, packet: Message, now: float) -> List[RouterAction]:
        entry = self.table.lookup(packet.target, now)
        assert entry is not None
        self.table.refresh(packet.target, now, self.config.route_timeout)
        return [Unicast(packet, entry.next_hop)]

    def _build_rreq(self, dest: int) -> Message:
        return Message(
            kind=MessageKind.RREQ,
            orig=self.node_id,
            orig_seqnum=self.own_seqnum,
            target=dest,
            target_seqnum=None,
            hop_count=0,
            ttl=self.config.rreq_ttl,
            msg_id=self.next_msg_id(),
        )

    # ------------------------------------------------------------------
    # Internal helpers
    # ------------------------------------------------------------------
    def _offer(self, dest: int, sender: int, seqnum: int, hops: int, now: float) -> bool:
        return self.table.offer(
            RouteCandidate(dest, sender, seqnum, min(hops, 255)),
            now,
            self.config.route_timeout,
        )

    def _learn(self, msg: Message, sender: int, now: float) -> None:
        """Install routes to the originator and to every accumulated node."""

        self._offer(msg.orig, sender, msg.orig_seqnum, msg.hop_count + 1, now)
        for block in msg.accumulated:
            self._offer(block.addr, sender, block.seqnum, block.hop_distance + 1, now)

    def _relay(self, msg: Message) -> Optional[Message]:
        try:
            appended = append_address(msg, self.node_id, self.own_seqnum)
        except DuplicateAddress:
            return None
        return appended.replace(ttl=msg.ttl - 1)

    def _pass_through(self, msg: Message) -> Message:
        """Relay *msg* one hop further without adding this node to its path."""

        shifted = tuple(
            AddressBlock(block.addr, block.seqnum, block.hop_distance + 1)
            for block in msg.accumulated
        )
        return msg.replace(
            accumulated=shifted, ttl=msg.ttl - 1, hop_count=min(msg.hop_count + 1, 255)
        )

    def _cached_route_for(
        self, rreq: Message, sender: int, now: float
    ) -> Optional[RouteEntry]:
        if not self.config.intermediate_rrep:
            return None
        if self.energy_gate(rreq) is EnergyDecision.SUPPRESS:
            return None
        entry = self.table.lookup(rreq.target, now)
        if entry is None:
            return None
        on_path = {rreq.orig, sender, *rreq.addresses}
        if entry.next_hop in on_path:
            return None
        return entry

    def _reply_as_target(self, rreq: Message, now: float) -> List[RouterAction]:
        backward = self.table.lookup(rreq.orig, now)
        if backward is None:
            return []
        self.own_seqnum = next_seqnum(self.own_seqnum)
        rrep = Message(
            kind=MessageKind.RREP,
            orig=self.node_id,
            orig_seqnum=self.own_seqnum,
            target=rreq.orig,
            target_seqnum=rreq.orig_seqnum,
            hop_count=0,
            ttl=self.config.rreq_ttl,
            msg_id=self.next_msg_id(),
        )
        return [Unicast(rrep, backward.next_hop)]

    def _reply_as_intermediate(
        self, rreq: Message, cached: RouteEntry, now: float
    ) -> List[RouterAction]:
        backward = self.table.lookup(rreq.orig, now)
        if backward is None:
            return []
        rrep = Message(
            kind=MessageKind.RREP,
            orig=rreq.target,
            orig_seqnum=cached.seqnum,
            target=rreq.orig,
            target_seqnum=rreq.orig_seqnum,
            hop_count=cached.hop_count,
            ttl=self.config.rreq_ttl,
            msg_id=self.next_msg_id(),
        )
        self.table.refresh(rreq.target, now, self.config.route_timeout)
        return [Unicast(rrep, backward.next_hop)]

    def _build_rerr(self, unreachable: tuple[UnreachableDest, ...], *, target: int) -> Message:
        return Message(
            kind=MessageKind.RERR,
            orig=self.node_id,
            orig_seqnum=self.own_seqnum,
            target=target,
            hop_count=0,
            ttl=self.config.rreq_ttl,
            unreachable=unreachable,
            msg_id=self.next_msg_id(),
        )

    def _forward_data(self, packet: Message, sender: int, now: float) -> List[RouterAction]:
        if packet.target == self.node_id:
            return [Deliver(packet)]
        entry = self.table.lookup(packet.target, now)
        if entry is None:
            actions: List[RouterAction] = [Drop(packet, DropReason.NO_ROUTE)]
            last = self._last_rerr.get(packet.target)
            if last is None or now - last >= self.config.rreq_wait:
                self._last_rerr[packet.target] = now
                actions.append(
                    Broadcast(self._build_rerr(((packet.target, None),), target=packet.target))
                )
            return actions
        if packet.ttl <= 1:
            return [Drop(packet, DropReason.TTL_EXPIRED)]
        lifetime = self.config.route_timeout
        self.table.refresh(packet.target, now, lifetime)
        self.table.refresh(entry.next_hop, now, lifetime)
        self.table.refresh(packet.orig, now, lifetime)
        forwarded = packet.replace(ttl=packet.ttl - 1, hop_count=min(packet.hop_count + 1, 255))
        return [Unicast(forwarded, entry.next_hop)]


__all__ = ["DymoConfig", "DymoRouter", "EnergyDecision", "DEFAULT_ENERGY"]
