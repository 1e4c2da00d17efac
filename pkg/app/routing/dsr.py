"""DSR baseline: source routing over a route cache that never ages out."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.errors import DuplicateAddress
from ..core.messages import AddressBlock, Message, MessageKind, append_address
from .actions import Broadcast, Deliver, Drop, DropReason, RouterAction, Unicast
from .reactive import DiscoveryConfig, ReactiveRouter

logger = logging.getLogger(__name__)

SourceRoute = Tuple[int, ...]


@dataclass(slots=True)
class DsrConfig(DiscoveryConfig):
    cached_replies: bool = True


class DsrRouteCache:
    """Full source routes per destination, each starting at the owner.

    Routes are only ever removed by :meth:`remove_link`; there is no expiry.
    """

    def __init__(self, owner: int) -> None:
        self.owner = owner
        self._routes: Dict[int, List[SourceRoute]] = {}

    def __contains__(self, dest: object) -> bool:
        return dest in self._routes

    def add(self, path: Sequence[int]) -> int:
        """Cache *path* and every prefix of it; return how many routes were new."""

        route = tuple(path)
        if len(route) < 2 or route[0] != self.owner or len(set(route)) != len(route):
            return 0
        added = 0
        for end in range(2, len(route) + 1):
            prefix = route[:end]
            known = self._routes.setdefault(prefix[-1], [])
            if prefix not in known:
                known.append(prefix)
                added += 1
        return added

    def add_path_segments(self, path: Sequence[int]) -> int:
        """Cache both directions of a path the owner sits on."""

        route = tuple(path)
        if self.owner not in route:
            return 0
        idx = route.index(self.owner)
        return self.add(route[idx:]) + self.add(route[idx::-1])

    def best(self, dest: int) -> Optional[SourceRoute]:
        routes = self._routes.get(dest)
        if not routes:
            return None
        return min(routes, key=len)

    def routes(self, dest: int) -> List[SourceRoute]:
        return list(self._routes.get(dest, ()))

    def remove_link(self, a: int, b: int) -> int:
        removed = 0
        for dest in list(self._routes):
            kept = [route for route in self._routes[dest] if not _uses_link(route, a, b)]
            removed += len(self._routes[dest]) - len(kept)
            if kept:
                self._routes[dest] = kept
            else:
                del self._routes[dest]
        return removed

    def size(self) -> int:
        return sum(len(routes) for routes in self._routes.values())

    def destinations(self) -> set[int]:
        return set(self._routes)


def _uses_link(route: SourceRoute, a: int, b: int) -> bool:
    return any({x, y} == {a, b} for x, y in zip(route, route[1:]))


def _blocks(addrs: Sequence[int]) -> Tuple[AddressBlock, ...]:
    return tuple(AddressBlock(addr) for addr in addrs)


class DsrRouter(ReactiveRouter):
    protocol = "dsr"

    def __init__(self, node_id: int, config: Optional[DsrConfig] = None) -> None:
        cfg = config or DsrConfig()
        super().__init__(node_id, cfg)
        self.config: DsrConfig = cfg
        self.cache = DsrRouteCache(node_id)

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
            return self._forward_data(msg, now)
        return []

    def on_link_break(
        self, neighbor: int, now: float, failed: Optional[Message] = None
    ) -> List[RouterAction]:
        removed = self.cache.remove_link(self.node_id, neighbor)
        logger.debug(
            "node %d dropped %d cached routes over link to %d", self.node_id, removed, neighbor
        )
        if failed is None or failed.kind is not MessageKind.DATA:
            return []
        if failed.orig == self.node_id:
            return self.on_data(failed, now)
        actions: List[RouterAction] = [Drop(failed, DropReason.LINK_BREAK)]
        rerr = Message(
            kind=MessageKind.RERR,
            orig=self.node_id,
            orig_seqnum=self.own_seqnum,
            target=failed.orig,
            ttl=self.config.rreq_ttl,
            unreachable=((neighbor, None),),
            msg_id=self.next_msg_id(),
        )
        actions.extend(self._toward(rerr, failed.orig))
        return actions

    def on_timer(self, now: float, tag: Optional[str] = None) -> List[RouterAction]:
        self._purge_seen(now)
        actions = self._retry_discoveries(now)
        actions.extend(self._flush_pending(now))
        return actions

    def known_destinations(self, now: float) -> set[int]:
        return self.cache.destinations()

    # ------------------------------------------------------------------
    # Discovery
    # ------------------------------------------------------------------
    def process_rreq(self, rreq: Message, sender: int, now: float) -> List[RouterAction]:
        path = (rreq.orig, *rreq.addresses)
        if self.node_id in path:
            return []
        self.cache.add_path_segments(path + (self.node_id,))
        if rreq.target == self.node_id:
            # Every copy is answered so the source learns alternative routes.
            return self._reply(rreq.orig, rreq.addresses, rreq, sender)

        key = (rreq.orig, rreq.orig_seqnum)
        self._purge_seen(now)
        if key in self.seen_rreqs:
            return []
        self.seen_rreqs[key] = now

        if self.config.cached_replies:
            cached = self.cache.best(rreq.target)
            if cached is not None:
                full = path + cached
                if len(set(full)) == len(full):
                    return self._reply(rreq.orig, full[1:-1], rreq, sender, replier=rreq.target)
        if rreq.ttl <= 1:
            return []
        try:
            relayed = append_address(rreq, self.node_id, self.own_seqnum)
        except DuplicateAddress:
            return []
        return [Broadcast(relayed.replace(ttl=rreq.ttl - 1))]

    def process_rrep(self, rrep: Message, sender: int, now: float) -> List[RouterAction]:
        full = (rrep.target, *rrep.addresses, rrep.orig)
        if self.node_id not in full or len(set(full)) != len(full):
            return []
        self.cache.add_path_segments(full)
        idx = full.index(self.node_id)
        if idx == 0:
            return self._flush_pending(now)
        if idx == len(full) - 1 or rrep.ttl <= 1:
            return []
        return [Unicast(rrep.replace(ttl=rrep.ttl - 1), full[idx - 1])]

    # ------------------------------------------------------------------
    # Maintenance
    # ------------------------------------------------------------------
    def process_rerr(self, rerr: Message, sender: int, now: float) -> List[RouterAction]:
        for dest, _ in rerr.unreachable:
            self.cache.remove_link(rerr.orig, dest)
        if rerr.target == self.node_id or rerr.ttl <= 1:
            return []
        return self._toward(rerr.replace(ttl=rerr.ttl - 1), rerr.target)

    # ------------------------------------------------------------------
    # Hooks used by the reactive base
    # ------------------------------------------------------------------
    def _has_route(self, dest: int, now: float) -> bool:
        return self.cache.best(dest) is not None

    def _send_data(self, packet: Message, now: float) -> List[RouterAction]:
        route = self.cache.best(packet.target)
        assert route is not None
        routed = packet.replace(accumulated=_blocks(route))
        return [Unicast(routed, route[1])]

    def _build_rreq(self, dest: int) -> Message:
        return Message(
            kind=MessageKind.RREQ,
            orig=self.node_id,
            orig_seqnum=self.own_seqnum,
            target=dest,
            ttl=self.config.rreq_ttl,
            msg_id=self.next_msg_id(),
        )

    # ------------------------------------------------------------------
    # Internal helpers
    # ------------------------------------------------------------------
    def _reply(
        self,
        source: int,
        intermediates: Sequence[int],
        rreq: Message,
        sender: int,
        *,
        replier: Optional[int] = None,
    ) -> List[RouterAction]:
        rrep = Message(
            kind=MessageKind.RREP,
            orig=replier if replier is not None else self.node_id,
            orig_seqnum=self.own_seqnum,
            target=source,
            target_seqnum=rreq.orig_seqnum,
            hop_count=len(intermediates),
            ttl=self.config.rreq_ttl,
            accumulated=_blocks(intermediates),
            msg_id=self.next_msg_id(),
        )
        return [Unicast(rrep, sender)]

    def _toward(self, msg: Message, dest: int) -> List[RouterAction]:
        route = self.cache.best(dest)
        if route is None:
            return []
        return [Unicast(msg, route[1])]

    def _forward_data(self, packet: Message, now: float) -> List[RouterAction]:
        route = packet.addresses
        self.cache.add_path_segments(route)
        if packet.target == self.node_id:
            return [Deliver(packet)]
        if self.node_id not in route or route.index(self.node_id) == len(route) - 1:
            return [Drop(packet, DropReason.NO_ROUTE)]
        if packet.ttl <= 1:
            return [Drop(packet, DropReason.TTL_EXPIRED)]
        next_hop = route[route.index(self.node_id) + 1]
        forwarded = packet.replace(ttl=packet.ttl - 1, hop_count=min(packet.hop_count + 1, 255))
        return [Unicast(forwarded, next_hop)]


__all__ = ["DsrConfig", "DsrRouteCache", "DsrRouter"]
