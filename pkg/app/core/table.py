"""Routing table entries and the route update policy."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Iterator, List, NamedTuple, Optional

from .seqnum import Ordering, seqnum_compare

logger = logging.getLogger(__name__)


class RouteState(str, Enum):
    VALID = "Valid"
    BROKEN = "Broken"


class UpdateDecision(str, Enum):
    INSTALL = "Install"
    DISCARD = "Discard"


@dataclass(slots=True)
class RouteEntry:
    dest: int
    next_hop: int
    seqnum: int
    hop_count: int
    state: RouteState = RouteState.VALID
    expiry_time: float = float("inf")

    def usable(self, now: float) -> bool:
        return self.state is RouteState.VALID and self.expiry_time > now


class RouteCandidate(NamedTuple):
    dest: int
    next_hop: int
    seqnum: int
    hop_count: int


UpdatePolicy = Callable[[Optional[RouteEntry], RouteCandidate], UpdateDecision]


def route_update_decision(
    existing: Optional[RouteEntry], candidate: RouteCandidate
) -> UpdateDecision:
    """Install only on an empty slot or a strictly superior sequence number.

    A same sequence number is discarded even with fewer hops: it may be an
    echo of information that already went through this node.
    """

    if existing is None:
        return UpdateDecision.INSTALL
    if seqnum_compare(candidate.seqnum, existing.seqnum) is Ordering.SUPERIOR:
        return UpdateDecision.INSTALL
    return UpdateDecision.DISCARD


def aodv_update_decision(
    existing: Optional[RouteEntry], candidate: RouteCandidate
) -> UpdateDecision:
    """Like :func:`route_update_decision`, plus same seqnum with fewer hops."""

    if existing is None:
        return UpdateDecision.INSTALL
    order = seqnum_compare(candidate.seqnum, existing.seqnum)
    if order is Ordering.SUPERIOR:
        return UpdateDecision.INSTALL
    if order is Ordering.SAME and candidate.hop_count < existing.hop_count:
        return UpdateDecision.INSTALL
    return UpdateDecision.DISCARD


class RoutingTable:
    """At most one :class:`RouteEntry` per destination, owned by one node."""

    def __init__(self, owner: int, policy: UpdatePolicy = route_update_decision) -> None:
        self.owner = owner
        self.policy = policy
        self._entries: Dict[int, RouteEntry] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[RouteEntry]:
        return iter(list(self._entries.values()))

    def __contains__(self, dest: object) -> bool:
        return dest in self._entries

    def get(self, dest: int) -> Optional[RouteEntry]:
        return self._entries.get(dest)

    def lookup(self, dest: int, now: float) -> Optional[RouteEntry]:
        """Return the entry for *dest* only if it may be used for forwarding."""

        entry = self._entries.get(dest)
        if entry is None or not entry.usable(now):
            return None
        return entry

    def offer(self, candidate: RouteCandidate, now: float, lifetime: float) -> bool:
        """Apply the update policy; return ``True`` when the route was installed.

        An expired entry counts as absent.
        """

        if candidate.dest == self.owner:
            return False
        existing = self._entries.get(candidate.dest)
        if existing is not None and not existing.usable(now):
            del self._entries[candidate.dest]
            existing = None
        if self.policy(existing, candidate) is UpdateDecision.DISCARD:
            return False
        self._entries[candidate.dest] = RouteEntry(
            dest=candidate.dest,
            next_hop=candidate.next_hop,
            seqnum=candidate.seqnum,
            hop_count=candidate.hop_count,
            expiry_time=now + lifetime,
        )
        return True

    def refresh(self, dest: int, now: float, lifetime: float) -> None:
        entry = self.lookup(dest, now)
        if entry is not None:
            entry.expiry_time = max(entry.expiry_time, now + lifetime)

    def delete(self, dest: int) -> Optional[RouteEntry]:
        return self._entries.pop(dest, None)

    def entries_via(self, next_hop: int, now: float) -> List[RouteEntry]:
        return [
            entry
            for entry in self._entries.values()
            if entry.next_hop == next_hop and entry.usable(now)
        ]

    def purge_expired(self, now: float) -> List[RouteEntry]:
        expired = [entry for entry in self._entries.values() if not entry.usable(now)]
        for entry in expired:
            del self._entries[entry.dest]
        if expired:
            logger.debug(
                "node %d purged %d expired routes at %.6f", self.owner, len(expired), now
            )
        return expired

    def destinations(self, now: float) -> set[int]:
        return {dest for dest, entry in self._entries.items() if entry.usable(now)}


__all__ = [
    "RouteState",
    "UpdateDecision",
    "RouteEntry",
    "RouteCandidate",
    "UpdatePolicy",
    "route_update_decision",
    "aodv_update_decision",
    "RoutingTable",
]
