"""Routing and data message types shared by every protocol.

A single immutable :class:`Message` covers all six kinds. Kind-specific parts
live in optional fields:

* ``accumulated`` holds :class:`AddressBlock` elements. DYMO uses it for path
  accumulation, DSR for source routes and DSDV for advertised table rows
  (``hop_distance`` then carries the advertised metric).
* ``unreachable`` holds ``(dest, seqnum)`` pairs and is used by RERR only.
* ``payload_size`` is meaningful for Data only.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Tuple

from .errors import DuplicateAddress


class MessageKind(IntEnum):
    RREQ = 0x01
    RREP = 0x02
    RERR = 0x03
    HELLO = 0x04
    DATA = 0x05
    TABLE_UPDATE = 0x06

    @property
    def is_control(self) -> bool:
        return self is not MessageKind.DATA


CONTROL_KINDS = frozenset(kind for kind in MessageKind if kind.is_control)


@dataclass(frozen=True, slots=True)
class AddressBlock:
    """One accumulated address: a node, its sequence number and its distance."""

    addr: int
    seqnum: int = 0
    hop_distance: int = 0


UnreachableDest = Tuple[int, Optional[int]]


@dataclass(frozen=True, slots=True)
class Message:
    kind: MessageKind
    orig: int
    target: int
    orig_seqnum: int = 0
    target_seqnum: Optional[int] = None
    hop_count: int = 0
    ttl: int = 0
    accumulated: Tuple[AddressBlock, ...] = ()
    unreachable: Tuple[UnreachableDest, ...] = ()
    payload_size: int = 0
    # Simulator-local identity; never serialized and ignored by equality.
    msg_id: int = dataclasses.field(default=0, compare=False)

    @property
    def addresses(self) -> Tuple[int, ...]:
        return tuple(block.addr for block in self.accumulated)

    def replace(self, **changes: object) -> "Message":
        return dataclasses.replace(self, **changes)


def make_msg_id(originator: int, counter: int) -> int:
    """Globally unique id: originator in the high 32 bits, counter below."""

    return (originator << 32) | (counter & 0xFFFFFFFF)


def msg_originator(msg_id: int) -> int:
    return msg_id >> 32


def append_address(msg: Message, node: int, node_seqnum: int) -> Message:
    """Return *msg* with *node* appended to its accumulated path.

    Every earlier block moves one hop further away and ``hop_count`` grows by
    one. Raises :class:`DuplicateAddress` when *node* is already present, which
    means the message looped back.
    """

    if msg.kind not in (MessageKind.RREQ, MessageKind.RREP):
        raise ValueError(f"cannot accumulate addresses on {msg.kind.name}")
    if any(block.addr == node for block in msg.accumulated):
        raise DuplicateAddress(node)
    shifted = tuple(
        AddressBlock(block.addr, block.seqnum, block.hop_distance + 1)
        for block in msg.accumulated
    )
    return dataclasses.replace(
        msg,
        accumulated=shifted + (AddressBlock(node, node_seqnum, 0),),
        hop_count=msg.hop_count + 1,
    )


__all__ = [
    "MessageKind",
    "CONTROL_KINDS",
    "AddressBlock",
    "UnreachableDest",
    "Message",
    "make_msg_id",
    "msg_originator",
    "append_address",
]
