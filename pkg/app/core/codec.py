"""Fixed big-endian wire layout for :class:`~app.core.messages.Message`.

Header (23 bytes)::

    0      kind
    1-4    orig
    5-8    orig_seqnum
    9-12   target
    13-16  target_seqnum (0xFFFFFFFF = unknown)
    17     hop_count
    18     ttl
    19-20  element count n
    21-22  payload_size

followed by ``n`` elements of 9 bytes (addr 4, seqnum 4, hop_distance 1). RERR
messages carry their unreachable pairs as elements, every other kind its
accumulated blocks. ``msg_id`` is not part of the layout.
"""

from __future__ import annotations

import struct
from typing import Iterable, List, Optional, Tuple

from .errors import DecodeError, DecodeReason, EncodeError
from .messages import AddressBlock, Message, MessageKind

HEADER = struct.Struct(">BIIIIBBHH")
ELEMENT = struct.Struct(">IIB")
HEADER_SIZE = HEADER.size
ELEMENT_SIZE = ELEMENT.size
UNKNOWN_SEQNUM = 0xFFFFFFFF

_U32 = 0xFFFFFFFF
_U16 = 0xFFFF
_U8 = 0xFF


def _check_range(name: str, value: int, upper: int) -> None:
    if not 0 <= value <= upper:
        raise EncodeError(f"{name}={value} outside 0..{upper}")


def _elements(msg: Message) -> List[Tuple[int, int, int]]:
    if msg.kind is MessageKind.RERR:
        if msg.accumulated:
            raise EncodeError("RERR carries unreachable pairs, not accumulated blocks")
        for _, seqnum in msg.unreachable:
            if seqnum is not None:
                _check_range("unreachable seqnum", seqnum, _U32 - 1)
        return [
            (dest, UNKNOWN_SEQNUM if seqnum is None else seqnum, 0)
            for dest, seqnum in msg.unreachable
        ]
    if msg.unreachable:
        raise EncodeError(f"{msg.kind.name} cannot carry unreachable pairs")
    addrs = [block.addr for block in msg.accumulated]
    if len(set(addrs)) != len(addrs):
        raise EncodeError("accumulated addresses must be distinct")
    return [(block.addr, block.seqnum, block.hop_distance) for block in msg.accumulated]


def encoded_size(msg: Message) -> int:
    count = len(msg.unreachable) if msg.kind is MessageKind.RERR else len(msg.accumulated)
    return HEADER_SIZE + ELEMENT_SIZE * count


def encode_message(msg: Message) -> bytes:
    """Serialize *msg*; raises :class:`EncodeError` if a field does not fit."""

    elements = _elements(msg)
    _check_range("orig", msg.orig, _U32)
    _check_range("orig_seqnum", msg.orig_seqnum, _U32)
    _check_range("target", msg.target, _U32)
    if msg.target_seqnum is not None:
        _check_range("target_seqnum", msg.target_seqnum, _U32 - 1)
    _check_range("hop_count", msg.hop_count, _U8)
    _check_range("ttl", msg.ttl, _U8)
    _check_range("element count", len(elements), _U16)
    _check_range("payload_size", msg.payload_size, _U16)
    if msg.kind is not MessageKind.DATA and msg.payload_size:
        raise EncodeError(f"{msg.kind.name} cannot carry a payload")
    for addr, seqnum, distance in elements:
        _check_range("element addr", addr, _U32)
        _check_range("element seqnum", seqnum, _U32)
        _check_range("element hop_distance", distance, _U8)

    target_seqnum = UNKNOWN_SEQNUM if msg.target_seqnum is None else msg.target_seqnum
    parts = [
        HEADER.pack(
            int(msg.kind),
            msg.orig,
            msg.orig_seqnum,
            msg.target,
            target_seqnum,
            msg.hop_count,
            msg.ttl,
            len(elements),
            msg.payload_size,
        )
    ]
    parts.extend(ELEMENT.pack(*element) for element in elements)
    return b"".join(parts)


def _unpack_elements(data: bytes, count: int) -> Iterable[Tuple[int, int, int]]:
    for index in range(count):
        yield ELEMENT.unpack_from(data, HEADER_SIZE + index * ELEMENT_SIZE)


def decode_message(data: bytes) -> Message:
    """Parse *data*; raises :class:`DecodeError` naming the first bad offset."""

    if len(data) < HEADER_SIZE:
        raise DecodeError(DecodeReason.TRUNCATED, len(data))
    try:
        kind = MessageKind(data[0])
    except ValueError as exc:
        raise DecodeError(DecodeReason.BAD_KIND, 0) from exc

    (
        _,
        orig,
        orig_seqnum,
        target,
        target_seqnum,
        hop_count,
        ttl,
        count,
        payload_size,
    ) = HEADER.unpack_from(data, 0)
    expected = HEADER_SIZE + count * ELEMENT_SIZE
    if len(data) < expected:
        raise DecodeError(DecodeReason.TRUNCATED, len(data))
    if len(data) > expected:
        raise DecodeError(DecodeReason.BAD_LENGTH, expected)

    accumulated: Tuple[AddressBlock, ...] = ()
    unreachable: Tuple[Tuple[int, Optional[int]], ...] = ()
    elements = list(_unpack_elements(data, count))
    if kind is MessageKind.RERR:
        unreachable = tuple(
            (addr, None if seqnum == UNKNOWN_SEQNUM else seqnum)
            for addr, seqnum, _ in elements
        )
    else:
        accumulated = tuple(AddressBlock(*element) for element in elements)

    return Message(
        kind=kind,
        orig=orig,
        target=target,
        orig_seqnum=orig_seqnum,
        target_seqnum=None if target_seqnum == UNKNOWN_SEQNUM else target_seqnum,
        hop_count=hop_count,
        ttl=ttl,
        accumulated=accumulated,
        unreachable=unreachable,
        payload_size=payload_size,
    )


__all__ = [
    "HEADER_SIZE",
    "ELEMENT_SIZE",
    "UNKNOWN_SEQNUM",
    "encoded_size",
    "encode_message",
    "decode_message",
]
