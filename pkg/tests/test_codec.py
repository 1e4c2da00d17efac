from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core.codec import (
    ELEMENT_SIZE,
    HEADER_SIZE,
    decode_message,
    encode_message,
    encoded_size,
)
from app.core.errors import DecodeError, DecodeReason, EncodeError
from app.core.messages import AddressBlock, Message, MessageKind

GOLDEN = [
    (
        Message(kind=MessageKind.DATA, orig=1, target=10, ttl=32, payload_size=512),
        "05 00000001 00000000 0000000a ffffffff 00 20 0000 0200",
    ),
    (
        Message(
            kind=MessageKind.RREQ,
            orig=1,
            orig_seqnum=42,
            target=10,
            hop_count=1,
            ttl=31,
            accumulated=(AddressBlock(2, 7, 0),),
        ),
        "01 00000001 0000002a 0000000a ffffffff 01 1f 0001 0000 00000002 00000007 00",
    ),
    (
        Message(
            kind=MessageKind.RREP,
            orig=10,
            orig_seqnum=5,
            target=1,
            target_seqnum=42,
            ttl=32,
        ),
        "02 0000000a 00000005 00000001 0000002a 00 20 0000 0000",
    ),
    (
        Message(
            kind=MessageKind.RERR,
            orig=2,
            target=6,
            ttl=32,
            unreachable=((6, 3), (10, None)),
        ),
        "03 00000002 00000000 00000006 ffffffff 00 20 0002 0000"
        " 00000006 00000003 00 0000000a ffffffff 00",
    ),
    (
        Message(kind=MessageKind.HELLO, orig=4, orig_seqnum=1, target=4, ttl=1),
        "04 00000004 00000001 00000004 ffffffff 00 01 0000 0000",
    ),
    (
        Message(
            kind=MessageKind.TABLE_UPDATE,
            orig=3,
            orig_seqnum=8,
            target=3,
            ttl=1,
            accumulated=(AddressBlock(3, 8, 0), AddressBlock(5, 4, 1)),
        ),
        "06 00000003 00000008 00000003 ffffffff 00 01 0002 0000"
        " 00000003 00000008 00 00000005 00000004 01",
    ),
]


@pytest.mark.parametrize(
    ("message", "hex_text"), GOLDEN, ids=[msg.kind.name for msg, _ in GOLDEN]
)
def test_golden_vectors(message: Message, hex_text: str) -> None:
    expected = bytes.fromhex(hex_text.replace(" ", ""))
    assert encode_message(message) == expected
    assert encoded_size(message) == len(expected)
    assert decode_message(expected) == message


def test_data_header_is_23_bytes() -> None:
    encoded = encode_message(GOLDEN[0][0])
    assert len(encoded) == HEADER_SIZE == 23
    assert encoded[0] == 0x05


def test_empty_input_is_truncated() -> None:
    with pytest.raises(DecodeError) as info:
        decode_message(b"")
    assert (info.value.reason, info.value.offset) == (DecodeReason.TRUNCATED, 0)


def test_unknown_kind_is_rejected_at_offset_zero() -> None:
    with pytest.raises(DecodeError) as info:
        decode_message(b"\x09" + bytes(HEADER_SIZE - 1))
    assert (info.value.reason, info.value.offset) == (DecodeReason.BAD_KIND, 0)


def test_missing_element_is_truncated() -> None:
    header = encode_message(GOLDEN[1][0])[:HEADER_SIZE]
    with pytest.raises(DecodeError) as info:
        decode_message(header)
    assert (info.value.reason, info.value.offset) == (DecodeReason.TRUNCATED, HEADER_SIZE)


def test_trailing_bytes_are_a_length_error() -> None:
    encoded = encode_message(GOLDEN[1][0]) + b"\x00"
    with pytest.raises(DecodeError) as info:
        decode_message(encoded)
    expected_end = HEADER_SIZE + ELEMENT_SIZE
    assert (info.value.reason, info.value.offset) == (DecodeReason.BAD_LENGTH, expected_end)


def test_out_of_range_fields_do_not_encode() -> None:
    with pytest.raises(EncodeError):
        encode_message(Message(kind=MessageKind.RREQ, orig=1, target=2, ttl=256))
    with pytest.raises(EncodeError):
        encode_message(Message(kind=MessageKind.RREQ, orig=1, target=2, payload_size=5))
    with pytest.raises(EncodeError):
        encode_message(
            Message(
                kind=MessageKind.RREQ,
                orig=1,
                target=2,
                accumulated=(AddressBlock(3), AddressBlock(3)),
            )
        )


u8 = st.integers(min_value=0, max_value=0xFF)
u16 = st.integers(min_value=0, max_value=0xFFFF)
u32 = st.integers(min_value=0, max_value=0xFFFFFFFF)
known_seqnum = st.integers(min_value=0, max_value=0xFFFFFFFE)


@st.composite
def messages(draw: st.DrawFn) -> Message:
    kind = draw(st.sampled_from(list(MessageKind)))
    accumulated: tuple[AddressBlock, ...] = ()
    unreachable: tuple[tuple[int, int | None], ...] = ()
    if kind is MessageKind.RERR:
        pairs = draw(st.lists(st.tuples(u32, st.none() | known_seqnum), max_size=8))
        unreachable = tuple(pairs)
    else:
        blocks = draw(st.lists(st.tuples(u32, u32, u8), max_size=8, unique_by=lambda b: b[0]))
        accumulated = tuple(AddressBlock(*block) for block in blocks)
    return Message(
        kind=kind,
        orig=draw(u32),
        orig_seqnum=draw(u32),
        target=draw(u32),
        target_seqnum=draw(st.none() | known_seqnum),
        hop_count=draw(u8),
        ttl=draw(u8),
        accumulated=accumulated,
        unreachable=unreachable,
        payload_size=draw(u16) if kind is MessageKind.DATA else 0,
    )


@settings(max_examples=10_000, deadline=None)
@given(messages())
def test_round_trip(message: Message) -> None:
    encoded = encode_message(message)
    assert len(encoded) == encoded_size(message)
    assert decode_message(encoded) == message
