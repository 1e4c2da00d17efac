from __future__ import annotations

import pytest

from app.core.errors import DuplicateAddress
from app.core.messages import (
    AddressBlock,
    Message,
    MessageKind,
    append_address,
    make_msg_id,
    msg_originator,
)


def _rreq(**fields: object) -> Message:
    return Message(kind=MessageKind.RREQ, orig=1, target=10, orig_seqnum=42, ttl=32, **fields)


def test_first_relay_appends_itself_at_distance_zero() -> None:
    relayed = append_address(_rreq(), 2, 5)
    assert relayed.accumulated == (AddressBlock(2, 5, 0),)
    assert relayed.hop_count == 1


def test_second_relay_shifts_earlier_blocks() -> None:
    first = append_address(_rreq(), 2, 5)
    second = append_address(first, 6, 9)
    assert second.accumulated == (AddressBlock(2, 5, 1), AddressBlock(6, 9, 0))
    assert second.addresses == (2, 6)
    assert second.hop_count == 2


def test_node_already_on_the_path_is_rejected() -> None:
    relayed = append_address(_rreq(), 2, 5)
    with pytest.raises(DuplicateAddress) as info:
        append_address(relayed, 2, 5)
    assert info.value.addr == 2


def test_only_discovery_messages_accumulate() -> None:
    data = Message(kind=MessageKind.DATA, orig=1, target=10, ttl=32, payload_size=512)
    with pytest.raises(ValueError):
        append_address(data, 2, 0)


def test_msg_id_is_ignored_by_equality() -> None:
    assert _rreq(msg_id=1) == _rreq(msg_id=2)


def test_msg_id_encodes_originator() -> None:
    msg_id = make_msg_id(7, 3)
    assert msg_originator(msg_id) == 7
    assert msg_id & 0xFFFFFFFF == 3


def test_only_data_is_not_control() -> None:
    assert not MessageKind.DATA.is_control
    assert all(kind.is_control for kind in MessageKind if kind is not MessageKind.DATA)
